#include "profdec/dyadic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "profdec/errors.hpp"

namespace profdec {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw std::overflow_error("dyadic: integer overflow in addition");
  return r;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) throw std::overflow_error("dyadic: integer overflow in subtraction");
  return r;
}

std::int64_t checked_shl(std::int64_t x, std::int64_t m) {
  if (x == 0 || m == 0) return x;
  if (m >= 63) throw std::overflow_error("dyadic: integer overflow in power-of-two scaling");
  std::int64_t r;
  if (__builtin_mul_overflow(x, std::int64_t{1} << m, &r))
    throw std::overflow_error("dyadic: integer overflow in power-of-two scaling");
  return r;
}

void require_same_dim(const DyadicVec& a, const DyadicVec& b) {
  if (a.dim() != b.dim()) throw ValidationError("dyadic: dimension mismatch");
}

}  // namespace

DyadicVec::DyadicVec(std::vector<std::int64_t> numerators, std::int64_t denom_exp)
    : num_(std::move(numerators)), exp_(denom_exp) {
  if (denom_exp < 0) throw ValidationError("dyadic: denom_exp must be nonnegative");
  normalize();
}

void DyadicVec::normalize() {
  int tz = 64;
  for (auto v : num_)
    if (v != 0) tz = std::min(tz, std::countr_zero(static_cast<std::uint64_t>(v)));
  if (tz == 64) {
    exp_ = 0;
    return;
  }
  const auto shift = std::min<std::int64_t>(tz, exp_);
  if (shift == 0) return;
  for (auto& v : num_) v /= (std::int64_t{1} << shift);
  exp_ -= shift;
}

bool DyadicVec::is_zero() const {
  return std::all_of(num_.begin(), num_.end(), [](auto v) { return v == 0; });
}

DyadicVec DyadicVec::scaled_pow2(std::int64_t m) const {
  DyadicVec out = *this;
  if (m >= 0) {
    const auto absorbed = std::min(m, out.exp_);
    out.exp_ -= absorbed;
    for (auto& v : out.num_) v = checked_shl(v, m - absorbed);
  } else {
    out.exp_ = checked_sub(out.exp_, m);
    out.normalize();
  }
  return out;
}

std::vector<double> DyadicVec::to_double() const {
  std::vector<double> out(num_.size());
  for (std::size_t i = 0; i < num_.size(); ++i)
    out[i] = static_cast<double>(std::ldexp(static_cast<long double>(num_[i]), static_cast<int>(-exp_)));
  return out;
}

double DyadicVec::norm2() const {
  long double acc = 0;
  for (auto v : num_) {
    const long double x = std::ldexp(static_cast<long double>(v), static_cast<int>(-exp_));
    acc += x * x;
  }
  return static_cast<double>(std::sqrt(acc));
}

std::string DyadicVec::to_string() const {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < num_.size(); ++i) os << (i ? "," : "") << num_[i];
  os << ')';
  if (exp_ != 0) os << "/2^" << exp_;
  return os.str();
}

DyadicVec operator+(const DyadicVec& a, const DyadicVec& b) {
  require_same_dim(a, b);
  const auto e = std::max(a.exp_, b.exp_);
  auto out = DyadicVec::zeros(a.dim());
  out.exp_ = e;
  for (std::size_t i = 0; i < a.dim(); ++i)
    out.num_[i] = checked_add(checked_shl(a.num_[i], e - a.exp_), checked_shl(b.num_[i], e - b.exp_));
  out.normalize();
  return out;
}

DyadicVec operator-(const DyadicVec& a) {
  DyadicVec out = a;
  for (auto& v : out.num_) v = checked_sub(0, v);
  return out;
}

DyadicVec operator-(const DyadicVec& a, const DyadicVec& b) { return a + (-b); }

std::strong_ordering compare_at(const DyadicVec& a, const DyadicVec& b, std::size_t axis) {
  const std::int64_t x = a.numerators()[axis];
  const std::int64_t y = b.numerators()[axis];
  const std::int64_t ea = a.denom_exp();
  const std::int64_t eb = b.denom_exp();
  // x / 2^ea  vs  y / 2^eb  <=>  x * 2^(e - ea)  vs  y * 2^(e - eb)
  auto scaled_cmp = [](std::int64_t small_num, std::int64_t big_num, std::int64_t s) {
    // compares small_num vs big_num * 2^s, s >= 0
    if (s <= 63) {
      const __int128 rhs = static_cast<__int128>(big_num) * (static_cast<__int128>(1) << s);
      const __int128 lhs = small_num;
      return lhs <=> rhs;
    }
    if (big_num == 0) return small_num <=> std::int64_t{0};
    // |big_num * 2^s| >= 2^64 > |small_num|
    return big_num > 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  };
  if (ea >= eb) return scaled_cmp(x, y, ea - eb);
  return 0 <=> scaled_cmp(y, x, eb - ea);
}

std::strong_ordering operator<=>(const DyadicVec& a, const DyadicVec& b) {
  require_same_dim(a, b);
  for (std::size_t i = 0; i < a.dim(); ++i)
    if (auto c = compare_at(a, b, i); c != 0) return c;
  return std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const WaveletIndex& a, const WaveletIndex& b) {
  if (auto c = a.scale <=> b.scale; c != 0) return c;
  if (auto c = a.shift <=> b.shift; c != 0) return c;
  return a.gen <=> b.gen;
}

void check_index(const WaveletIndex& idx, std::size_t dim) {
  if (idx.dim() != dim) throw ValidationError("wavelet index has dimension " + std::to_string(idx.dim()) +
                                              ", expected " + std::to_string(dim));
  if (dim == 0 || dim > 30) throw ValidationError("unsupported dimension " + std::to_string(dim));
  const long max_gen = (1L << dim) - 1;
  if (idx.gen < 1 || idx.gen > max_gen)
    throw ValidationError("generator index " + std::to_string(idx.gen) + " outside [1, " + std::to_string(max_gen) + "]");
}

double DyadicCube::volume() const {
  return std::ldexp(1.0, static_cast<int>(-static_cast<std::int64_t>(corner.dim()) * scale));
}

DyadicVec DyadicCube::lower() const { return corner.scaled_pow2(-scale); }

DyadicVec DyadicCube::upper() const {
  return (corner + DyadicVec(std::vector<std::int64_t>(corner.dim(), 1))).scaled_pow2(-scale);
}

bool contains(const DyadicCube& cube, const DyadicVec& x) {
  const DyadicVec y = x.scaled_pow2(cube.scale) - cube.corner;
  const auto e = y.denom_exp();
  for (auto v : y.numerators()) {
    if (v < 0) return false;
    if (e < 63 && v >= (std::int64_t{1} << e)) return false;
  }
  return true;
}

bool overlaps(const DyadicCube& a, const DyadicCube& b) {
  const auto alo = a.lower(), ahi = a.upper(), blo = b.lower(), bhi = b.upper();
  for (std::size_t i = 0; i < alo.dim(); ++i) {
    if (compare_at(alo, bhi, i) >= 0 || compare_at(blo, ahi, i) >= 0) return false;
  }
  return true;
}

DyadicCube cube_of(const WaveletIndex& idx) { return {idx.scale, idx.shift}; }

DyadicAffine compose(const DyadicAffine& t1, const DyadicAffine& t2) {
  return {checked_add(t1.scale, t2.scale), t1.shift.scaled_pow2(t2.scale) + t2.shift};
}

DyadicAffine invert(const DyadicAffine& t) {
  return {checked_sub(0, t.scale), -t.shift.scaled_pow2(-t.scale)};
}

double magnitude(const DyadicAffine& t) {
  long double acc = 0;
  const auto e = t.shift.denom_exp();
  for (auto v : t.shift.numerators()) {
    const long double x = std::ldexp(static_cast<long double>(v), static_cast<int>(-t.scale - e));
    acc += x * x;
  }
  return static_cast<double>(std::fabs(static_cast<long double>(t.scale)) + std::sqrt(acc));
}

DyadicVec apply(const DyadicAffine& t, const DyadicVec& x) { return x.scaled_pow2(t.scale) - t.shift; }

WaveletIndex act_on_index(const DyadicAffine& t, const WaveletIndex& idx) {
  return {idx.gen, checked_add(t.scale, idx.scale), t.shift.scaled_pow2(idx.scale) + idx.shift};
}

double orthogonality_gap(const DyadicAffine& a, const DyadicAffine& b) {
  require_same_dim(a.shift, b.shift);
  const std::int64_t dj = checked_sub(a.scale, b.scale);
  const long double scale_part = std::fabs(static_cast<long double>(dj));
  try {
    return static_cast<double>(scale_part + (b.shift.scaled_pow2(dj) - a.shift).norm2());
  } catch (const std::overflow_error&) {
    // Very large relative scales: the exact shift difference leaves int64, but
    // the gap is only needed as a real number.
    long double acc = 0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
      const long double kb = std::ldexp(static_cast<long double>(b.shift.numerators()[i]),
                                        static_cast<int>(dj - b.shift.denom_exp()));
      const long double ka = std::ldexp(static_cast<long double>(a.shift.numerators()[i]),
                                        static_cast<int>(-a.shift.denom_exp()));
      acc += (kb - ka) * (kb - ka);
    }
    return static_cast<double>(scale_part + std::sqrt(acc));
  }
}

DyadicAffine relative_map(const DyadicAffine& anchor, const DyadicAffine& t) {
  return compose(invert(anchor), t);
}

}  // namespace profdec
