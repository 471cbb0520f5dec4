#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace profdec {

/// Vector of dyadic rationals numerators[i] / 2^denom_exp.
///
/// Values are kept normalized: when denom_exp > 0 at least one numerator is
/// odd, and the zero vector has denom_exp == 0. Equality is therefore plain
/// field-wise equality. Arithmetic is exact; any step that would leave the
/// 64-bit numerator range throws std::overflow_error.
class DyadicVec {
 public:
  DyadicVec() = default;
  DyadicVec(std::vector<std::int64_t> numerators, std::int64_t denom_exp = 0);

  static DyadicVec zeros(std::size_t dim) { return DyadicVec(std::vector<std::int64_t>(dim, 0)); }

  std::size_t dim() const { return num_.size(); }
  std::span<const std::int64_t> numerators() const { return num_; }
  std::int64_t denom_exp() const { return exp_; }
  bool is_integer() const { return exp_ == 0; }
  bool is_zero() const;

  /// value * 2^m, exact.
  DyadicVec scaled_pow2(std::int64_t m) const;

  std::vector<double> to_double() const;
  /// Euclidean norm, evaluated in long double.
  double norm2() const;
  std::string to_string() const;

  friend DyadicVec operator+(const DyadicVec& a, const DyadicVec& b);
  friend DyadicVec operator-(const DyadicVec& a, const DyadicVec& b);
  friend DyadicVec operator-(const DyadicVec& a);
  friend bool operator==(const DyadicVec& a, const DyadicVec& b) = default;
  /// Lexicographic by component value.
  friend std::strong_ordering operator<=>(const DyadicVec& a, const DyadicVec& b);

 private:
  void normalize();

  std::vector<std::int64_t> num_;
  std::int64_t exp_ = 0;
};

/// Exact comparison of a single component of two vectors.
std::strong_ordering compare_at(const DyadicVec& a, const DyadicVec& b, std::size_t axis);

/// Lattice point λ = (i, j, k). `shift` may be a dyadic rational for indices
/// living in a profile frame; sequence data always has integer shifts.
struct WaveletIndex {
  int gen = 1;
  std::int64_t scale = 0;
  DyadicVec shift;

  std::size_t dim() const { return shift.dim(); }

  friend bool operator==(const WaveletIndex&, const WaveletIndex&) = default;
  /// (scale, shift, gen) lexicographic. Also the tie-break used when ranking.
  friend std::strong_ordering operator<=>(const WaveletIndex& a, const WaveletIndex& b);
};

/// Throws ValidationError if gen is outside [1, 2^d - 1] or dims disagree.
void check_index(const WaveletIndex& idx, std::size_t dim);

/// {x : 2^scale x - corner in [0,1)^d}
struct DyadicCube {
  std::int64_t scale = 0;
  DyadicVec corner;

  /// 2^{-d scale}
  double volume() const;
  /// Lower/upper corners in absolute coordinates.
  DyadicVec lower() const;
  DyadicVec upper() const;
};

bool contains(const DyadicCube& cube, const DyadicVec& x);
bool overlaps(const DyadicCube& a, const DyadicCube& b);

/// τ(x) = 2^scale x - shift
struct DyadicAffine {
  std::int64_t scale = 0;
  DyadicVec shift;

  static DyadicAffine identity(std::size_t dim) { return {0, DyadicVec::zeros(dim)}; }
  std::size_t dim() const { return shift.dim(); }
  bool is_identity() const { return scale == 0 && shift.is_zero(); }

  friend bool operator==(const DyadicAffine&, const DyadicAffine&) = default;
};

DyadicCube cube_of(const WaveletIndex& idx);

/// τ2 ∘ τ1. Acting on fields this is the contravariant product:
/// transform(transform(f, τ2), τ1) == transform(f, compose(τ1, τ2)).
DyadicAffine compose(const DyadicAffine& t1, const DyadicAffine& t2);
DyadicAffine invert(const DyadicAffine& t);

/// |j| + ||2^{-j} k||_2 (log base 2).
double magnitude(const DyadicAffine& t);

DyadicVec apply(const DyadicAffine& t, const DyadicVec& x);

/// Index of ψ_λ after the change of variables x -> τ(x):
/// (i, j_τ + j_λ, 2^{j_λ} k_τ + k_λ). Amplitudes are unaffected.
WaveletIndex act_on_index(const DyadicAffine& t, const WaveletIndex& idx);

/// |j_a - j_b| + ||2^{j_a - j_b} k_b - k_a||_2 for two parameter pairs.
/// Equals magnitude(compose(invert(a), b)).
double orthogonality_gap(const DyadicAffine& a, const DyadicAffine& b);

/// Relative map b ∘ a^{-1}, i.e. (j_b - j_a, k_b - 2^{j_b - j_a} k_a).
DyadicAffine relative_map(const DyadicAffine& anchor, const DyadicAffine& t);

}  // namespace profdec
