#include "profdec/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "profdec/errors.hpp"

namespace profdec {

CoeffField::CoeffField(std::size_t dim, double p) : dim_(dim), p_(p) {
  if (dim == 0) throw ValidationError("field dimension must be at least 1");
  if (!std::isfinite(p) || p < 2.0) throw ValidationError("reference exponent p must satisfy 2 <= p < inf");
}

double CoeffField::amplitude(const WaveletIndex& idx) const {
  auto it = entries_.find(idx);
  return it == entries_.end() ? 0.0 : it->second;
}

void CoeffField::insert(const WaveletIndex& idx, double amp) {
  check_index(idx, dim_);
  if (amp == 0.0 || !std::isfinite(amp)) throw ValidationError("amplitudes must be finite and nonzero");
  if (!entries_.emplace(idx, amp).second)
    throw ValidationError("duplicate wavelet index (" + std::to_string(idx.gen) + ", " + std::to_string(idx.scale) +
                          ", " + idx.shift.to_string() + ")");
}

void CoeffField::assign(const WaveletIndex& idx, double amp) {
  check_index(idx, dim_);
  if (!std::isfinite(amp)) throw ValidationError("amplitudes must be finite");
  if (amp == 0.0)
    entries_.erase(idx);
  else
    entries_[idx] = amp;
}

bool CoeffField::is_lattice() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const auto& e) { return e.first.shift.is_integer(); });
}

bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
  const double ma = std::fabs(a.amplitude), mb = std::fabs(b.amplitude);
  if (ma != mb) return ma > mb;
  return a.index < b.index;
}

CoeffField transform(const CoeffField& f, const DyadicAffine& t) {
  if (t.dim() != f.dim()) throw ValidationError("transform: dimension mismatch");
  CoeffField out(f.dim(), f.p());
  for (const auto& [idx, amp] : f.entries()) out.insert(act_on_index(t, idx), amp);
  return out;
}

CoeffField combine(const CoeffField& f, const CoeffField& g, double alpha, double beta) {
  if (f.dim() != g.dim() || f.p() != g.p()) throw ValidationError("combine: fields differ in dimension or p");
  CoeffField out(f.dim(), f.p());
  auto fi = f.entries().begin(), gi = g.entries().begin();
  const auto fe = f.entries().end(), ge = g.entries().end();
  while (fi != fe || gi != ge) {
    if (gi == ge || (fi != fe && fi->first < gi->first)) {
      out.assign(fi->first, alpha * fi->second);
      ++fi;
    } else if (fi == fe || gi->first < fi->first) {
      out.assign(gi->first, beta * gi->second);
      ++gi;
    } else {
      out.assign(fi->first, alpha * fi->second + beta * gi->second);
      ++fi;
      ++gi;
    }
  }
  return out;
}

RankedOrder rank(const CoeffField& f) {
  RankedOrder order;
  order.reserve(f.size());
  for (const auto& [idx, amp] : f.entries()) order.push_back({idx, amp});
  std::stable_sort(order.begin(), order.end(), ranks_before);
  return order;
}

std::optional<RankedEntry> top_entry(const CoeffField& f) {
  std::optional<RankedEntry> best;
  for (const auto& [idx, amp] : f.entries()) {
    RankedEntry e{idx, amp};
    if (!best || ranks_before(e, *best)) best = std::move(e);
  }
  return best;
}

std::pair<CoeffField, CoeffField> split_top(const CoeffField& f, std::size_t n) {
  CoeffField head(f.dim(), f.p());
  CoeffField tail = f;
  const auto order = rank(f);
  for (std::size_t m = 0; m < std::min(n, order.size()); ++m) {
    head.insert(order[m].index, order[m].amplitude);
    tail.erase(order[m].index);
  }
  return {std::move(head), std::move(tail)};
}

}  // namespace profdec
