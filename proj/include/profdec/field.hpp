#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "profdec/dyadic.hpp"

namespace profdec {

/// A function u = Σ a_λ ψ_λ stored as its finite set of nonzero coefficients.
///
/// `p` is the reference exponent fixing the normalization ψ_λ = 2^{jd/p} ψ(2^j x - k);
/// every norm in this library reads it from the field. Entries never hold a
/// zero amplitude and all indices share the field's dimension.
class CoeffField {
 public:
  using Map = std::map<WaveletIndex, double>;

  CoeffField() = default;
  CoeffField(std::size_t dim, double p);

  std::size_t dim() const { return dim_; }
  double p() const { return p_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }

  /// 0 when the index is absent.
  double amplitude(const WaveletIndex& idx) const;

  /// Adds a new entry. Throws ValidationError on zero or non-finite
  /// amplitudes, duplicate indices, or indices of the wrong dimension.
  void insert(const WaveletIndex& idx, double amp);
  /// Sets or replaces; a zero amplitude removes the entry.
  void assign(const WaveletIndex& idx, double amp);
  bool erase(const WaveletIndex& idx) { return entries_.erase(idx) > 0; }

  /// True iff every shift is integral.
  bool is_lattice() const;

  friend bool operator==(const CoeffField&, const CoeffField&) = default;

 private:
  std::size_t dim_ = 1;
  double p_ = 2.0;
  Map entries_;
};

struct RankedEntry {
  WaveletIndex index;
  double amplitude = 0.0;

  friend bool operator==(const RankedEntry&, const RankedEntry&) = default;
};

/// Decreasing |amplitude|; ties by WaveletIndex order (scale, shift, gen).
using RankedOrder = std::vector<RankedEntry>;

/// Strict weak order used by rank().
bool ranks_before(const RankedEntry& a, const RankedEntry& b);

CoeffField transform(const CoeffField& f, const DyadicAffine& t);

/// αf + βg coefficient-wise; exact zeros are dropped.
CoeffField combine(const CoeffField& f, const CoeffField& g, double alpha, double beta);

RankedOrder rank(const CoeffField& f);

/// The first element of rank(f), without sorting everything.
std::optional<RankedEntry> top_entry(const CoeffField& f);

/// (P_N f, Q_N f): the N top-ranked entries and the rest.
std::pair<CoeffField, CoeffField> split_top(const CoeffField& f, std::size_t n);

}  // namespace profdec
