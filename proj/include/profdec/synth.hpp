#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "profdec/dyadic.hpp"
#include "profdec/extract.hpp"
#include "profdec/field.hpp"

namespace profdec {

enum class LawKind { constant, translation, scale, mixed };

std::string to_string(LawKind kind);
LawKind law_kind_from_string(const std::string& name);

/// Parameter sequence s ↦ (j0 + step·s, k0 + s·velocity).
///
/// Sequence position n (0-based) is evaluated at sample s = n + 1, so a law
/// with k0 = 0 and velocity v puts position n at shift (n + 1)·v.
struct ParamLaw {
  LawKind kind = LawKind::constant;
  DyadicAffine base;
  DyadicVec velocity;  // translation and mixed
  int scale_step = 0;  // ±1 for scale and mixed

  DyadicAffine at_position(std::size_t n) const;

  friend bool operator==(const ParamLaw&, const ParamLaw&) = default;
};

struct NoiseSpec {
  double epsilon = 0.0;  // amplitudes uniform in [-epsilon, epsilon]
  int count = 0;         // entries per sequence position
  std::int64_t scale_min = -2;
  std::int64_t scale_max = 2;
  std::int64_t shift_radius = 16;  // integer shifts in [-radius, radius] per axis

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct SyntheticProfile {
  CoeffField profile;  // in its own frame; dyadic shifts allowed
  ParamLaw law;

  friend bool operator==(const SyntheticProfile&, const SyntheticProfile&) = default;
};

struct SyntheticSpec {
  std::size_t dim = 1;
  double p = 4.0;
  std::vector<SyntheticProfile> profiles;
  std::optional<NoiseSpec> noise;
  std::size_t n_count = 16;
  std::uint64_t seed = 0;

  friend bool operator==(const SyntheticSpec&, const SyntheticSpec&) = default;
};

struct Synthetic {
  std::vector<CoeffField> sequence;
  /// One group per profile with the law as anchors; sequence attached.
  Decomposition truth;
  std::vector<CoeffField> noise;  // per position, empty fields when noise-free
};

/// Throws ValidationError on malformed specs and on law pairs whose
/// orthogonality gap is not strictly increasing over the generated range.
void validate(const SyntheticSpec& spec);

/// Deterministic in (spec, spec.seed). The noise generator is mt19937_64;
/// a uniform real is (x >> 11)·2^-53 and an integer in [lo, hi] is
/// lo + x mod (hi - lo + 1).
Synthetic generate(const SyntheticSpec& spec);

struct GroupMatch {
  std::size_t truth_group = 0;
  std::optional<std::size_t> found_group;
  /// transform(found profile, sigma) has the truth profile's index set.
  DyadicAffine sigma;
  double max_deviation = 0.0;  // max amplitude difference after sigma
  bool anchors_match = false;

  friend bool operator==(const GroupMatch&, const GroupMatch&) = default;
};

struct MatchReport {
  std::vector<GroupMatch> groups;
  std::size_t unmatched_found = 0;
  bool perfect = false;  // every group matched one-to-one with matching anchors
  double max_deviation = 0.0;

  friend bool operator==(const MatchReport&, const MatchReport&) = default;
};

/// Order-free matching of found groups against truth groups, allowing one
/// change of frame per group.
MatchReport align_frames(const Decomposition& found, const Decomposition& truth);

}  // namespace profdec
