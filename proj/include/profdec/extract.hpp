#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "profdec/dyadic.hpp"
#include "profdec/field.hpp"
#include "profdec/norms.hpp"

namespace profdec {

enum class SpaceMode { lp, besov };

/// Space the input sequence is bounded in: L^p, or B^{s_{p,a}}_{a,q}.
struct InputSpace {
  SpaceMode mode = SpaceMode::lp;
  double p = 4.0;
  double a = 2.0;  // besov only
  double q = 2.0;  // besov only

  friend bool operator==(const InputSpace&, const InputSpace&) = default;
};

/// Space the remainders are measured in, B^{d(1/inner - 1/p)}_{inner,outer}.
/// L^p mode: (inner, outer) = (r, q). Besov mode: (inner, outer) = (b, r).
struct RemainderSpace {
  double inner = 8.0;
  double outer = 8.0;

  friend bool operator==(const RemainderSpace&, const RemainderSpace&) = default;
};

struct ExtractConfig {
  int max_iterations = 64;
  // Number of trailing retained sequence positions used for every limit and
  // constancy decision.
  int tail_window = 8;
  double conv_tol = 1e-6;
  double bound_threshold = 8.0;
  double stop_epsilon = 1e-9;
  InputSpace input;
  RemainderSpace remainder;

  friend bool operator==(const ExtractConfig&, const ExtractConfig&) = default;
};

/// Throws ValidationError when the configuration is out of range.
void validate(const ExtractConfig& cfg);

double input_norm(const CoeffField& f, const ExtractConfig& cfg);
double remainder_norm(const CoeffField& f, const ExtractConfig& cfg);

struct GroupMember {
  int rank = 0;  // extraction rank m, 1-based, globally unique
  int gen = 1;
  DyadicAffine relative;  // τ^{(m, m_1(l))}; identity for the first member
  double amplitude = 0.0; // limit amplitude a_m
  double spread = 0.0;    // max - min of the amplitude over the tail window

  friend bool operator==(const GroupMember&, const GroupMember&) = default;
};

struct ProfileGroup {
  /// (j_n, k_n) of the group's first member, per retained sequence position.
  std::map<std::size_t, DyadicAffine> anchors;
  std::vector<GroupMember> members;
  /// φ_l = Σ_μ a_μ ψ at act_on_index(relative_μ, (gen_μ, 0, 0)).
  CoeffField profile;

  friend bool operator==(const ProfileGroup&, const ProfileGroup&) = default;
};

struct Diagnostic {
  std::string kind;
  int rank = 0;  // extraction rank the event belongs to, 0 if none
  std::string message;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ExtractionStep {
  int rank = 0;
  int gen = 1;
  double amplitude = 0.0;
  double spread = 0.0;
  int group = 0;       // 0-based group the component went to
  std::string attach;  // "new", "member" or "new-oscillating"
  std::map<std::size_t, RankedEntry> picks;  // λ_n^m and a_{λ_n^m, n}

  friend bool operator==(const ExtractionStep&, const ExtractionStep&) = default;
};

struct Decomposition {
  std::size_t dim = 1;
  double p = 2.0;
  std::size_t sequence_length = 0;
  /// u_n. Left empty when a decomposition is loaded from a report file
  /// until the fields are attached again.
  std::vector<CoeffField> sequence;
  std::vector<std::size_t> retained;
  std::vector<ProfileGroup> groups;
  std::vector<ExtractionStep> steps;
  std::vector<Diagnostic> diagnostics;
  double input_bound = 0.0;
  std::string stop_reason;

  bool is_retained(std::size_t n) const;
  /// The last `window` retained positions (all of them if fewer).
  std::vector<std::size_t> tail(std::size_t window) const;

  friend bool operator==(const Decomposition&, const Decomposition&) = default;
};

Decomposition extract_profiles(std::span<const CoeffField> seq, const ExtractConfig& cfg);

/// Σ_{l<L} transform(φ_l, τ_{l,n}).
CoeffField reconstruct(const Decomposition& dec, std::size_t L, std::size_t n);
/// u_n - reconstruct(dec, L, n).
CoeffField remainder(const Decomposition& dec, std::size_t L, std::size_t n);

/// ∫ S_l S_{l'}^{p/2-1} for the transformed profiles l, l' at position n.
/// Zero by convention when p == 2.
double cross_interaction(const Decomposition& dec, std::size_t l, std::size_t l2, std::size_t n);

/// First retained position from which the cube supports of the transformed
/// profiles l and l2 stay disjoint; nullopt if they still meet at the last one.
std::optional<std::size_t> separation_index(const Decomposition& dec, std::size_t l, std::size_t l2);

struct GapTable {
  std::size_t l = 0, l2 = 0;
  std::vector<double> values;  // per retained position
  bool nondecreasing_tail = false;
  bool strictly_increasing_tail = false;
  double final_value = 0.0;
  bool pass = false;

  friend bool operator==(const GapTable&, const GapTable&) = default;
};

struct CrossTable {
  std::size_t l = 0, l2 = 0;
  std::vector<double> values;  // per retained position

  friend bool operator==(const CrossTable&, const CrossTable&) = default;
};

struct VerificationReport {
  std::vector<std::size_t> positions;  // the retained positions all tables refer to
  std::vector<std::size_t> tail;

  std::vector<GapTable> gaps;
  bool gaps_pass = true;

  // remainder_norms[L][i]: ||r^L_{positions[i]}||~ in the remainder space.
  std::vector<std::vector<double>> remainder_norms;
  std::vector<double> remainder_tail_max;  // per L
  bool remainder_nonincreasing = true;

  // Stability. L^p mode compares Σ_l ||φ_l||~_p^p with tail-min ||u_n||~_p^p;
  // Besov mode compares the ℓ^τ aggregate of ||φ_l||~ with tail-min ||u_n||~.
  std::vector<double> stability_per_position;  // the transformed-profile aggregate per position
  double stability_profile_sum = 0.0;
  double stability_tail_min = 0.0;
  double stability_tolerance = 1e-9;
  bool stability_pass = false;

  // ||r^L_n||~ - ||u_n||~ in the input space: per-L tail maxima of the positive part.
  std::vector<std::vector<double>> input_remainder_norms;  // [L][i]
  std::vector<double> input_norms;                         // [i]
  std::vector<double> remainder_margin;                    // per L
  double max_remainder_margin = 0.0;

  std::vector<CrossTable> cross;

  double amplitude_p_sum = 0.0;    // Σ_m |a_m|^p
  double amplitude_p_ratio = 0.0;  // divided by max_n ||u_n||~_p^p (reported constant)

  bool reconstruction_exact = true;
  bool lattice_ok = true;

  friend bool operator==(const VerificationReport&, const VerificationReport&) = default;
};

VerificationReport verify(const Decomposition& dec, const ExtractConfig& cfg);

}  // namespace profdec
