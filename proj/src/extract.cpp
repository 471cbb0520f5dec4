#include "profdec/extract.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "profdec/errors.hpp"

namespace profdec {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(name) + " must be positive and finite");
}

std::string describe(const WaveletIndex& idx) {
  std::ostringstream os;
  os << '(' << idx.gen << ", " << idx.scale << ", " << idx.shift.to_string() << ')';
  return os.str();
}

DyadicAffine params_of(const WaveletIndex& idx) { return {idx.scale, idx.shift}; }

WaveletIndex origin_index(int gen, std::size_t dim) { return {gen, 0, DyadicVec::zeros(dim)}; }

enum class Relation { bounded, orthogonal, neither };

struct Classification {
  Relation relation = Relation::neither;
  DyadicAffine relative;
};

// Case (b) needs the relative map exactly constant over the tail and small;
// case (a) needs the gap sequence nondecreasing or uniformly above threshold.
Classification classify(const ProfileGroup& group, const std::map<std::size_t, RankedEntry>& picks,
                        const std::vector<std::size_t>& tail, const ExtractConfig& cfg) {
  std::vector<double> gaps;
  std::optional<DyadicAffine> common;
  bool constant = true;
  for (auto n : tail) {
    const auto& anchor = group.anchors.at(n);
    const auto here = params_of(picks.at(n).index);
    gaps.push_back(orthogonality_gap(anchor, here));
    if (!constant) continue;
    try {
      auto rel = relative_map(anchor, here);
      if (!common)
        common = std::move(rel);
      else if (!(*common == rel))
        constant = false;
    } catch (const std::overflow_error&) {
      constant = false;
    }
  }
  Classification out;
  if (constant && common && magnitude(*common) <= cfg.bound_threshold) {
    out.relation = Relation::bounded;
    out.relative = *common;
    return out;
  }
  const bool nondecreasing = std::is_sorted(gaps.begin(), gaps.end());
  const bool large = std::all_of(gaps.begin(), gaps.end(), [&](double g) { return g > cfg.bound_threshold; });
  out.relation = (nondecreasing || large) ? Relation::orthogonal : Relation::neither;
  return out;
}

double tail_mean(const std::vector<double>& xs) {
  // Offset from the first sample so identical samples give that sample exactly.
  const long double base = xs.front();
  long double acc = 0;
  for (double x : xs) acc += static_cast<long double>(x) - base;
  return static_cast<double>(base + acc / static_cast<long double>(xs.size()));
}

void prune(Decomposition& dec, const std::vector<std::size_t>& drop, int rank, const std::string& why) {
  if (drop.empty()) return;
  std::ostringstream os;
  os << "dropped " << drop.size() << " position(s) (" << why << "):";
  for (auto n : drop) os << ' ' << n;
  dec.diagnostics.push_back({"pruned", rank, os.str()});
  std::vector<std::size_t> kept;
  std::set_difference(dec.retained.begin(), dec.retained.end(), drop.begin(), drop.end(), std::back_inserter(kept));
  dec.retained = std::move(kept);
}

bool lp_mode(const ExtractConfig& cfg) { return cfg.input.mode == SpaceMode::lp; }

}  // namespace

void validate(const ExtractConfig& cfg) {
  if (cfg.max_iterations < 1) throw ValidationError("max_iterations must be at least 1");
  if (cfg.tail_window < 2) throw ValidationError("tail_window must be at least 2");
  require_positive(cfg.conv_tol, "conv_tol");
  require_positive(cfg.bound_threshold, "bound_threshold");
  require_positive(cfg.stop_epsilon, "stop_epsilon");
  const double p = cfg.input.p;
  if (!std::isfinite(p) || p < 2.0) throw ValidationError("input exponent p must satisfy 2 <= p < inf");
  const double inner = cfg.remainder.inner, outer = cfg.remainder.outer;
  if (lp_mode(cfg)) {
    if (!(inner > p) || !(outer > p)) throw ValidationError("L^p mode requires p < r, q <= inf");
  } else {
    const double a = cfg.input.a, q = cfg.input.q;
    if (!(a >= 1.0) || std::isinf(a) || !(q >= 1.0)) throw ValidationError("Besov input needs a in [1, inf) and q >= 1");
    if (!(inner > a)) throw ValidationError("Besov mode requires a < b");
    if (!(outer >= q)) throw ValidationError("Besov mode requires q <= r");
    // r >= (b/a) q; with b = inf this forces r = inf.
    const double needed = std::isinf(inner) ? kInf : inner / a * q;
    if (!(outer >= needed)) throw ValidationError("Besov mode requires r >= (b/a) q");
  }
}

double input_norm(const CoeffField& f, const ExtractConfig& cfg) {
  if (lp_mode(cfg)) return lp_tilde(f);
  return besov_tilde(f, {critical_smoothness(f.dim(), f.p(), cfg.input.a), cfg.input.a, cfg.input.q});
}

double remainder_norm(const CoeffField& f, const ExtractConfig& cfg) {
  const auto& rs = cfg.remainder;
  return besov_tilde(f, {critical_smoothness(f.dim(), f.p(), rs.inner), rs.inner, rs.outer});
}

bool Decomposition::is_retained(std::size_t n) const {
  return std::binary_search(retained.begin(), retained.end(), n);
}

std::vector<std::size_t> Decomposition::tail(std::size_t window) const {
  const auto take = std::min(window, retained.size());
  return {retained.end() - static_cast<std::ptrdiff_t>(take), retained.end()};
}

Decomposition extract_profiles(std::span<const CoeffField> seq, const ExtractConfig& cfg) {
  validate(cfg);
  if (seq.empty()) throw ValidationError("extract_profiles: empty sequence");
  const auto dim = seq.front().dim();
  const auto p = seq.front().p();
  for (std::size_t n = 0; n < seq.size(); ++n) {
    if (seq[n].dim() != dim || seq[n].p() != p)
      throw ValidationError("extract_profiles: field " + std::to_string(n) + " differs in dimension or p");
    if (!seq[n].is_lattice())
      throw ValidationError("extract_profiles: field " + std::to_string(n) + " has non-integer shifts");
  }
  if (p != cfg.input.p) throw ValidationError("extract_profiles: config p differs from the fields' p");
  const auto window = static_cast<std::size_t>(cfg.tail_window);
  if (window > seq.size()) throw ValidationError("extract_profiles: tail window longer than the sequence");

  Decomposition dec;
  dec.dim = dim;
  dec.p = p;
  dec.sequence_length = seq.size();
  dec.sequence.assign(seq.begin(), seq.end());
  for (std::size_t n = 0; n < seq.size(); ++n) {
    dec.retained.push_back(n);
    dec.input_bound = std::max(dec.input_bound, input_norm(seq[n], cfg));
  }
  std::vector<CoeffField> residual(seq.begin(), seq.end());

  for (int iter = 0;; ++iter) {
    const int rank = iter + 1;
    double tail_sup = 0.0;
    for (auto n : dec.tail(window)) tail_sup = std::max(tail_sup, sup_tilde(residual[n]));
    if (tail_sup <= cfg.stop_epsilon) {
      dec.stop_reason = "residual below stop_epsilon";
      break;
    }
    if (iter == cfg.max_iterations) {
      dec.stop_reason = "max_iterations reached";
      dec.diagnostics.push_back({"max-iterations", 0, "tail residual sup " + std::to_string(tail_sup) +
                                                          " still above stop_epsilon"});
      break;
    }

    std::vector<std::size_t> drop;
    for (auto n : dec.retained)
      if (residual[n].empty()) drop.push_back(n);
    prune(dec, drop, rank, "residual exhausted");
    if (dec.retained.size() < window) {
      dec.stop_reason = "retained positions fewer than tail window";
      dec.diagnostics.push_back({"subsequence-exhausted", rank, dec.stop_reason});
      break;
    }

    std::map<std::size_t, RankedEntry> picks;
    for (auto n : dec.retained) picks.emplace(n, *top_entry(residual[n]));

    // The generator must be eventually constant: keep the modal one of the tail.
    std::map<int, int> gen_count;
    for (auto n : dec.tail(window)) ++gen_count[picks.at(n).index.gen];
    int gen = 0, best = -1;
    for (auto [g, c] : gen_count)
      if (c > best) gen = g, best = c;
    drop.clear();
    for (auto n : dec.retained)
      if (picks.at(n).index.gen != gen) drop.push_back(n);
    prune(dec, drop, rank, "generator differs from modal generator " + std::to_string(gen));
    if (dec.retained.size() < window) {
      dec.stop_reason = "retained positions fewer than tail window";
      dec.diagnostics.push_back({"subsequence-exhausted", rank, dec.stop_reason});
      break;
    }
    for (auto it = picks.begin(); it != picks.end();)
      it = dec.is_retained(it->first) ? std::next(it) : picks.erase(it);

    const auto tail = dec.tail(window);
    std::vector<double> tail_amps;
    for (auto n : tail) tail_amps.push_back(picks.at(n).amplitude);
    const auto [lo, hi] = std::minmax_element(tail_amps.begin(), tail_amps.end());
    const double spread = *hi - *lo;
    const double amp = tail_mean(tail_amps);
    if (spread > cfg.conv_tol)
      dec.diagnostics.push_back({"non-convergent-amplitude", rank,
                                 "tail amplitude spread " + std::to_string(spread) + " exceeds conv_tol"});

    ExtractionStep step;
    step.rank = rank;
    step.gen = gen;
    step.amplitude = amp;
    step.spread = spread;

    std::optional<std::size_t> home;
    DyadicAffine rel;
    bool oscillating = false;
    for (std::size_t l = 0; l < dec.groups.size(); ++l) {
      const auto c = classify(dec.groups[l], picks, tail, cfg);
      if (c.relation == Relation::bounded) {
        home = l;
        rel = c.relative;
        break;
      }
      if (c.relation == Relation::neither) oscillating = true;
    }

    if (home) {
      auto& group = dec.groups[*home];
      drop.clear();
      for (auto n : dec.retained) {
        bool same = false;
        try {
          same = relative_map(group.anchors.at(n), params_of(picks.at(n).index)) == rel;
        } catch (const std::overflow_error&) {
        }
        if (!same) drop.push_back(n);
      }
      prune(dec, drop, rank, "relative map differs from its tail value");
      group.members.push_back({rank, gen, rel, amp, spread});
      step.group = static_cast<int>(*home);
      step.attach = "member";
    } else {
      ProfileGroup group;
      for (auto n : dec.retained) group.anchors.emplace(n, params_of(picks.at(n).index));
      group.members.push_back({rank, gen, DyadicAffine::identity(dim), amp, spread});
      dec.groups.push_back(std::move(group));
      step.group = static_cast<int>(dec.groups.size() - 1);
      step.attach = oscillating ? "new-oscillating" : "new";
      if (oscillating)
        dec.diagnostics.push_back({"oscillating-relative-map", rank,
                                   "relative parameters neither tail-constant nor diverging; opened a new group"});
    }

    for (auto n : dec.retained) {
      const auto& pick = picks.at(n);
      residual[n].erase(pick.index);
      step.picks.emplace(n, pick);
    }
    dec.steps.push_back(std::move(step));
  }

  for (auto& group : dec.groups) {
    for (auto it = group.anchors.begin(); it != group.anchors.end();)
      it = dec.is_retained(it->first) ? std::next(it) : group.anchors.erase(it);
    group.profile = CoeffField(dim, p);
    for (const auto& m : group.members) {
      if (m.amplitude == 0.0) {
        dec.diagnostics.push_back({"zero-limit-amplitude", m.rank, "member left out of its profile"});
        continue;
      }
      const auto idx = act_on_index(m.relative, origin_index(m.gen, dim));
      if (group.profile.amplitude(idx) != 0.0)
        throw InvariantError("two members of one group share the profile index " + describe(idx));
      group.profile.insert(idx, m.amplitude);
    }
  }
  return dec;
}

CoeffField reconstruct(const Decomposition& dec, std::size_t L, std::size_t n) {
  if (L > dec.groups.size()) throw ValidationError("reconstruct: L exceeds the number of groups");
  if (!dec.is_retained(n)) throw ValidationError("reconstruct: position " + std::to_string(n) + " is not retained");
  CoeffField out(dec.dim, dec.p);
  for (std::size_t l = 0; l < L; ++l)
    out = combine(out, transform(dec.groups[l].profile, dec.groups[l].anchors.at(n)), 1.0, 1.0);
  return out;
}

CoeffField remainder(const Decomposition& dec, std::size_t L, std::size_t n) {
  if (n >= dec.sequence.size()) throw ValidationError("remainder: sequence fields not attached for position " + std::to_string(n));
  return combine(dec.sequence[n], reconstruct(dec, L, n), 1.0, -1.0);
}

double cross_interaction(const Decomposition& dec, std::size_t l, std::size_t l2, std::size_t n) {
  if (l == l2) throw ValidationError("cross_interaction: groups must differ");
  if (l >= dec.groups.size() || l2 >= dec.groups.size()) throw ValidationError("cross_interaction: group out of range");
  if (!dec.is_retained(n)) throw ValidationError("cross_interaction: position not retained");
  if (dec.p < 2.0) throw ValidationError("cross_interaction: p < 2");
  if (dec.p == 2.0) return 0.0;
  const auto a = transform(dec.groups[l].profile, dec.groups[l].anchors.at(n));
  const auto b = transform(dec.groups[l2].profile, dec.groups[l2].anchors.at(n));
  return square_function_cross_integral(a, b);
}

std::optional<std::size_t> separation_index(const Decomposition& dec, std::size_t l, std::size_t l2) {
  auto disjoint_at = [&](std::size_t n) {
    const auto a = transform(dec.groups[l].profile, dec.groups[l].anchors.at(n));
    const auto b = transform(dec.groups[l2].profile, dec.groups[l2].anchors.at(n));
    for (const auto& [ia, va] : a.entries())
      for (const auto& [ib, vb] : b.entries())
        if (overlaps(cube_of(ia), cube_of(ib))) return false;
    return true;
  };
  std::optional<std::size_t> first;
  for (auto it = dec.retained.rbegin(); it != dec.retained.rend(); ++it) {
    if (!disjoint_at(*it)) break;
    first = *it;
  }
  return first;
}

VerificationReport verify(const Decomposition& dec, const ExtractConfig& cfg) {
  validate(cfg);
  VerificationReport rep;
  rep.positions = dec.retained;
  rep.tail = dec.tail(static_cast<std::size_t>(cfg.tail_window));
  const auto G = dec.groups.size();
  const auto count = rep.positions.size();
  const auto tail_begin = count - rep.tail.size();

  // (i) pairwise orthogonality of the anchor parameter sequences
  for (std::size_t l = 0; l < G; ++l) {
    for (std::size_t l2 = l + 1; l2 < G; ++l2) {
      GapTable t;
      t.l = l;
      t.l2 = l2;
      for (auto n : rep.positions)
        t.values.push_back(orthogonality_gap(dec.groups[l].anchors.at(n), dec.groups[l2].anchors.at(n)));
      if (!t.values.empty()) {
        auto first = t.values.begin() + static_cast<std::ptrdiff_t>(tail_begin);
        t.nondecreasing_tail = std::is_sorted(first, t.values.end());
        t.strictly_increasing_tail = std::adjacent_find(first, t.values.end(), std::greater_equal<>()) == t.values.end();
        t.final_value = t.values.back();
      }
      t.pass = t.nondecreasing_tail && t.final_value >= cfg.bound_threshold;
      rep.gaps_pass = rep.gaps_pass && t.pass;
      rep.gaps.push_back(std::move(t));
    }
  }

  // (ii) remainder smallness and (iv) remainder stability
  const bool have_fields = dec.sequence.size() == dec.sequence_length && dec.sequence_length > 0;
  if (have_fields) {
    rep.remainder_norms.assign(G + 1, std::vector<double>(count));
    rep.input_remainder_norms.assign(G + 1, std::vector<double>(count));
    rep.remainder_tail_max.assign(G + 1, 0.0);
    rep.remainder_margin.assign(G + 1, 0.0);
    for (std::size_t i = 0; i < count; ++i) rep.input_norms.push_back(input_norm(dec.sequence[rep.positions[i]], cfg));
    for (std::size_t L = 0; L <= G; ++L) {
      for (std::size_t i = 0; i < count; ++i) {
        const auto n = rep.positions[i];
        const auto rec = reconstruct(dec, L, n);
        const auto rem = combine(dec.sequence[n], rec, 1.0, -1.0);
        if (!(combine(rec, rem, 1.0, 1.0) == dec.sequence[n])) rep.reconstruction_exact = false;
        if (!rec.is_lattice()) rep.lattice_ok = false;
        rep.remainder_norms[L][i] = remainder_norm(rem, cfg);
        rep.input_remainder_norms[L][i] = input_norm(rem, cfg);
        if (i >= tail_begin) {
          rep.remainder_tail_max[L] = std::max(rep.remainder_tail_max[L], rep.remainder_norms[L][i]);
          rep.remainder_margin[L] =
              std::max(rep.remainder_margin[L], rep.input_remainder_norms[L][i] - rep.input_norms[i]);
        }
      }
      rep.max_remainder_margin = std::max(rep.max_remainder_margin, rep.remainder_margin[L]);
      if (L > 0 && rep.remainder_tail_max[L] > rep.remainder_tail_max[L - 1]) rep.remainder_nonincreasing = false;
    }
  }

  // (iii) stability
  const double p = dec.p;
  const double tau = lp_mode(cfg) ? p : std::max(cfg.input.a, cfg.input.q);
  auto aggregate = [&](const std::vector<double>& norms) {
    if (lp_mode(cfg)) {
      long double s = 0;
      for (double v : norms) s += std::pow(static_cast<long double>(v), static_cast<long double>(p));
      return static_cast<double>(s);
    }
    if (std::isinf(tau)) return norms.empty() ? 0.0 : *std::max_element(norms.begin(), norms.end());
    long double s = 0;
    for (double v : norms) s += std::pow(static_cast<long double>(v), static_cast<long double>(tau));
    return static_cast<double>(std::pow(s, 1.0L / tau));
  };
  std::vector<double> profile_norms;
  for (const auto& g : dec.groups) profile_norms.push_back(input_norm(g.profile, cfg));
  rep.stability_profile_sum = aggregate(profile_norms);
  for (auto n : rep.positions) {
    std::vector<double> norms;
    for (const auto& g : dec.groups) norms.push_back(input_norm(transform(g.profile, g.anchors.at(n)), cfg));
    rep.stability_per_position.push_back(aggregate(norms));
  }
  if (have_fields && !rep.tail.empty()) {
    rep.stability_tail_min = kInf;
    for (std::size_t i = tail_begin; i < count; ++i) {
      const double u = rep.input_norms[i];
      rep.stability_tail_min = std::min(rep.stability_tail_min, lp_mode(cfg) ? std::pow(u, p) : u);
    }
    double worst = rep.stability_profile_sum;
    for (std::size_t i = tail_begin; i < count; ++i) worst = std::max(worst, rep.stability_per_position[i]);
    rep.stability_pass = worst <= rep.stability_tail_min + rep.stability_tolerance;
  }

  // cross interactions, both orders since the integrand is not symmetric
  for (std::size_t l = 0; l < G; ++l) {
    for (std::size_t l2 = 0; l2 < G; ++l2) {
      if (l == l2) continue;
      CrossTable t;
      t.l = l;
      t.l2 = l2;
      for (auto n : rep.positions) t.values.push_back(cross_interaction(dec, l, l2, n));
      rep.cross.push_back(std::move(t));
    }
  }

  // limit-amplitude summability
  long double sum = 0;
  for (const auto& g : dec.groups)
    for (const auto& m : g.members) sum += std::pow(std::fabs(static_cast<long double>(m.amplitude)), static_cast<long double>(p));
  rep.amplitude_p_sum = static_cast<double>(sum);
  if (have_fields) {
    double umax = 0.0;
    for (auto n : rep.positions) umax = std::max(umax, lp_tilde(dec.sequence[n]));
    rep.amplitude_p_ratio = umax > 0.0 ? rep.amplitude_p_sum / std::pow(umax, p) : 0.0;
  }
  return rep;
}

}  // namespace profdec
