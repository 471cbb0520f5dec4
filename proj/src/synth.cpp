#include "profdec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "profdec/errors.hpp"
#include "profdec/norms.hpp"

namespace profdec {

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(engine_() % span);
  }

 private:
  std::mt19937_64 engine_;
};

void check_law(const ParamLaw& law, std::size_t dim, std::size_t which) {
  const auto where = "profile " + std::to_string(which) + ": ";
  if (law.base.dim() != dim || law.velocity.dim() != dim) throw ValidationError(where + "law dimension mismatch");
  const bool moves = !law.velocity.is_zero();
  const bool scales = law.scale_step != 0;
  if (scales && std::abs(law.scale_step) != 1) throw ValidationError(where + "scale_step must be -1, 0 or 1");
  const bool ok = [&] {
    switch (law.kind) {
      case LawKind::constant: return !moves && !scales;
      case LawKind::translation: return moves && !scales;
      case LawKind::scale: return !moves && scales;
      case LawKind::mixed: return moves && scales;
    }
    return false;
  }();
  if (!ok) throw ValidationError(where + "velocity and scale_step do not fit law kind " + to_string(law.kind));
}

bool diverges(const ParamLaw& a, const ParamLaw& b) {
  if (a.scale_step != b.scale_step) return true;
  // Equal steps keep j_a - j_b fixed, so the gap grows iff the shift term does.
  return !(b.velocity.scaled_pow2(a.base.scale - b.base.scale) == a.velocity);
}

WaveletIndex fresh_noise_index(Rng& rng, const NoiseSpec& noise, std::size_t dim) {
  WaveletIndex idx;
  idx.gen = static_cast<int>(rng.between(1, (std::int64_t{1} << dim) - 1));
  idx.scale = rng.between(noise.scale_min, noise.scale_max);
  std::vector<std::int64_t> k(dim);
  for (auto& v : k) v = rng.between(-noise.shift_radius, noise.shift_radius);
  idx.shift = DyadicVec(std::move(k));
  return idx;
}

}  // namespace

std::string to_string(LawKind kind) {
  switch (kind) {
    case LawKind::constant: return "constant";
    case LawKind::translation: return "translation";
    case LawKind::scale: return "scale";
    case LawKind::mixed: return "mixed";
  }
  return "?";
}

LawKind law_kind_from_string(const std::string& name) {
  for (auto k : {LawKind::constant, LawKind::translation, LawKind::scale, LawKind::mixed})
    if (to_string(k) == name) return k;
  throw ValidationError("unknown law kind '" + name + "'");
}

DyadicAffine ParamLaw::at_position(std::size_t n) const {
  const auto s = static_cast<std::int64_t>(n) + 1;
  DyadicAffine t = base;
  t.scale += scale_step * s;
  if (!velocity.is_zero()) {
    DyadicVec step = velocity;
    std::vector<std::int64_t> nums(step.numerators().begin(), step.numerators().end());
    for (auto& v : nums) {
      if (__builtin_mul_overflow(v, s, &v)) throw std::overflow_error("law velocity overflows");
    }
    t.shift = t.shift + DyadicVec(std::move(nums), step.denom_exp());
  }
  return t;
}

void validate(const SyntheticSpec& spec) {
  if (spec.dim < 1 || spec.dim > 30) throw ValidationError("dimension must lie in [1, 30]");
  if (!std::isfinite(spec.p) || spec.p < 2.0) throw ValidationError("p must satisfy 2 <= p < inf");
  if (spec.profiles.empty()) throw ValidationError("at least one profile is required");
  if (spec.n_count < 1) throw ValidationError("n_count must be at least 1");
  double min_amp = kInf;
  for (std::size_t l = 0; l < spec.profiles.size(); ++l) {
    const auto& prof = spec.profiles[l];
    if (prof.profile.dim() != spec.dim || prof.profile.p() != spec.p)
      throw ValidationError("profile " + std::to_string(l) + " differs in dimension or p");
    if (prof.profile.empty()) throw ValidationError("profile " + std::to_string(l) + " is empty");
    check_law(prof.law, spec.dim, l);
    for (const auto& [idx, amp] : prof.profile.entries()) min_amp = std::min(min_amp, std::fabs(amp));
  }
  if (spec.noise) {
    const auto& nz = *spec.noise;
    if (!std::isfinite(nz.epsilon) || nz.epsilon < 0.0) throw ValidationError("noise epsilon must be finite and >= 0");
    if (nz.epsilon >= min_amp) throw ValidationError("noise epsilon must be below every profile amplitude");
    if (nz.count < 0) throw ValidationError("noise count must be >= 0");
    if (nz.scale_min > nz.scale_max) throw ValidationError("noise scale range is empty");
    if (nz.shift_radius < 0) throw ValidationError("noise shift_radius must be >= 0");
  }
  for (std::size_t a = 0; a < spec.profiles.size(); ++a) {
    for (std::size_t b = a + 1; b < spec.profiles.size(); ++b) {
      const auto& la = spec.profiles[a].law;
      const auto& lb = spec.profiles[b].law;
      const auto pair = std::to_string(a) + " and " + std::to_string(b);
      if (!diverges(la, lb)) throw ValidationError("laws " + pair + " do not diverge");
      double prev = -1.0;
      for (std::size_t n = 0; n < spec.n_count; ++n) {
        const double g = orthogonality_gap(la.at_position(n), lb.at_position(n));
        if (!(g > prev))
          throw ValidationError("laws " + pair + ": gap not strictly increasing at position " + std::to_string(n));
        prev = g;
      }
    }
  }
}

Synthetic generate(const SyntheticSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  Synthetic out;
  auto& truth = out.truth;
  truth.dim = spec.dim;
  truth.p = spec.p;
  truth.sequence_length = spec.n_count;
  truth.stop_reason = "ground truth";

  // Members are ranked across all profiles the way the extractor will see them.
  std::vector<std::pair<RankedEntry, std::size_t>> members;
  for (std::size_t l = 0; l < spec.profiles.size(); ++l) {
    ProfileGroup g;
    g.profile = spec.profiles[l].profile;
    for (const auto& e : rank(g.profile)) members.push_back({e, l});
    truth.groups.push_back(std::move(g));
  }
  std::stable_sort(members.begin(), members.end(),
                   [](const auto& x, const auto& y) { return std::fabs(x.first.amplitude) > std::fabs(y.first.amplitude); });
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto& [e, l] = members[m];
    truth.groups[l].members.push_back(
        {static_cast<int>(m + 1), e.index.gen, {e.index.scale, e.index.shift}, e.amplitude, 0.0});
  }

  for (std::size_t n = 0; n < spec.n_count; ++n) {
    CoeffField u(spec.dim, spec.p);
    for (std::size_t l = 0; l < spec.profiles.size(); ++l) {
      const auto tau = spec.profiles[l].law.at_position(n);
      truth.groups[l].anchors.emplace(n, tau);
      const auto placed = transform(spec.profiles[l].profile, tau);
      for (const auto& [idx, amp] : placed.entries()) {
        if (u.amplitude(idx) != 0.0)
          throw ValidationError("profiles collide at position " + std::to_string(n) + " on one index");
        if (!idx.shift.is_integer())
          throw ValidationError("profile " + std::to_string(l) + " leaves the integer lattice at position " +
                                std::to_string(n));
        u.insert(idx, amp);
      }
    }
    CoeffField noise(spec.dim, spec.p);
    if (spec.noise && spec.noise->epsilon > 0.0) {
      const auto& nz = *spec.noise;
      const auto cells = static_cast<double>(nz.scale_max - nz.scale_min + 1) *
                         std::pow(2.0 * static_cast<double>(nz.shift_radius) + 1.0, static_cast<double>(spec.dim)) *
                         static_cast<double>((std::size_t{1} << spec.dim) - 1);
      if (static_cast<double>(nz.count) + static_cast<double>(u.size()) > cells)
        throw ValidationError("noise count exceeds the free indices of the noise window");
      while (noise.size() < static_cast<std::size_t>(nz.count)) {
        auto idx = fresh_noise_index(rng, nz, spec.dim);
        const double amp = nz.epsilon * (2.0 * rng.unit() - 1.0);
        if (amp == 0.0 || u.amplitude(idx) != 0.0 || noise.amplitude(idx) != 0.0) continue;
        noise.insert(idx, amp);
      }
      u = combine(u, noise, 1.0, 1.0);
    }
    truth.retained.push_back(n);
    truth.input_bound = std::max(truth.input_bound, lp_tilde(u));
    out.sequence.push_back(u);
    out.noise.push_back(std::move(noise));
  }
  truth.sequence = out.sequence;
  return out;
}

MatchReport align_frames(const Decomposition& found, const Decomposition& truth) {
  if (found.dim != truth.dim || found.p != truth.p) throw ValidationError("align_frames: dimension or p differ");
  MatchReport rep;
  std::set<std::size_t> used;

  auto try_match = [&](const ProfileGroup& f, const ProfileGroup& t, GroupMatch& gm) {
    const auto top = top_entry(f.profile);
    if (!top) return false;
    const auto& lf = top->index;
    for (const auto& [lt, amp_t] : t.profile.entries()) {
      if (lt.gen != lf.gen) continue;
      DyadicAffine sigma;
      try {
        sigma = {lt.scale - lf.scale, (lt.shift - lf.shift).scaled_pow2(-lf.scale)};
      } catch (const std::overflow_error&) {
        continue;
      }
      CoeffField moved;
      try {
        moved = transform(f.profile, sigma);
      } catch (const std::overflow_error&) {
        continue;
      }
      if (moved.size() != t.profile.size()) continue;
      double dev = 0.0;
      bool same_support = true;
      for (auto mi = moved.entries().begin(), ti = t.profile.entries().begin(); mi != moved.entries().end(); ++mi, ++ti) {
        if (!(mi->first == ti->first)) {
          same_support = false;
          break;
        }
        dev = std::max(dev, std::fabs(mi->second - ti->second));
      }
      if (!same_support) continue;
      bool anchors = true;
      for (const auto& [n, anchor] : f.anchors) {
        const auto it = t.anchors.find(n);
        if (it == t.anchors.end()) {
          anchors = false;
          break;
        }
        try {
          if (!(compose(it->second, sigma) == anchor)) anchors = false;
        } catch (const std::overflow_error&) {
          anchors = false;
        }
        if (!anchors) break;
      }
      gm.sigma = sigma;
      gm.max_deviation = dev;
      gm.anchors_match = anchors;
      if (anchors) return true;
    }
    return false;
  };

  rep.perfect = found.groups.size() == truth.groups.size();
  for (std::size_t t = 0; t < truth.groups.size(); ++t) {
    GroupMatch gm;
    gm.truth_group = t;
    for (std::size_t f = 0; f < found.groups.size() && !gm.found_group; ++f) {
      if (used.contains(f)) continue;
      GroupMatch trial = gm;
      if (try_match(found.groups[f], truth.groups[t], trial)) {
        gm = trial;
        gm.found_group = f;
        used.insert(f);
      }
    }
    if (!gm.found_group) rep.perfect = false;
    rep.max_deviation = std::max(rep.max_deviation, gm.found_group ? gm.max_deviation : kInf);
    rep.groups.push_back(gm);
  }
  rep.unmatched_found = found.groups.size() - used.size();
  return rep;
}

}  // namespace profdec
