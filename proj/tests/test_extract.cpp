#include <doctest.h>

#include "profdec/errors.hpp"
#include "profdec/extract.hpp"
#include "profdec/synth.hpp"
#include "support/oracles.hpp"

using namespace profdec;

namespace {

WaveletIndex at(std::int64_t j, std::int64_t k, int i = 1) { return {i, j, DyadicVec({k})}; }
DyadicAffine aff(std::int64_t j, std::int64_t k) { return {j, DyadicVec({k})}; }

CoeffField single(const WaveletIndex& idx, double a, double p = 4.0) {
  CoeffField f(idx.dim(), p);
  f.insert(idx, a);
  return f;
}

ExtractConfig small_config() {
  ExtractConfig cfg;
  cfg.tail_window = 4;
  return cfg;
}

SyntheticProfile profile(std::initializer_list<std::pair<WaveletIndex, double>> entries, ParamLaw law,
                         double p = 4.0) {
  CoeffField f(1, p);
  for (const auto& [idx, a] : entries) f.insert(idx, a);
  return {f, std::move(law)};
}

ParamLaw constant_law() { return {LawKind::constant, aff(0, 0), DyadicVec::zeros(1), 0}; }
ParamLaw translation(std::int64_t v) { return {LawKind::translation, aff(0, 0), DyadicVec({v}), 0}; }
ParamLaw scaling(int step) { return {LawKind::scale, aff(0, 0), DyadicVec::zeros(1), step}; }

}  // namespace

TEST_CASE("config validation") {
  ExtractConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  auto bad = cfg;
  bad.tail_window = 1;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = cfg;
  bad.max_iterations = 0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = cfg;
  bad.conv_tol = 0.0;
  CHECK_THROWS_AS(validate(bad), ValidationError);
  bad = cfg;
  bad.remainder.inner = 4.0;
  CHECK_THROWS_AS(validate(bad), ValidationError);

  ExtractConfig besov;
  besov.input = {SpaceMode::besov, 4.0, 2.0, 2.0};
  besov.remainder = {8.0, 8.0};
  CHECK_NOTHROW(validate(besov));
  besov.remainder = {8.0, 7.9};
  CHECK_THROWS_AS(validate(besov), ValidationError);
  besov.remainder = {kInf, 100.0};
  CHECK_THROWS_AS(validate(besov), ValidationError);
  besov.remainder = {kInf, kInf};
  CHECK_NOTHROW(validate(besov));
}

TEST_CASE("extraction input errors") {
  const auto cfg = small_config();
  CHECK_THROWS_AS(extract_profiles(std::vector<CoeffField>{}, cfg), ValidationError);
  std::vector<CoeffField> mixed(4, single(at(0, 0), 1.0));
  mixed[2] = single(at(0, 0), 1.0, 3.0);
  CHECK_THROWS_AS(extract_profiles(mixed, cfg), ValidationError);
  std::vector<CoeffField> offlattice(4, single(at(0, 0), 1.0));
  offlattice[1] = single({1, 0, DyadicVec({1}, 1)}, 1.0);
  CHECK_THROWS_AS(extract_profiles(offlattice, cfg), ValidationError);
  std::vector<CoeffField> shorter(3, single(at(0, 0), 1.0));
  CHECK_THROWS_AS(extract_profiles(shorter, cfg), ValidationError);
}

TEST_CASE("constant sequence is its own profile") {
  const auto u = single(at(0, 0), 1.0);
  const std::vector<CoeffField> seq(6, u);
  const auto dec = extract_profiles(seq, small_config());
  REQUIRE(dec.groups.size() == 1);
  const auto& g = dec.groups[0];
  CHECK(g.profile == u);
  for (const auto& [n, a] : g.anchors) CHECK(a == aff(0, 0));
  for (std::size_t n = 0; n < 6; ++n) {
    CHECK(remainder(dec, 1, n).empty());
    CHECK(reconstruct(dec, 1, n) == u);
    CHECK(reconstruct(dec, 0, n).empty());
    CHECK(remainder(dec, 0, n) == u);
  }
  CHECK_THROWS_AS(reconstruct(dec, 2, 0), ValidationError);
  CHECK_THROWS_AS(reconstruct(dec, 1, 6), ValidationError);

  const auto rep = verify(dec, small_config());
  CHECK(rep.gaps.empty());
  CHECK(rep.gaps_pass);
  CHECK(rep.stability_profile_sum == doctest::Approx(rep.stability_tail_min).epsilon(1e-15));
  CHECK(rep.stability_pass);
  CHECK(rep.max_remainder_margin == 0.0);
  CHECK(rep.reconstruction_exact);
}

TEST_CASE("two bumps drifting apart") {
  SyntheticSpec spec;
  spec.p = 4.0;
  spec.n_count = 8;
  spec.profiles = {profile({{at(0, 0), 1.0}}, constant_law()), profile({{at(0, 0), 0.5}}, translation(8))};
  const auto syn = generate(spec);
  auto cfg = small_config();
  const auto dec = extract_profiles(syn.sequence, cfg);
  REQUIRE(dec.groups.size() == 2);
  for (std::size_t n = 0; n < 8; ++n) {
    CHECK(orthogonality_gap(dec.groups[0].anchors.at(n), dec.groups[1].anchors.at(n)) == 8.0 * (n + 1));
    CHECK(remainder(dec, 2, n).empty());
    CHECK(reconstruct(dec, 2, n) == syn.sequence[n]);
  }
  const auto rep = verify(dec, cfg);
  REQUIRE(rep.gaps.size() == 1);
  CHECK(rep.gaps[0].strictly_increasing_tail);
  CHECK(rep.gaps[0].pass);
  CHECK(rep.stability_pass);
  for (const auto& c : rep.cross)
    for (double v : c.values) CHECK(v == 0.0);
  CHECK(separation_index(dec, 0, 1) == std::optional<std::size_t>(0));
}

TEST_CASE("a bounded relative map makes a multi-member group") {
  SyntheticSpec spec;
  spec.n_count = 8;
  spec.profiles = {profile({{at(0, 0), 1.0}, {at(1, 1), 0.5}}, translation(3))};
  const auto syn = generate(spec);
  const auto dec = extract_profiles(syn.sequence, small_config());
  REQUIRE(dec.groups.size() == 1);
  const auto& members = dec.groups[0].members;
  REQUIRE(members.size() == 2);
  CHECK(members[0].relative.is_identity());
  CHECK(members[1].relative == aff(1, 1));
  CHECK(members[0].rank < members[1].rank);
  CHECK(dec.steps.at(1).attach == "member");
  CHECK(align_frames(dec, syn.truth).perfect);
}

TEST_CASE("scale divergence and nested supports") {
  SyntheticSpec spec;
  spec.n_count = 10;
  spec.profiles = {profile({{at(0, 0), 1.0}}, constant_law()), profile({{at(0, 0), 0.6}}, scaling(1))};
  const auto syn = generate(spec);
  const auto dec = extract_profiles(syn.sequence, small_config());
  REQUIRE(dec.groups.size() == 2);
  CHECK_FALSE(separation_index(dec, 0, 1).has_value());
  // The cross term never vanishes but decays like 2^{-n/2}.
  for (std::size_t n = 0; n < 10; ++n) {
    const double expected = 0.6 * 0.6 * std::exp2(-(static_cast<double>(n) + 1) / 2.0);
    CHECK(cross_interaction(dec, 0, 1, n) == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(verify(dec, small_config()).stability_pass);
}

TEST_CASE("cross interaction conventions") {
  SyntheticSpec spec;
  spec.p = 2.0;
  spec.n_count = 6;
  spec.profiles = {profile({{at(0, 0), 1.0}}, constant_law(), 2.0), profile({{at(0, 0), 0.5}}, scaling(1), 2.0)};
  auto cfg = small_config();
  cfg.input.p = 2.0;
  cfg.remainder = {4.0, 4.0};
  const auto dec = extract_profiles(generate(spec).sequence, cfg);
  CHECK(cross_interaction(dec, 0, 1, 3) == 0.0);
  CHECK_THROWS_AS(cross_interaction(dec, 1, 1, 3), ValidationError);
}

TEST_CASE("noise is left in the remainder") {
  SyntheticSpec spec;
  spec.n_count = 10;
  spec.seed = 5;
  spec.profiles = {profile({{at(0, 0), 1.0}}, constant_law()), profile({{at(0, 0), 0.5}}, translation(-8))};
  spec.noise = NoiseSpec{1e-4, 4, -2, 2, 4};
  const auto syn = generate(spec);
  auto cfg = small_config();
  cfg.stop_epsilon = 1e-4;
  const auto dec = extract_profiles(syn.sequence, cfg);
  REQUIRE(dec.groups.size() == 2);
  for (auto n : dec.retained) CHECK(remainder(dec, 2, n) == syn.noise[n]);
  const auto rep = verify(dec, cfg);
  CHECK(rep.stability_pass);
  CHECK(rep.remainder_nonincreasing);
  CHECK(rep.max_remainder_margin == 0.0);
}

TEST_CASE("extraction never raises the residual sup and keeps amplitudes ordered") {
  SyntheticSpec spec;
  spec.n_count = 12;
  spec.profiles = {profile({{at(0, 0), 1.0}, {at(2, 1), -0.3}}, constant_law()),
                   profile({{at(0, 0), 0.7}}, translation(16)), profile({{at(0, 0), -0.45}}, scaling(1))};
  const auto syn = generate(spec);
  const auto dec = extract_profiles(syn.sequence, small_config());
  CHECK(dec.groups.size() == 3);
  for (auto n : dec.retained) {
    double prev = kInf;
    auto residual = syn.sequence[n];
    for (const auto& step : dec.steps) {
      const auto& pick = step.picks.at(n);
      CHECK(std::fabs(pick.amplitude) <= prev);
      prev = std::fabs(pick.amplitude);
      const double before = sup_tilde(residual);
      residual.erase(pick.index);
      CHECK(sup_tilde(residual) <= before);
    }
  }
  const auto rep = verify(dec, small_config());
  CHECK(rep.amplitude_p_ratio <= 1.0 + 1e-12);
  CHECK(rep.remainder_nonincreasing);
}

TEST_CASE("oscillating relative parameters open a new group with a diagnostic") {
  std::vector<CoeffField> seq;
  for (std::int64_t n = 0; n < 8; ++n) {
    CoeffField u(1, 4.0);
    u.insert(at(0, 0), 1.0);
    u.insert(at(0, n % 2 == 0 ? 2 : 6), 0.5);
    seq.push_back(u);
  }
  const auto dec = extract_profiles(seq, small_config());
  REQUIRE(dec.steps.size() >= 2);
  CHECK(dec.steps[1].attach == "new-oscillating");
  bool flagged = false;
  for (const auto& d : dec.diagnostics) flagged = flagged || d.kind == "oscillating-relative-map";
  CHECK(flagged);
}

TEST_CASE("non-convergent amplitudes are flagged") {
  std::vector<CoeffField> seq;
  for (int n = 0; n < 6; ++n) seq.push_back(single(at(0, 0), 1.0 + 0.01 * n));
  const auto dec = extract_profiles(seq, small_config());
  REQUIRE_FALSE(dec.diagnostics.empty());
  CHECK(dec.diagnostics[0].kind == "non-convergent-amplitude");
  CHECK(dec.groups[0].members[0].spread == doctest::Approx(0.03));
  // the tail mean is the extracted amplitude; reconstruction identity still exact
  CHECK(verify(dec, small_config()).reconstruction_exact);
}

TEST_CASE("generator changes prune the subsequence") {
  std::vector<CoeffField> seq;
  for (int n = 0; n < 8; ++n) {
    CoeffField u(2, 4.0);
    u.insert({n == 1 ? 2 : 1, 0, DyadicVec({0, 0})}, 1.0);
    seq.push_back(u);
  }
  const auto dec = extract_profiles(seq, small_config());
  CHECK_FALSE(dec.is_retained(1));
  CHECK(dec.retained.size() == 7);
  REQUIRE(dec.groups.size() == 1);
  CHECK(dec.groups[0].anchors.size() == 7);
}

TEST_CASE("max_iterations stops with a diagnostic") {
  CoeffField u(1, 4.0);
  for (int k = 0; k < 5; ++k) u.insert(at(0, k), 1.0 - 0.1 * k);
  auto cfg = small_config();
  cfg.max_iterations = 2;
  const auto dec = extract_profiles(std::vector<CoeffField>(5, u), cfg);
  CHECK(dec.steps.size() == 2);
  CHECK(dec.stop_reason == "max_iterations reached");
}

TEST_CASE("besov input mode") {
  SyntheticSpec spec;
  spec.n_count = 8;
  spec.profiles = {profile({{at(0, 0), 1.0}, {at(1, 0), 0.4}}, constant_law()), profile({{at(0, 0), 0.8}}, translation(8))};
  const auto syn = generate(spec);
  ExtractConfig cfg = small_config();
  cfg.input = {SpaceMode::besov, 4.0, 2.0, 3.0};
  cfg.remainder = {8.0, 12.0};
  const auto dec = extract_profiles(syn.sequence, cfg);
  const auto rep = verify(dec, cfg);
  CHECK(rep.stability_pass);
  // ℓ^3 aggregation of the profile norms
  double agg = 0;
  for (const auto& g : dec.groups) agg += std::pow(input_norm(g.profile, cfg), 3.0);
  CHECK(rep.stability_profile_sum == doctest::Approx(std::cbrt(agg)));
}

TEST_CASE("verification is deterministic") {
  SyntheticSpec spec;
  spec.n_count = 9;
  spec.seed = 3;
  spec.profiles = {profile({{at(0, 0), 1.0}}, constant_law()), profile({{at(0, 0), 0.5}}, scaling(-1))};
  spec.noise = NoiseSpec{1e-3, 3};
  const auto syn = generate(spec);
  auto cfg = small_config();
  cfg.stop_epsilon = 1e-3;
  const auto a = extract_profiles(syn.sequence, cfg);
  const auto b = extract_profiles(syn.sequence, cfg);
  CHECK(a == b);
  CHECK(verify(a, cfg) == verify(b, cfg));
}
