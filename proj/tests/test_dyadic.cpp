#include <doctest.h>

#include <stdexcept>

#include "profdec/dyadic.hpp"
#include "profdec/errors.hpp"
#include "support/oracles.hpp"

using namespace profdec;

namespace {

DyadicVec v1(std::int64_t k, std::int64_t e = 0) { return DyadicVec({k}, e); }
DyadicAffine aff(std::int64_t j, std::int64_t k, std::int64_t e = 0) { return {j, v1(k, e)}; }
WaveletIndex idx1(int i, std::int64_t j, std::int64_t k) { return {i, j, v1(k)}; }

}  // namespace

TEST_CASE("dyadic vectors are normalized") {
  CHECK(DyadicVec({2, 4}, 1) == DyadicVec({1, 2}, 0));
  CHECK(DyadicVec({6}, 2).denom_exp() == 1);
  CHECK(DyadicVec({0, 0}, 5).denom_exp() == 0);
  CHECK(DyadicVec({1}, 3).scaled_pow2(3) == v1(1));
  CHECK(v1(1, 1) + v1(1, 1) == v1(1));
  CHECK(v1(3, 2) - v1(1, 1) == v1(1, 2));
  CHECK(v1(1, 1) < v1(1));
  CHECK(compare_at(DyadicVec({1, 5}, 1), DyadicVec({1, 3}, 0), 1) == std::strong_ordering::less);
}

TEST_CASE("overflow is reported, not wrapped") {
  const DyadicVec big({std::int64_t{1} << 62});
  CHECK_THROWS_AS(big.scaled_pow2(2), std::overflow_error);
  CHECK_THROWS_AS(big + big, std::overflow_error);
  CHECK_NOTHROW(big.scaled_pow2(-62));
}

TEST_CASE("cube_of examples") {
  auto c = cube_of(idx1(1, 0, 0));
  CHECK(c.lower() == v1(0));
  CHECK(c.upper() == v1(1));
  CHECK(c.volume() == 1.0);

  c = cube_of(idx1(1, 1, 0));
  CHECK(c.upper() == v1(1, 1));
  CHECK(c.volume() == 0.5);

  c = cube_of(idx1(1, -1, 3));
  CHECK(c.lower() == v1(6));
  CHECK(c.upper() == v1(8));
  CHECK(c.volume() == 2.0);

  const DyadicCube square{2, DyadicVec({1, 3})};
  CHECK(square.volume() == 1.0 / 16.0);
}

TEST_CASE("containment and overlap") {
  const auto c = cube_of(idx1(1, -1, 3));
  CHECK(contains(c, v1(6)));
  CHECK(contains(c, v1(15, 1)));
  CHECK_FALSE(contains(c, v1(8)));
  CHECK(overlaps(c, cube_of(idx1(1, 0, 7))));
  CHECK_FALSE(overlaps(c, cube_of(idx1(1, 0, 8))));
  CHECK_FALSE(overlaps(cube_of(idx1(1, 0, 0)), cube_of(idx1(1, 0, 1))));
}

TEST_CASE("compose, invert and magnitude examples") {
  const auto id = DyadicAffine::identity(1);
  const auto t = aff(1, 1);
  CHECK(compose(id, t) == t);
  CHECK(compose(aff(1, 0), aff(1, 1)) == aff(2, 1));
  CHECK(compose(t, invert(t)).is_identity());
  CHECK(invert(id) == id);
  CHECK(invert(t) == aff(-1, -1, 1));
  CHECK(invert(invert(t)) == t);

  CHECK(magnitude(id) == 0.0);
  CHECK(magnitude(aff(2, 4)) == 3.0);
  CHECK(magnitude({0, DyadicVec({3, 4})}) == 5.0);
}

TEST_CASE("act_on_index examples") {
  const auto lam = idx1(1, 0, 0);
  CHECK(act_on_index(DyadicAffine::identity(1), lam) == lam);
  CHECK(act_on_index(aff(1, 1), lam) == idx1(1, 1, 1));
  CHECK(act_on_index(aff(-1, 1), idx1(1, 2, 0)) == idx1(1, 1, 4));
}

TEST_CASE("orthogonality_gap examples") {
  CHECK(orthogonality_gap(aff(3, 5), aff(3, 5)) == 0.0);
  CHECK(orthogonality_gap(aff(0, 0), aff(0, 24)) == 24.0);
  CHECK(orthogonality_gap(aff(0, 0), aff(5, 0)) == 5.0);
  // Relative scales far beyond the 64-bit shift range still give a real gap.
  CHECK(orthogonality_gap(aff(100, 0), aff(0, 3)) == doctest::Approx(100.0 + 3.0 * std::pow(2.0, 100.0)));
}

TEST_CASE("check_index rejects bad generators") {
  CHECK_NOTHROW(check_index({3, 0, DyadicVec::zeros(2)}, 2));
  CHECK_THROWS_AS(check_index({4, 0, DyadicVec::zeros(2)}, 2), ValidationError);
  CHECK_THROWS_AS(check_index({0, 0, DyadicVec::zeros(1)}, 1), ValidationError);
  CHECK_THROWS_AS(check_index({1, 0, DyadicVec::zeros(2)}, 1), ValidationError);
}

TEST_CASE("group laws hold exactly on random maps") {
  oracle::Gen g(11);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 3));
    const auto a = oracle::random_affine(g, d, 6, 20, 4);
    const auto b = oracle::random_affine(g, d, 6, 20, 4);
    const auto c = oracle::random_affine(g, d, 6, 20, 4);
    const auto id = DyadicAffine::identity(d);
    CHECK(compose(compose(a, b), c) == compose(a, compose(b, c)));
    CHECK(compose(a, id) == a);
    CHECK(compose(id, a) == a);
    CHECK(compose(a, invert(a)) == id);
    CHECK(compose(invert(a), a) == id);
    CHECK(invert(invert(a)) == a);
    CHECK((magnitude(a) == 0.0) == a.is_identity());
    CHECK(orthogonality_gap(a, b) == doctest::Approx(magnitude(relative_map(a, b))).epsilon(1e-12));
    CHECK(compose(a, relative_map(a, b)) == b);

    const WaveletIndex lam{static_cast<int>(g.integer(1, (1 << d) - 1)), g.integer(-5, 5),
                           oracle::random_vec(g, d, 10, 3)};
    // The action composes in the order matching transform functoriality.
    CHECK(act_on_index(compose(a, b), lam) == act_on_index(a, act_on_index(b, lam)));
  }
}

TEST_CASE("act_on_index is the preimage of the cube under tau") {
  oracle::Gen g(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t d = static_cast<std::size_t>(g.integer(1, 2));
    const auto t = oracle::random_affine(g, d, 4, 8, 2);
    const WaveletIndex lam{1, g.integer(-3, 3), oracle::random_vec(g, d, 4, 1)};
    const auto moved = cube_of(act_on_index(t, lam));
    const auto orig = cube_of(lam);
    for (int s = 0; s < 100; ++s) {
      const auto x = oracle::random_vec(g, d, 64, 10);
      CHECK(contains(moved, x) == contains(orig, apply(t, x)));
    }
  }
}

TEST_CASE("gap diverges iff the relative map magnitude diverges") {
  // translation, scale and mixed sequences against a fixed anchor
  for (std::int64_t n = 1; n < 30; ++n) {
    const auto anchor = aff(0, 0);
    const std::vector<DyadicAffine> seq{aff(0, 8 * n), aff(n, 0), aff(-n, 0), aff(n, 3 * n)};
    for (const auto& t : seq) {
      CHECK(orthogonality_gap(anchor, t) == doctest::Approx(magnitude(relative_map(anchor, t))));
      CHECK(orthogonality_gap(anchor, t) >= static_cast<double>(n));
    }
  }
  // a bounded relative map keeps both bounded
  for (std::int64_t n = 1; n < 30; ++n) {
    const auto anchor = aff(n, 5 * n);
    const auto t = compose(anchor, aff(1, 1));
    CHECK(relative_map(anchor, t) == aff(1, 1));
    CHECK(orthogonality_gap(anchor, t) == magnitude(aff(1, 1)));
  }
}
