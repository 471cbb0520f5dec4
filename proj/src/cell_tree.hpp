#pragma once

// Exact integration of piecewise-constant functions built from dyadic cubes.
//
// Cubes are inserted top-down into a 2^d-ary tree rooted at the coarsest
// scale present. A node fully inside a cube stores the cube's weight; a node
// straddling its boundary is split. Leaves therefore partition the union of
// all cubes into cells on which every channel is constant, and integrals
// reduce to Σ leaf_value · 2^{-d·level}.

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include "profdec/dyadic.hpp"

namespace profdec::detail {

class CellTree {
 public:
  static constexpr int kChannels = 2;
  using Wide = __int128;
  using Weights = std::array<double, kChannels>;

  CellTree(std::size_t dim, std::int64_t top_level) : dim_(dim), top_(top_level) {}

  void add(const DyadicCube& cube, int channel, double weight);

  /// Σ over leaves of leaf(weights) · volume(leaf).
  template <class Leaf>
  long double integrate(Leaf&& leaf) const {
    long double total = 0;
    for (const auto& [pos, node] : roots_) total += integrate_node(node, top_, Weights{}, leaf);
    return total;
  }

 private:
  struct Node {
    Weights w{};
    std::vector<Node> kids;
  };

  struct Box {
    std::int64_t level;     // resolution at which the cube is cell-aligned
    std::vector<Wide> lo;   // lower corner in cells of that resolution
    Wide width;             // side length in cells of that resolution
  };

  void insert(Node& node, std::int64_t level, const std::vector<Wide>& pos, const Box& box, int channel,
              double weight);

  template <class Leaf>
  long double integrate_node(const Node& node, std::int64_t level, Weights acc, Leaf& leaf) const {
    for (int c = 0; c < kChannels; ++c) acc[c] += node.w[c];
    if (node.kids.empty()) {
      const long double vol = std::ldexp(1.0L, static_cast<int>(-static_cast<std::int64_t>(dim_) * level));
      return static_cast<long double>(leaf(acc)) * vol;
    }
    long double total = 0;
    for (const auto& kid : node.kids) total += integrate_node(kid, level + 1, acc, leaf);
    return total;
  }

  std::size_t dim_;
  std::int64_t top_;
  std::map<std::vector<Wide>, Node> roots_;
};

}  // namespace profdec::detail
