#include "cell_tree.hpp"

#include <stdexcept>

#include "profdec/errors.hpp"

namespace profdec::detail {

namespace {

constexpr std::int64_t kMaxShift = 120;

CellTree::Wide pow2(std::int64_t s) {
  if (s < 0 || s > kMaxShift) throw std::overflow_error("cell tree: scale range too large for exact integration");
  return static_cast<CellTree::Wide>(1) << s;
}

CellTree::Wide floor_shift(CellTree::Wide x, std::int64_t s) {
  pow2(s);
  return x >> s;  // arithmetic shift == floor division
}

}  // namespace

void CellTree::add(const DyadicCube& cube, int channel, double weight) {
  if (cube.corner.dim() != dim_) throw ValidationError("cell tree: dimension mismatch");
  if (cube.scale < top_) throw InvariantError("cell tree: cube coarser than the tree root level");
  Box box;
  box.level = cube.scale + cube.corner.denom_exp();
  box.width = pow2(cube.corner.denom_exp());
  box.lo.assign(cube.corner.numerators().begin(), cube.corner.numerators().end());

  // Each axis touches at most two root cells since the cube is no larger than a root cell.
  const std::int64_t s0 = box.level - top_;
  std::vector<Wide> first(dim_), last(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    first[i] = floor_shift(box.lo[i], s0);
    last[i] = floor_shift(box.lo[i] + box.width - 1, s0);
  }
  std::vector<Wide> pos = first;
  while (true) {
    insert(roots_[pos], top_, pos, box, channel, weight);
    std::size_t i = 0;
    for (; i < dim_; ++i) {
      if (pos[i] < last[i]) {
        ++pos[i];
        break;
      }
      pos[i] = first[i];
    }
    if (i == dim_) break;
  }
}

void CellTree::insert(Node& node, std::int64_t level, const std::vector<Wide>& pos, const Box& box, int channel,
                      double weight) {
  const Wide cell = pow2(box.level - level);
  bool inside = true;
  for (std::size_t i = 0; i < dim_; ++i) {
    const Wide nlo = pos[i] * cell;
    const Wide nhi = nlo + cell;
    const Wide clo = box.lo[i];
    const Wide chi = clo + box.width;
    if (nhi <= clo || chi <= nlo) return;
    if (nlo < clo || chi < nhi) inside = false;
  }
  if (inside) {
    node.w[channel] += weight;
    return;
  }
  // Partial overlap only happens strictly above the cube's own resolution.
  if (level >= box.level) throw InvariantError("cell tree: partial overlap at cell resolution");
  const std::size_t fan = std::size_t{1} << dim_;
  if (node.kids.empty()) node.kids.resize(fan);
  std::vector<Wide> child(dim_);
  for (std::size_t c = 0; c < fan; ++c) {
    for (std::size_t i = 0; i < dim_; ++i) child[i] = 2 * pos[i] + static_cast<Wide>((c >> i) & 1U);
    insert(node.kids[c], level + 1, child, box, channel, weight);
  }
}

}  // namespace profdec::detail
