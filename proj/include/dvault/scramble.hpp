#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "dvault/errors.hpp"

namespace dvault {

inline constexpr std::uint32_t kBlockOrder = 8;
inline constexpr int kPatternCount = 16;

/// One of the 16 scrambling patterns: 0..7 are magic-square variants,
/// 8..15 are zigzag variants.
struct PatternId {
  std::uint8_t id = 0;
};

inline void check_pattern(PatternId pattern) {
  if (pattern.id >= kPatternCount)
    throw InvalidArgument("pattern id " + std::to_string(pattern.id) +
                          " out of range 0..15");
}

/// Order-n grid holding a permutation of 1..n^2 whose rows, columns and main
/// diagonals all sum to n(n^2+1)/2.
struct MagicGrid {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> cells;  // raster order

  std::uint32_t magic_constant() const { return n * (n * n + 1) / 2; }
  std::uint32_t at(std::uint32_t r, std::uint32_t c) const {
    return cells[r * n + c];
  }
};

/// Doubly-even construction: fill 1..n^2 raster-wise, keep the value where
/// the cell lies on either diagonal of its 4x4 sub-block, replace it with
/// n^2+1-v elsewhere.
inline MagicGrid magic_square(std::uint32_t n) {
  if (n < 4 || n % 4 != 0)
    throw OrderNotDoublyEven("order " + std::to_string(n) +
                             " is not divisible by 4");
  MagicGrid grid{n, std::vector<std::uint32_t>(n * n)};
  const std::uint32_t top = n * n + 1;
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t c = 0; c < n; ++c) {
      const std::uint32_t v = r * n + c + 1;
      const std::uint32_t br = r % 4, bc = c % 4;
      const bool on_subblock_diagonal = (br == bc) || (br + bc == 3);
      grid.cells[r * n + c] = on_subblock_diagonal ? v : top - v;
    }
  }
  return grid;
}

/// The k-th element (k in 0..7) of the dihedral orbit of a grid: k quarter
/// turns clockwise for k in 0..3, transpose followed by k-4 quarter turns for
/// k in 4..7. Every element keeps the magic property.
inline MagicGrid magic_variant(const MagicGrid& base, int k) {
  if (k < 0 || k > 7) throw InvalidArgument("variant index must be 0..7");
  const std::uint32_t n = base.n;
  MagicGrid out{n, std::vector<std::uint32_t>(n * n)};
  for (std::uint32_t r = 0; r < n; ++r) {
    for (std::uint32_t c = 0; c < n; ++c) {
      std::uint32_t sr = r, sc = c;
      // invert the k rotations: a clockwise turn maps (r,c) <- (n-1-c, r)
      for (int t = 0; t < (k & 3); ++t) {
        const std::uint32_t nr = n - 1 - sc, nc = sr;
        sr = nr;
        sc = nc;
      }
      if (k >= 4) std::swap(sr, sc);
      out.cells[r * n + c] = base.at(sr, sc);
    }
  }
  return out;
}

/// Visit order of an anti-diagonal boustrophedon traversal. variant encodes
/// (start corner, first step): bit 0 selects column-first (transposed walk),
/// bits 1..2 the corner (0 TL, 1 TR, 2 BL, 3 BR). Variant 0 is the classic
/// JPEG zigzag.
struct ZigzagOrder {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> visit;  // raster indices in visit order
};

inline ZigzagOrder zigzag_order(std::uint32_t n, int variant) {
  if (n == 0) throw InvalidArgument("zigzag order needs n >= 1");
  if (variant < 0 || variant > 7)
    throw InvalidArgument("variant index must be 0..7");
  ZigzagOrder order{n, {}};
  order.visit.reserve(n * n);

  const int corner = variant >> 1;
  const bool column_first = variant & 1;

  // standard top-left, row-first walk
  std::uint32_t r = 0, c = 0;
  bool up = true;
  for (std::uint32_t k = 0; k < n * n; ++k) {
    std::uint32_t vr = r, vc = c;
    if (column_first) std::swap(vr, vc);
    if (corner & 1) vc = n - 1 - vc;
    if (corner & 2) vr = n - 1 - vr;
    order.visit.push_back(vr * n + vc);

    if (up) {
      if (c == n - 1) { ++r; up = false; }
      else if (r == 0) { ++c; up = false; }
      else { --r; ++c; }
    } else {
      if (r == n - 1) { ++c; up = true; }
      else if (c == 0) { ++r; up = true; }
      else { ++r; --c; }
    }
  }
  return order;
}

/// A bijection on the cells of one n x n block, stored with its inverse.
/// Convention: scrambled output cell i takes input cell perm[i] (gather).
struct BlockPermutation {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> perm;
  std::vector<std::uint32_t> inv;
};

/// Permutation for a pattern id. Magic ids 0..7 rank cells by the grid value
/// (perm[i] = cells[i]-1); zigzag ids 8..15 read the input in visit order and
/// write raster-wise (perm[k] = visit[k]).
inline BlockPermutation pattern_permutation(PatternId pattern,
                                            std::uint32_t n = kBlockOrder) {
  check_pattern(pattern);
  BlockPermutation block{n, {}, std::vector<std::uint32_t>(n * n)};
  if (pattern.id < 8) {
    const MagicGrid grid = magic_variant(magic_square(n), pattern.id);
    block.perm.reserve(n * n);
    for (std::uint32_t v : grid.cells) block.perm.push_back(v - 1);
  } else {
    block.perm = zigzag_order(n, pattern.id - 8).visit;
  }
  for (std::uint32_t i = 0; i < n * n; ++i) block.inv[block.perm[i]] = i;
  return block;
}

namespace detail {
inline const BlockPermutation& cached_pattern(PatternId pattern) {
  check_pattern(pattern);
  static const auto table = [] {
    std::array<BlockPermutation, kPatternCount> t;
    for (int id = 0; id < kPatternCount; ++id)
      t[id] = pattern_permutation(PatternId{std::uint8_t(id)});
    return t;
  }();
  return table[pattern.id];
}

template <typename T>
std::vector<T> permute_blocks(std::span<const T> cells, std::uint32_t width,
                              std::uint32_t height,
                              const std::vector<std::uint32_t>& perm) {
  if (cells.size() != std::uint64_t(width) * height)
    throw DimensionMismatch("cell count does not match dimensions");
  std::vector<T> out(cells.begin(), cells.end());
  const std::uint32_t b = kBlockOrder;
  for (std::uint32_t by = 0; by + b <= height; by += b) {
    for (std::uint32_t bx = 0; bx + b <= width; bx += b) {
      for (std::uint32_t i = 0; i < b * b; ++i) {
        const std::uint32_t src = perm[i];
        out[(by + i / b) * width + bx + i % b] =
            cells[(by + src / b) * width + bx + src % b];
      }
    }
  }
  return out;
}
}  // namespace detail

/// Permute each aligned 8x8 block by the pattern. Cells in partial edge
/// blocks stay in place; the multiset of cell values is preserved.
template <typename T>
std::vector<T> scramble_cells(std::span<const T> cells, std::uint32_t width,
                              std::uint32_t height, PatternId pattern) {
  return detail::permute_blocks(cells, width, height,
                                detail::cached_pattern(pattern).perm);
}

/// Exact inverse of scramble_cells.
template <typename T>
std::vector<T> descramble_cells(std::span<const T> cells, std::uint32_t width,
                                std::uint32_t height, PatternId pattern) {
  return detail::permute_blocks(cells, width, height,
                                detail::cached_pattern(pattern).inv);
}

}  // namespace dvault
