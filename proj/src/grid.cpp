#include "lqed/grid.hpp"

#include <stdexcept>
#include <string>

namespace lqed {

namespace {

int mod(int value, int side) { return ((value % side) + side) % side; }

std::size_t block_entries(const BlockPartition& layout, BlockCoord b) {
  return layout.extent(b.row) * layout.extent(b.col);
}

void require_layout_matches(const GridConfig& grid, const BlockPartition& layout) {
  if (layout.grid_side() != grid.side()) {
    throw std::invalid_argument("partition has grid side " + std::to_string(layout.grid_side()) +
                                ", grid has " + std::to_string(grid.side()));
  }
}

}  // namespace

GridConfig::GridConfig(int side) : side_(side) {
  if (side < 1) throw std::invalid_argument("grid side must be >= 1, got " + std::to_string(side));
}

GridCoord GridConfig::wrap(int row, int col) const { return {mod(row, side_), mod(col, side_)}; }

const char* comm_kind_name(CommKind kind) {
  switch (kind) {
    case CommKind::align_a: return "align_a";
    case CommKind::align_b: return "align_b";
    case CommKind::shift_a: return "shift_a";
    case CommKind::shift_b: return "shift_b";
    case CommKind::point: return "point";
  }
  return "unknown";
}

GridCoord align_destination_a(GridCoord home, int side) {
  return {home.row, mod(home.col - home.row, side)};
}

GridCoord align_destination_b(GridCoord home, int side) {
  return {mod(home.row - home.col, side), home.col};
}

GridCoord shift_destination(ShiftDirection dir, GridCoord at, int side) {
  if (dir == ShiftDirection::left) return {at.row, mod(at.col - 1, side)};
  return {mod(at.row - 1, side), at.col};
}

GridCoord shift_source(ShiftDirection dir, GridCoord at, int side) {
  if (dir == ShiftDirection::left) return {at.row, mod(at.col + 1, side)};
  return {mod(at.row + 1, side), at.col};
}

Placement::Placement(GridConfig grid, std::vector<BlockCoord> held)
    : grid_(grid), held_(std::move(held)) {
  const auto p = static_cast<std::size_t>(grid_.worker_count());
  if (held_.size() != p) {
    throw std::invalid_argument("placement lists " + std::to_string(held_.size()) +
                                " blocks for " + std::to_string(p) + " processors");
  }
  std::vector<bool> seen(p, false);
  for (const auto& b : held_) {
    if (b.row < 0 || b.col < 0 || b.row >= grid_.side() || b.col >= grid_.side()) {
      throw std::invalid_argument("placement holds a block outside the grid");
    }
    const auto slot = static_cast<std::size_t>(grid_.rank_of(b));
    if (seen[slot]) {
      throw std::invalid_argument("block (" + std::to_string(b.row) + "," + std::to_string(b.col) +
                                  ") placed twice; another block is missing");
    }
    seen[slot] = true;
  }
}

Placement Placement::home(GridConfig grid) {
  std::vector<BlockCoord> held;
  held.reserve(static_cast<std::size_t>(grid.worker_count()));
  for (int r = 0; r < grid.worker_count(); ++r) held.push_back(grid.coord_of(r));
  return {grid, std::move(held)};
}

GridCoord Placement::where(BlockCoord block) const {
  for (std::size_t r = 0; r < held_.size(); ++r) {
    if (held_[r] == block) return grid_.coord_of(static_cast<int>(r));
  }
  throw std::invalid_argument("block not on the grid");
}

bool Placement::is_home() const { return *this == home(grid_); }

AlignedPlacements initial_align(const Placement& a, const Placement& b, const BlockPartition& layout) {
  if (!(a.grid() == b.grid())) throw std::invalid_argument("initial_align: grids differ");
  require_layout_matches(a.grid(), layout);
  if (!a.is_home() || !b.is_home()) {
    throw std::invalid_argument("initial_align: blocks must start at their home processors");
  }
  const GridConfig& grid = a.grid();
  const int side = grid.side();
  std::vector<BlockCoord> a_held(static_cast<std::size_t>(grid.worker_count()));
  std::vector<BlockCoord> b_held(a_held.size());
  std::vector<CommEvent> events;
  for (int rank = 0; rank < grid.worker_count(); ++rank) {
    const GridCoord here = grid.coord_of(rank);
    const GridCoord a_dst = align_destination_a(here, side);
    a_held[static_cast<std::size_t>(grid.rank_of(a_dst))] = a.at(here);
    if (!(a_dst == here)) {
      events.push_back({rank, grid.rank_of(a_dst), CommKind::align_a, block_entries(layout, a.at(here))});
    }
  }
  for (int rank = 0; rank < grid.worker_count(); ++rank) {
    const GridCoord here = grid.coord_of(rank);
    const GridCoord b_dst = align_destination_b(here, side);
    b_held[static_cast<std::size_t>(grid.rank_of(b_dst))] = b.at(here);
    if (!(b_dst == here)) {
      events.push_back({rank, grid.rank_of(b_dst), CommKind::align_b, block_entries(layout, b.at(here))});
    }
  }
  return {Placement(grid, std::move(a_held)), Placement(grid, std::move(b_held)), std::move(events)};
}

ShiftedPlacement cyclic_shift(ShiftDirection dir, const Placement& blocks, const BlockPartition& layout) {
  const GridConfig& grid = blocks.grid();
  require_layout_matches(grid, layout);
  const CommKind kind = dir == ShiftDirection::left ? CommKind::shift_a : CommKind::shift_b;
  std::vector<BlockCoord> held(static_cast<std::size_t>(grid.worker_count()));
  std::vector<CommEvent> events;
  for (int rank = 0; rank < grid.worker_count(); ++rank) {
    const GridCoord here = grid.coord_of(rank);
    const GridCoord dst = shift_destination(dir, here, grid.side());
    held[static_cast<std::size_t>(grid.rank_of(dst))] = blocks.at(here);
    if (!(dst == here)) {
      events.push_back({rank, grid.rank_of(dst), kind, block_entries(layout, blocks.at(here))});
    }
  }
  return {Placement(grid, std::move(held)), std::move(events)};
}

PointRoute point_transfer_route(const BlockPartition& layout, DiagonalIndex src, DiagonalIndex dst) {
  if (src.row != src.col || dst.row != dst.col) {
    throw std::invalid_argument("point transfers connect diagonal elements only");
  }
  const int side = layout.grid_side();
  const int s = layout.block_of(src.row);
  const int d = layout.block_of(dst.row);
  return {s * side + s, d * side + d};
}

}  // namespace lqed
