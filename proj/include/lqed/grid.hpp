#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lqed/matrix.hpp"

namespace lqed {

/// Position of a logical processor P_{row,col}.
using GridCoord = BlockCoord;

/// Square p_x x p_x logical processor grid. Block (i, j) of every distributed
/// matrix is homed on P_{i,j}; ranks are row-major.
class GridConfig {
 public:
  explicit GridConfig(int side);

  int side() const { return side_; }
  int worker_count() const { return side_ * side_; }

  int rank_of(GridCoord c) const { return c.row * side_ + c.col; }
  GridCoord coord_of(int rank) const { return {rank / side_, rank % side_}; }
  /// Cyclic wrap of arbitrary (possibly negative) coordinates onto the torus.
  GridCoord wrap(int row, int col) const;

  bool operator==(const GridConfig&) const = default;

 private:
  int side_;
};

enum class ShiftDirection { left, up };

enum class CommKind { align_a, align_b, shift_a, shift_b, point };

const char* comm_kind_name(CommKind kind);

/// One point-to-point message between two distinct processors.
struct CommEvent {
  int src_rank = 0;
  int dst_rank = 0;
  CommKind kind = CommKind::point;
  std::size_t payload = 0;  ///< complex entries carried

  bool operator==(const CommEvent&) const = default;
};

// Cannon schedule arithmetic. Alignment moves A_{i,j} left by i and B_{i,j} up by j;
// each shift moves A one column left and B one row up, wrapping.
GridCoord align_destination_a(GridCoord home, int side);
GridCoord align_destination_b(GridCoord home, int side);
GridCoord shift_destination(ShiftDirection dir, GridCoord at, int side);
/// Inverse of shift_destination: where the block arriving at `at` comes from.
GridCoord shift_source(ShiftDirection dir, GridCoord at, int side);

/// Which block identity currently sits on each processor.
class Placement {
 public:
  /// held[rank] is the block on processor `rank`; every block must appear exactly once.
  Placement(GridConfig grid, std::vector<BlockCoord> held);
  static Placement home(GridConfig grid);

  const GridConfig& grid() const { return grid_; }
  const BlockCoord& at(GridCoord c) const { return held_[static_cast<std::size_t>(grid_.rank_of(c))]; }
  GridCoord where(BlockCoord block) const;
  bool is_home() const;

  bool operator==(const Placement&) const = default;

 private:
  GridConfig grid_;
  std::vector<BlockCoord> held_;
};

struct AlignedPlacements {
  Placement a;
  Placement b;
  std::vector<CommEvent> events;
};

struct ShiftedPlacement {
  Placement placement;
  std::vector<CommEvent> events;
};

/// Cannon's initial skew. Both inputs must be at home. Blocks that stay put log no event.
AlignedPlacements initial_align(const Placement& a, const Placement& b, const BlockPartition& layout);

/// One cyclic shift of every block; logs one event per block that changes processor.
ShiftedPlacement cyclic_shift(ShiftDirection dir, const Placement& blocks, const BlockPartition& layout);

/// Diagonal element (index, index) of a distributed matrix.
struct DiagonalIndex {
  std::size_t row = 0;
  std::size_t col = 0;
};

struct PointRoute {
  int src_rank = 0;
  int dst_rank = 0;
  bool crosses_processors() const { return src_rank != dst_rank; }
};

/// Owners of two diagonal elements; a transfer communicates iff they differ.
PointRoute point_transfer_route(const BlockPartition& layout, DiagonalIndex src, DiagonalIndex dst);

}  // namespace lqed
