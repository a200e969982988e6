#pragma once

#include <vector>

#include "lqed/grid.hpp"
#include "lqed/matrix.hpp"

namespace lqed {

/// Square matrix split into grid_side x grid_side blocks, block (i, j) owned by
/// processor P_{i,j}. Inside a grid job a processor touches only its own block.
class DistributedMatrix {
 public:
  explicit DistributedMatrix(BlockPartition layout);

  static DistributedMatrix scatter(const ComplexMatrix& m, int grid_side);
  static DistributedMatrix identity(std::size_t dim, int grid_side);

  ComplexMatrix gather() const;

  const BlockPartition& layout() const { return layout_; }
  std::size_t dim() const { return layout_.global_dim(); }
  int grid_side() const { return layout_.grid_side(); }

  ComplexMatrix& block(int rank) { return blocks_[static_cast<std::size_t>(rank)]; }
  const ComplexMatrix& block(int rank) const { return blocks_[static_cast<std::size_t>(rank)]; }
  ComplexMatrix& block(GridCoord c) { return block(c.row * grid_side() + c.col); }
  const ComplexMatrix& block(GridCoord c) const { return block(c.row * grid_side() + c.col); }

 private:
  BlockPartition layout_;
  std::vector<ComplexMatrix> blocks_;
};

}  // namespace lqed
