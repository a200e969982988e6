#include "lqed/distributed_matrix.hpp"

namespace lqed {

DistributedMatrix::DistributedMatrix(BlockPartition layout) : layout_(std::move(layout)) {
  const int side = layout_.grid_side();
  blocks_.reserve(static_cast<std::size_t>(side * side));
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) blocks_.emplace_back(layout_.extent(r), layout_.extent(c));
}

DistributedMatrix DistributedMatrix::scatter(const ComplexMatrix& m, int grid_side) {
  DistributedMatrix out(BlockPartition(m.rows(), grid_side));
  for (auto& blk : partition(m, grid_side)) out.block(blk.coord) = std::move(blk.data);
  return out;
}

DistributedMatrix DistributedMatrix::identity(std::size_t dim, int grid_side) {
  DistributedMatrix out(BlockPartition(dim, grid_side));
  for (int d = 0; d < grid_side; ++d) {
    auto& blk = out.block(GridCoord{d, d});
    for (std::size_t i = 0; i < blk.rows(); ++i) blk(i, i) = 1.0;
  }
  return out;
}

ComplexMatrix DistributedMatrix::gather() const {
  std::vector<MatrixBlock> blocks;
  blocks.reserve(blocks_.size());
  const int side = grid_side();
  for (int r = 0; r < side * side; ++r) blocks.push_back({{r / side, r % side}, block(r)});
  return reassemble(blocks, layout_);
}

}  // namespace lqed
