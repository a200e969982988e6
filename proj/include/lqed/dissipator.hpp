#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lqed/distributed_matrix.hpp"
#include "lqed/processor_grid.hpp"
#include "lqed/tcm_model.hpp"

namespace lqed {

/// A channel with its rates already multiplied by the time step.
struct ScaledChannel {
  std::size_t source = 0;
  std::size_t target = 0;
  double forward = 0.0;  ///< gamma * dt
  double reverse = 0.0;  ///< gamma' * dt
};

/// Precomputed per-processor work for one dissipator step. Each processor
/// gets the segments of rows/columns i and j it owns plus the point transfers
/// touching its diagonal block, so the step itself needs no index search.
class ChannelUpdatePlan {
 public:
  struct LineUpdate {
    std::size_t local = 0;  ///< local row (or column) inside the block
    double factor = 0.0;    ///< subtracted fraction of the snapshot value
  };
  struct LocalGain {
    std::size_t src_local = 0;
    std::size_t dst_local = 0;
    double factor = 0.0;
  };
  struct PointSend {
    std::size_t src_local = 0;
    int dst_rank = 0;
  };
  struct PointReceive {
    int src_rank = 0;
    std::size_t dst_local = 0;
    double factor = 0.0;
  };
  struct ProcessorWork {
    std::vector<LineUpdate> rows;
    std::vector<LineUpdate> cols;
    std::vector<LocalGain> gains;
    std::vector<PointSend> sends;
    std::vector<PointReceive> receives;
  };

  /// Validates every channel: source != target, indices in range,
  /// 0 <= gamma' dt < gamma dt < 1 (or both rates zero).
  ChannelUpdatePlan(std::span<const Channel> channels, double dt, const BlockPartition& layout);

  const BlockPartition& layout() const { return layout_; }
  std::span<const ScaledChannel> channels() const { return channels_; }
  const ProcessorWork& work(int rank) const { return work_[static_cast<std::size_t>(rank)]; }

 private:
  BlockPartition layout_;
  std::vector<ScaledChannel> channels_;
  std::vector<ProcessorWork> work_;
};

/// One Euler step of every channel, all reading the same snapshot of rho:
/// point transfers between diagonals (the only communication), then local
/// row and column decay on each owning processor.
void apply_all_channels(DistributedMatrix& rho, const ChannelUpdatePlan& plan, ProcessorGrid& grid);

/// Single-channel form of apply_all_channels.
void apply_channel(DistributedMatrix& rho, const Channel& channel, double dt, ProcessorGrid& grid);

/// Scalar multiply/add count of the point/row/column update: M (4N + 2).
std::uint64_t count_flops(std::size_t channel_count, std::size_t dim);
std::uint64_t count_flops(const ChannelUpdatePlan& plan);

}  // namespace lqed
