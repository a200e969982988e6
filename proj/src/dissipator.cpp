#include "lqed/dissipator.hpp"

#include <stdexcept>
#include <string>

namespace lqed {

namespace {

constexpr int kTagPoint = 1000;

void validate(const Channel& ch, std::size_t index, double dt, std::size_t dim) {
  const std::string where = "channel " + std::to_string(index) + " (" + std::to_string(ch.source) + " -> " +
                            std::to_string(ch.target) + "): ";
  if (ch.source == ch.target) throw std::invalid_argument(where + "source equals target");
  if (ch.source >= dim || ch.target >= dim) {
    throw std::out_of_range(where + "index outside dimension " + std::to_string(dim));
  }
  const double fwd = ch.gamma * dt;
  const double rev = ch.gamma_prime * dt;
  if (!(fwd >= 0.0 && fwd < 1.0)) throw std::invalid_argument(where + "gamma*dt must lie in [0, 1)");
  if (!(rev >= 0.0)) throw std::invalid_argument(where + "gamma'*dt must be >= 0");
  if (rev > 0.0 && !(rev < fwd)) throw std::invalid_argument(where + "gamma'*dt must be below gamma*dt");
}

}  // namespace

ChannelUpdatePlan::ChannelUpdatePlan(std::span<const Channel> channels, double dt, const BlockPartition& layout)
    : layout_(layout) {
  if (!(dt > 0.0)) throw std::invalid_argument("ChannelUpdatePlan: dt must be > 0");
  const int side = layout_.grid_side();
  work_.resize(static_cast<std::size_t>(side * side));
  channels_.reserve(channels.size());

  auto add_line_updates = [&](std::size_t index, double factor) {
    const int blk = layout_.block_of(index);
    const std::size_t local = layout_.local_index(index);
    for (int other = 0; other < side; ++other) {
      work_[static_cast<std::size_t>(blk * side + other)].rows.push_back({local, factor});
      work_[static_cast<std::size_t>(other * side + blk)].cols.push_back({local, factor});
    }
  };
  auto add_point = [&](std::size_t from, std::size_t to, double factor) {
    const PointRoute route = point_transfer_route(layout_, {from, from}, {to, to});
    const std::size_t from_local = layout_.local_index(from);
    const std::size_t to_local = layout_.local_index(to);
    if (!route.crosses_processors()) {
      work_[static_cast<std::size_t>(route.src_rank)].gains.push_back({from_local, to_local, factor});
      return;
    }
    work_[static_cast<std::size_t>(route.src_rank)].sends.push_back({from_local, route.dst_rank});
    work_[static_cast<std::size_t>(route.dst_rank)].receives.push_back({route.src_rank, to_local, factor});
  };

  for (std::size_t k = 0; k < channels.size(); ++k) {
    const Channel& ch = channels[k];
    validate(ch, k, dt, layout_.global_dim());
    const ScaledChannel sc{ch.source, ch.target, ch.gamma * dt, ch.gamma_prime * dt};
    channels_.push_back(sc);
    if (sc.forward > 0.0) {
      add_point(sc.source, sc.target, sc.forward);
      add_line_updates(sc.source, 0.5 * sc.forward);
    }
    if (sc.reverse > 0.0) {
      add_point(sc.target, sc.source, sc.reverse);
      add_line_updates(sc.target, 0.5 * sc.reverse);
    }
  }
}

void apply_all_channels(DistributedMatrix& rho, const ChannelUpdatePlan& plan, ProcessorGrid& grid) {
  if (!(rho.layout() == plan.layout())) {
    throw DimensionMismatch("apply_all_channels: plan built for dim " + std::to_string(plan.layout().global_dim()) +
                            " on side " + std::to_string(plan.layout().grid_side()) + ", rho has dim " +
                            std::to_string(rho.dim()) + " on side " + std::to_string(rho.grid_side()));
  }
  if (rho.grid_side() != grid.config().side()) {
    throw std::invalid_argument("apply_all_channels: grid side does not match the partition");
  }

  grid.run(Phase::dissipator, [&](Processor& proc) {
    const auto& work = plan.work(proc.rank());
    ComplexMatrix& blk = rho.block(proc.rank());
    if (work.rows.empty() && work.cols.empty() && work.sends.empty() && work.receives.empty()) return;

    ComplexMatrix snapshot;
    proc.compute([&] { snapshot = blk; });

    // Outgoing point values first so receivers rarely block.
    for (const auto& s : work.sends) {
      const Complex value = snapshot(s.src_local, s.src_local);
      proc.send(s.dst_rank, kTagPoint, std::span<const Complex>(&value, 1), CommKind::point);
    }

    proc.compute([&] {
      for (const auto& r : work.rows) {
        auto dst = blk.row(r.local);
        auto src = snapshot.row(r.local);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] -= r.factor * src[c];
      }
      for (const auto& c : work.cols) {
        for (std::size_t r = 0; r < blk.rows(); ++r) blk(r, c.local) -= c.factor * snapshot(r, c.local);
      }
      for (const auto& g : work.gains) {
        blk(g.dst_local, g.dst_local) += g.factor * snapshot(g.src_local, g.src_local);
      }
    });

    for (const auto& r : work.receives) {
      const Message msg = proc.receive(r.src_rank, kTagPoint);
      proc.compute([&] { blk(r.dst_local, r.dst_local) += r.factor * msg.payload.front(); });
    }
  });
}

void apply_channel(DistributedMatrix& rho, const Channel& channel, double dt, ProcessorGrid& grid) {
  const ChannelUpdatePlan plan(std::span<const Channel>(&channel, 1), dt, rho.layout());
  apply_all_channels(rho, plan, grid);
}

std::uint64_t count_flops(std::size_t channel_count, std::size_t dim) {
  return static_cast<std::uint64_t>(channel_count) * (4 * static_cast<std::uint64_t>(dim) + 2);
}

std::uint64_t count_flops(const ChannelUpdatePlan& plan) {
  return count_flops(plan.channels().size(), plan.layout().global_dim());
}

}  // namespace lqed
