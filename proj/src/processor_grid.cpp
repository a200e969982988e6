#include "lqed/processor_grid.hpp"

#include <algorithm>
#include <string>

namespace lqed {

const GridConfig& Processor::grid() const { return owner_->config(); }

void Processor::send(int dst_rank, int tag, const ComplexMatrix& data, CommKind kind) {
  WallStopwatch watch;
  Message msg{tag, data.rows(), data.cols(), {data.entries().begin(), data.entries().end()}};
  const std::size_t entries = msg.payload.size();
  owner_->deliver(dst_rank, {rank_, std::move(msg)});
  auto& c = counters();
  c.comm_time += watch.seconds();
  c.messages_sent += 1;
  c.entries_sent += entries;
  events_[static_cast<std::size_t>(phase_)].push_back({rank_, dst_rank, kind, entries});
}

void Processor::send(int dst_rank, int tag, std::span<const Complex> data, CommKind kind) {
  WallStopwatch watch;
  Message msg{tag, 1, data.size(), {data.begin(), data.end()}};
  owner_->deliver(dst_rank, {rank_, std::move(msg)});
  auto& c = counters();
  c.comm_time += watch.seconds();
  c.messages_sent += 1;
  c.entries_sent += data.size();
  events_[static_cast<std::size_t>(phase_)].push_back({rank_, dst_rank, kind, data.size()});
}

Message Processor::receive(int src_rank, int tag) {
  WallStopwatch watch;
  Message msg = owner_->take(rank_, src_rank, tag);
  counters().comm_time += watch.seconds();
  return msg;
}

void Processor::barrier() { owner_->arrive_and_wait(); }

// ---------------------------------------------------------------------------

ProcessorGrid::ProcessorGrid(GridConfig config) : config_(config) {
  const int p = config_.worker_count();
  processors_.resize(static_cast<std::size_t>(p));
  inboxes_.reserve(static_cast<std::size_t>(p));
  for (int r = 0; r < p; ++r) {
    auto& proc = processors_[static_cast<std::size_t>(r)];
    proc.owner_ = this;
    proc.rank_ = r;
    proc.coord_ = config_.coord_of(r);
    inboxes_.push_back(std::make_unique<Inbox>());
  }
  reset_instrumentation();
  workers_.reserve(static_cast<std::size_t>(p));
  for (int r = 0; r < p; ++r) workers_.emplace_back([this, r] { worker_main(r); });
}

ProcessorGrid::~ProcessorGrid() {
  {
    std::lock_guard lock(job_mutex_);
    stopping_ = true;
  }
  job_ready_.notify_all();
  workers_.clear();
}

void ProcessorGrid::run(Phase phase, const std::function<void(Processor&)>& kernel) {
  std::unique_lock lock(job_mutex_);
  for (auto& proc : processors_) proc.phase_ = phase;
  job_ = &kernel;
  pending_ = config_.worker_count();
  failure_ = nullptr;
  ++generation_;
  job_ready_.notify_all();
  job_done_.wait(lock, [this] { return pending_ == 0; });
  job_ = nullptr;
  if (failure_) {
    // Leave the grid reusable: drop undelivered messages and clear the abort flag.
    for (auto& inbox : inboxes_) {
      std::lock_guard inbox_lock(inbox->mutex);
      inbox->queue.clear();
    }
    {
      std::lock_guard barrier_lock(barrier_mutex_);
      aborted_ = false;
      barrier_waiting_ = 0;
    }
    std::rethrow_exception(std::exchange(failure_, nullptr));
  }
}

void ProcessorGrid::worker_main(int rank) {
  std::uint64_t seen = 0;
  Processor& proc = processors_[static_cast<std::size_t>(rank)];
  for (;;) {
    const std::function<void(Processor&)>* kernel = nullptr;
    {
      std::unique_lock lock(job_mutex_);
      job_ready_.wait(lock, [&] { return stopping_ || generation_ != seen; });
      if (stopping_) return;
      seen = generation_;
      kernel = job_;
    }
    WallStopwatch wall;
    CpuStopwatch cpu;
    try {
      (*kernel)(proc);
    } catch (...) {
      {
        std::lock_guard lock(job_mutex_);
        if (!failure_) failure_ = std::current_exception();
      }
      abort_job();
    }
    auto& c = proc.counters();
    c.total_time += wall.seconds();
    c.busy_time += cpu.seconds();
    {
      std::lock_guard lock(job_mutex_);
      if (--pending_ == 0) job_done_.notify_all();
    }
  }
}

void ProcessorGrid::deliver(int dst, Envelope envelope) {
  if (dst < 0 || dst >= config_.worker_count()) {
    throw std::out_of_range("send to rank " + std::to_string(dst) + " outside the grid");
  }
  Inbox& inbox = *inboxes_[static_cast<std::size_t>(dst)];
  {
    std::lock_guard lock(inbox.mutex);
    inbox.queue.push_back(std::move(envelope));
  }
  inbox.arrived.notify_all();
}

Message ProcessorGrid::take(int dst, int src, int tag) {
  Inbox& inbox = *inboxes_[static_cast<std::size_t>(dst)];
  std::unique_lock lock(inbox.mutex);
  for (;;) {
    auto it = std::find_if(inbox.queue.begin(), inbox.queue.end(),
                           [&](const Envelope& e) { return e.src == src && e.message.tag == tag; });
    if (it != inbox.queue.end()) {
      Message msg = std::move(it->message);
      inbox.queue.erase(it);
      return msg;
    }
    {
      std::lock_guard barrier_lock(barrier_mutex_);
      if (aborted_) throw GridAborted();
    }
    inbox.arrived.wait(lock);
  }
}

void ProcessorGrid::arrive_and_wait() {
  std::unique_lock lock(barrier_mutex_);
  if (aborted_) throw GridAborted();
  const std::uint64_t gen = barrier_generation_;
  if (++barrier_waiting_ == config_.worker_count()) {
    barrier_waiting_ = 0;
    ++barrier_generation_;
    barrier_cv_.notify_all();
    return;
  }
  barrier_cv_.wait(lock, [&] { return barrier_generation_ != gen || aborted_; });
  if (barrier_generation_ == gen) throw GridAborted();
}

void ProcessorGrid::abort_job() {
  {
    std::lock_guard lock(barrier_mutex_);
    aborted_ = true;
  }
  barrier_cv_.notify_all();
  for (auto& inbox : inboxes_) {
    // Taking the inbox lock orders the flag before any waiter re-checks it.
    std::lock_guard lock(inbox->mutex);
    inbox->arrived.notify_all();
  }
}

TimingReport ProcessorGrid::collect_timing(Phase phase) const {
  TimingReport report;
  report.phase = phase;
  report.grid_side = config_.side();
  for (const auto& proc : processors_) {
    ProcessorTiming t = proc.timings_[static_cast<std::size_t>(phase)];
    t.coord = proc.coord_;
    report.processors.push_back(t);
  }
  return report;
}

std::vector<CommEvent> ProcessorGrid::events(Phase phase) const {
  std::vector<CommEvent> all;
  for (const auto& proc : processors_) {
    const auto& ev = proc.events_[static_cast<std::size_t>(phase)];
    all.insert(all.end(), ev.begin(), ev.end());
  }
  return all;
}

void ProcessorGrid::reset_instrumentation() {
  for (auto& proc : processors_) {
    for (auto& t : proc.timings_) t = ProcessorTiming{proc.coord_};
    for (auto& ev : proc.events_) ev.clear();
  }
}

}  // namespace lqed
