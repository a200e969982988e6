#pragma once

#include <array>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <thread>
#include <vector>

#include "lqed/grid.hpp"
#include "lqed/matrix.hpp"
#include "lqed/timing.hpp"

namespace lqed {

/// Raised inside workers blocked on a barrier or receive after another worker failed.
class GridAborted : public std::runtime_error {
 public:
  GridAborted() : std::runtime_error("grid job aborted by a failing worker") {}
};

/// Opaque payload carried between processors.
struct Message {
  int tag = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Complex> payload;
};

class ProcessorGrid;

/// Handle a worker uses inside a grid job: its coordinates, messaging and timers.
class Processor {
 public:
  GridCoord coord() const { return coord_; }
  int rank() const { return rank_; }
  const GridConfig& grid() const;

  /// Copies the data into a message for `dst_rank`. Never blocks.
  void send(int dst_rank, int tag, const ComplexMatrix& data, CommKind kind);
  void send(int dst_rank, int tag, std::span<const Complex> data, CommKind kind);
  /// Blocks until the next message from `src_rank` with `tag` arrives. Messages
  /// between a pair of processors are delivered in send order.
  Message receive(int src_rank, int tag);

  /// Lockstep round boundary across all processors of the grid.
  void barrier();

  /// Runs local arithmetic, charging its thread CPU time to mac_time.
  template <class F>
  void compute(F&& f) {
    CpuStopwatch watch;
    std::forward<F>(f)();
    counters().mac_time += watch.seconds();
  }

 private:
  friend class ProcessorGrid;

  ProcessorTiming& counters() { return timings_[static_cast<std::size_t>(phase_)]; }

  ProcessorGrid* owner_ = nullptr;
  GridCoord coord_;
  int rank_ = 0;
  Phase phase_ = Phase::setup;
  std::array<ProcessorTiming, kPhaseCount> timings_{};
  std::array<std::vector<CommEvent>, kPhaseCount> events_{};
};

/// p_x x p_x logical processors realized as persistent worker threads. A job
/// runs one kernel on every processor concurrently; run() returns once all of
/// them finish, which is the barrier between driver-level rounds. Messages go
/// through per-processor inboxes with the semantics of a network transport.
class ProcessorGrid {
 public:
  explicit ProcessorGrid(GridConfig config);
  ~ProcessorGrid();
  ProcessorGrid(const ProcessorGrid&) = delete;
  ProcessorGrid& operator=(const ProcessorGrid&) = delete;

  const GridConfig& config() const { return config_; }

  /// Runs `kernel` on every processor; rethrows the first worker exception.
  void run(Phase phase, const std::function<void(Processor&)>& kernel);

  TimingReport collect_timing(Phase phase) const;
  /// Every message sent during `phase`, ordered by sender rank then send order.
  std::vector<CommEvent> events(Phase phase) const;
  void reset_instrumentation();

 private:
  friend class Processor;

  struct Envelope {
    int src = 0;
    Message message;
  };
  struct Inbox {
    std::mutex mutex;
    std::condition_variable arrived;
    std::deque<Envelope> queue;
  };

  void worker_main(int rank);
  void deliver(int dst, Envelope envelope);
  Message take(int dst, int src, int tag);
  void arrive_and_wait();
  void abort_job();

  GridConfig config_;
  std::vector<Processor> processors_;
  std::vector<std::unique_ptr<Inbox>> inboxes_;

  std::mutex job_mutex_;
  std::condition_variable job_ready_;
  std::condition_variable job_done_;
  const std::function<void(Processor&)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr failure_;

  std::mutex barrier_mutex_;
  std::condition_variable barrier_cv_;
  int barrier_waiting_ = 0;
  std::uint64_t barrier_generation_ = 0;
  bool aborted_ = false;

  std::vector<std::jthread> workers_;
};

}  // namespace lqed
