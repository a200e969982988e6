#pragma once

#include <chrono>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "lqed/grid.hpp"

namespace lqed {

/// Which part of a time step a grid job belongs to; timings are kept per phase.
enum class Phase { setup, unitary, dissipator };
inline constexpr int kPhaseCount = 3;

const char* phase_name(Phase phase);
Phase parse_phase(const std::string& name);

/// CPU time consumed by the calling thread.
double thread_cpu_seconds();

class WallStopwatch {
 public:
  WallStopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

class CpuStopwatch {
 public:
  CpuStopwatch() : start_(thread_cpu_seconds()) {}
  double seconds() const { return thread_cpu_seconds() - start_; }

 private:
  double start_;
};

struct ProcessorTiming {
  GridCoord coord;
  double mac_time = 0.0;    ///< thread CPU seconds in local multiply-accumulate
  double comm_time = 0.0;   ///< wall seconds in send/receive, blocking waits included
  double total_time = 0.0;  ///< wall seconds inside grid jobs
  double busy_time = 0.0;   ///< thread CPU seconds inside grid jobs
  std::size_t messages_sent = 0;
  std::size_t entries_sent = 0;

  bool operator==(const ProcessorTiming&) const = default;
};

struct TimingReport {
  Phase phase = Phase::setup;
  int grid_side = 1;
  std::vector<ProcessorTiming> processors;  ///< rank order

  double mean_mac_time() const;
  double max_mac_time() const;
  double min_mac_time() const;
  double mean_comm_time() const;
  double max_total_time() const;
  /// max busy_time: the step length if every logical processor had its own core.
  double critical_path() const;
  std::size_t total_messages() const;

  bool operator==(const TimingReport&) const = default;
};

// JSON document: {"phase", "grid_side", "processors": [{row, col, mac_time, ...}],
// "aggregate": {...}}. Aggregates are derived and ignored on read.
void write_timing(std::ostream& os, const TimingReport& report);
TimingReport read_timing(std::istream& is);

}  // namespace lqed
