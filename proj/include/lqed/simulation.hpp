#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lqed/matrix.hpp"
#include "lqed/tcm_model.hpp"
#include "lqed/timing.hpp"

namespace lqed {

enum class RunMode { distributed, oracle, both };

const char* run_mode_name(RunMode mode);
RunMode parse_run_mode(const std::string& name);

/// Everything a run needs. Physical inputs are dimensionless groups: energies in
/// units of E = hbar*omega, time in units of hbar/E.
struct RunConfig {
  int n_atoms = 5;
  double g_over_E = 0.5;
  double gamma_dt = 0.04;
  double gamma_prime_dt = 0.0;
  int k_max = 10;
  double dt = 0.02;
  int steps = 1000;
  int grid_side = 1;
  RunMode mode = RunMode::distributed;
  std::uint64_t seed = 0;
  bool strict = true;
  std::string out_dir;

  /// Throws std::invalid_argument with a message naming the key to fix.
  void validate() const;
  ModelParams model() const;
};

/// Sets one config key from its textual value; unknown keys are an error.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);

/// `key = value` lines; '#' starts a comment; blank lines ignored.
RunConfig parse_config(std::istream& is, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});
void write_config(std::ostream& os, const RunConfig& config);

struct TrajectoryRow {
  int step = 0;
  double time = 0.0;
  std::vector<double> populations;  ///< P_n for n = 0..n_atoms
  double trace = 0.0;
  double hermiticity_defect = 0.0;

  /// sum_n n P_n, in units of E.
  double energy() const;
  bool operator==(const TrajectoryRow&) const = default;
};

struct TrajectoryRecord {
  int n_atoms = 0;
  std::vector<TrajectoryRow> rows;

  bool operator==(const TrajectoryRecord&) const = default;
};

/// Excitation-sector populations, trace and Hermiticity defect of a dense rho.
TrajectoryRow observe(const ComplexMatrix& rho, const Subspace& space, int step, double time);

/// Tab-separated: header "step time P0 .. Pn trace hermiticity_defect", then one row per step.
void write_trajectory(std::ostream& os, const TrajectoryRecord& record);
TrajectoryRecord read_trajectory(std::istream& is);

struct RunResult {
  TrajectoryRecord trajectory;              ///< primary path (distributed unless mode is oracle)
  std::optional<TrajectoryRecord> oracle;   ///< present in mode both
  double max_oracle_deviation = 0.0;        ///< max elementwise |rho_dist - rho_oracle| over all steps
  double max_dissipator_trace_change = 0.0; ///< worst per-step |Tr after - Tr before| of the dissipator
  TimingReport setup_timing;
  TimingReport unitary_timing;
  TimingReport dissipator_timing;
  std::size_t unitary_messages = 0;
  std::size_t dissipator_messages = 0;
  std::size_t dimension = 0;
  std::size_t channel_count = 0;
  std::vector<std::string> warnings;
  std::vector<std::string> violations;
  ComplexMatrix final_rho;
};

/// Invariant tolerances checked at every step of run_simulation.
struct InvariantTolerances {
  double trace = 1e-9;
  double dissipator_trace = 1e-14;
  double hermiticity = 1e-12;
  double population_slack = 1e-9;
  double energy_increase = 1e-12;
  double oracle_agreement = 1e-10;
};

/// Split-step evolution of the all-excited TCM state. Records observables at
/// step 0 and after every step; invariant failures are collected, not thrown.
RunResult run_simulation(const RunConfig& config, const InvariantTolerances& tol = {});

struct ObservableDeviation {
  std::string observable;
  double max_abs = 0.0;
  std::optional<int> first_step_over;
};

struct ComparisonReport {
  std::vector<ObservableDeviation> observables;
  double max_abs = 0.0;
  std::optional<int> first_step_over;
};

/// Per-observable max |a - b|. Throws if the records do not share a time grid.
ComparisonReport compare_runs(const TrajectoryRecord& a, const TrajectoryRecord& b, double tolerance);
void write_comparison(std::ostream& os, const ComparisonReport& report, double tolerance);

/// trajectory.tsv, oracle_trajectory.tsv (mode both), timing_<phase>.json and summary.json.
void emit_reports(const RunResult& result, const RunConfig& config, const std::filesystem::path& out_dir);

struct BenchRow {
  int grid_side = 1;
  int workers = 1;
  std::size_t dimension = 0;
  std::size_t channels = 0;
  int steps = 0;
  double unitary_mean_mac = 0.0;
  double unitary_max_mac = 0.0;
  double unitary_mean_comm = 0.0;
  double unitary_critical_path = 0.0;
  std::size_t unitary_messages = 0;
  double dissipator_mean_mac = 0.0;
  double dissipator_max_mac = 0.0;
  double dissipator_mean_comm = 0.0;
  double dissipator_critical_path = 0.0;
  std::size_t dissipator_messages = 0;
  TimingReport unitary;
  TimingReport dissipator;
};

/// Runs `config.steps` distributed steps on each grid side and tabulates timings.
std::vector<BenchRow> run_bench(const RunConfig& config, std::span<const int> grid_sides);
void write_bench(std::ostream& os, std::span<const BenchRow> rows);

}  // namespace lqed
