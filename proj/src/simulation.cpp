#include "lqed/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "lqed/cannon.hpp"
#include "lqed/dissipator.hpp"
#include "lqed/matrix_io.hpp"
#include "lqed/reference_oracle.hpp"

namespace lqed {

const char* run_mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::distributed: return "distributed";
    case RunMode::oracle: return "oracle";
    case RunMode::both: return "both";
  }
  return "unknown";
}

RunMode parse_run_mode(const std::string& name) {
  for (RunMode m : {RunMode::distributed, RunMode::oracle, RunMode::both}) {
    if (name == run_mode_name(m)) return m;
  }
  throw std::invalid_argument("mode must be distributed, oracle or both; got '" + name + "'");
}

// ---------------------------------------------------------------------------
// Configuration

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (n_atoms < 1 || n_atoms > 12) fail("n_at must be in [1, 12]");
  if (!(g_over_E >= 0.0) || !std::isfinite(g_over_E)) fail("g_over_E must be >= 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt must be > 0");
  if (steps < 1) fail("steps must be >= 1");
  if (k_max < 1) fail("k_max must be >= 1");
  if (!(gamma_dt >= 0.0 && gamma_dt < 1.0)) fail("gamma_dt must lie in [0, 1)");
  if (!(gamma_prime_dt >= 0.0)) fail("gamma_prime_dt must be >= 0");
  if (gamma_prime_dt > 0.0 && !(gamma_prime_dt < gamma_dt)) fail("gamma_prime_dt must be below gamma_dt");
  static constexpr int kSides[] = {1, 2, 4, 8, 16};
  if (std::find(std::begin(kSides), std::end(kSides), grid_side) == std::end(kSides)) {
    fail("grid_side must be one of 1, 2, 4, 8, 16");
  }
  std::size_t dim = 1;
  for (int a = 0; a < n_atoms; ++a) dim *= 3;
  if (static_cast<std::size_t>(grid_side) > dim) {
    fail("grid_side " + std::to_string(grid_side) + " exceeds the subspace dimension " + std::to_string(dim));
  }
}

ModelParams RunConfig::model() const {
  ModelParams p;
  p.n_atoms = n_atoms;
  p.hbar_omega = 1.0;
  p.hbar = 1.0;
  p.g = g_over_E;
  p.gamma = gamma_dt / dt;
  p.gamma_prime = gamma_prime_dt / dt;
  return p;
}

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream is(value);
  T out{};
  if (!(is >> out) || !(is >> std::ws).eof()) {
    throw std::invalid_argument("config: key '" + key + "' expects a number, got '" + value + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw std::invalid_argument("config: key '" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "n_at") c.n_atoms = parse_number<int>(key, value);
  else if (key == "g_over_E") c.g_over_E = parse_number<double>(key, value);
  else if (key == "gamma_dt") c.gamma_dt = parse_number<double>(key, value);
  else if (key == "gamma_prime_dt") c.gamma_prime_dt = parse_number<double>(key, value);
  else if (key == "k_max") c.k_max = parse_number<int>(key, value);
  else if (key == "dt") c.dt = parse_number<double>(key, value);
  else if (key == "steps") c.steps = parse_number<int>(key, value);
  else if (key == "grid_side") c.grid_side = parse_number<int>(key, value);
  else if (key == "mode") c.mode = parse_run_mode(value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "strict") c.strict = parse_bool(key, value);
  else if (key == "out_dir") c.out_dir = value;
  else throw std::invalid_argument("config: unknown key '" + key + "'");
}

RunConfig parse_config(std::istream& is, RunConfig base) {
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    set_config_value(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read config " + path.string());
  return parse_config(is, std::move(base));
}

void write_config(std::ostream& os, const RunConfig& c) {
  os << "n_at = " << c.n_atoms << '\n'
     << "g_over_E = " << format_double(c.g_over_E) << '\n'
     << "gamma_dt = " << format_double(c.gamma_dt) << '\n'
     << "gamma_prime_dt = " << format_double(c.gamma_prime_dt) << '\n'
     << "k_max = " << c.k_max << '\n'
     << "dt = " << format_double(c.dt) << '\n'
     << "steps = " << c.steps << '\n'
     << "grid_side = " << c.grid_side << '\n'
     << "mode = " << run_mode_name(c.mode) << '\n'
     << "seed = " << c.seed << '\n'
     << "strict = " << (c.strict ? "true" : "false") << '\n';
  if (!c.out_dir.empty()) os << "out_dir = " << c.out_dir << '\n';
}

// ---------------------------------------------------------------------------
// Observables and trajectory files

double TrajectoryRow::energy() const {
  double e = 0.0;
  for (std::size_t n = 0; n < populations.size(); ++n) e += static_cast<double>(n) * populations[n];
  return e;
}

TrajectoryRow observe(const ComplexMatrix& rho, const Subspace& space, int step, double time) {
  TrajectoryRow row;
  row.step = step;
  row.time = time;
  row.populations.assign(static_cast<std::size_t>(space.atom_count()) + 1, 0.0);
  for (std::size_t s = 0; s < space.dimension(); ++s) {
    row.populations[static_cast<std::size_t>(excitation_number(space.state(s)))] += rho(s, s).real();
  }
  row.trace = trace(rho).real();
  row.hermiticity_defect = hermiticity_defect(rho);
  return row;
}

void write_trajectory(std::ostream& os, const TrajectoryRecord& record) {
  os << "step\ttime";
  for (int n = 0; n <= record.n_atoms; ++n) os << "\tP" << n;
  os << "\ttrace\thermiticity_defect\n";
  for (const auto& row : record.rows) {
    os << row.step << '\t' << format_double(row.time);
    for (double p : row.populations) os << '\t' << format_double(p);
    os << '\t' << format_double(row.trace) << '\t' << format_double(row.hermiticity_defect) << '\n';
  }
}

TrajectoryRecord read_trajectory(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("trajectory: empty input");
  std::vector<std::string> columns;
  {
    std::istringstream hs(header);
    std::string col;
    while (std::getline(hs, col, '\t')) columns.push_back(col);
  }
  if (columns.size() < 5 || columns[0] != "step" || columns[1] != "time" || columns.back() != "hermiticity_defect") {
    throw std::runtime_error("trajectory: unrecognised header '" + header + "'");
  }
  TrajectoryRecord record;
  record.n_atoms = static_cast<int>(columns.size()) - 5;
  std::string line;
  int line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, '\t')) fields.push_back(f);
    if (fields.size() != columns.size()) {
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns.size()) + " fields");
    }
    TrajectoryRow row;
    row.step = std::stoi(fields[0]);
    row.time = parse_double(fields[1]);
    for (int n = 0; n <= record.n_atoms; ++n) row.populations.push_back(parse_double(fields[2 + n]));
    row.trace = parse_double(fields[fields.size() - 2]);
    row.hermiticity_defect = parse_double(fields.back());
    record.rows.push_back(std::move(row));
  }
  return record;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

class InvariantLog {
 public:
  void fail(const std::string& msg) {
    ++count_;
    if (messages_.size() < kMaxKept) messages_.push_back(msg);
  }
  std::vector<std::string> finish() {
    if (count_ > messages_.size()) {
      messages_.push_back("... " + std::to_string(count_ - messages_.size()) + " more invariant violations");
    }
    return std::move(messages_);
  }

 private:
  static constexpr std::size_t kMaxKept = 20;
  std::size_t count_ = 0;
  std::vector<std::string> messages_;
};

std::string at_step(int step) { return "step " + std::to_string(step) + ": "; }

void check_row(const TrajectoryRow& row, const TrajectoryRow* previous, bool influx_free,
               const InvariantTolerances& tol, InvariantLog& log) {
  std::ostringstream msg;
  if (std::abs(row.trace - 1.0) > tol.trace) {
    msg << at_step(row.step) << "|Tr rho - 1| = " << std::abs(row.trace - 1.0);
    log.fail(msg.str());
  }
  if (row.hermiticity_defect > tol.hermiticity) {
    log.fail(at_step(row.step) + "Hermiticity defect " + std::to_string(row.hermiticity_defect));
  }
  for (std::size_t n = 0; n < row.populations.size(); ++n) {
    const double p = row.populations[n];
    if (p < -tol.population_slack || p > 1.0 + tol.population_slack) {
      log.fail(at_step(row.step) + "P" + std::to_string(n) + " = " + std::to_string(p) + " out of [0, 1]");
    }
  }
  if (influx_free && previous != nullptr && row.energy() > previous->energy() + tol.energy_increase) {
    std::ostringstream e;
    e << at_step(row.step) << "energy rose by " << row.energy() - previous->energy();
    log.fail(e.str());
  }
}

double diagonal_trace(const DistributedMatrix& rho) {
  // Diagonal blocks only; the Neumaier sum runs over the gathered diagonal.
  ComplexMatrix diag(rho.dim(), rho.dim());
  const auto& layout = rho.layout();
  for (int d = 0; d < rho.grid_side(); ++d) {
    const auto& blk = rho.block(GridCoord{d, d});
    for (std::size_t i = 0; i < blk.rows(); ++i) diag(layout.offset(d) + i, layout.offset(d) + i) = blk(i, i);
  }
  return trace(diag).real();
}

ComplexMatrix initial_density(const Subspace& space) {
  const std::size_t n = space.dimension();
  ComplexMatrix rho(n, n);
  const auto start = space.index_of(BasisState::all_excited(space.atom_count()));
  rho(*start, *start) = 1.0;
  return rho;
}

}  // namespace

RunResult run_simulation(const RunConfig& config, const InvariantTolerances& tol) {
  config.validate();
  const ModelParams params = config.model();
  const Subspace space = tcm_subspace(params);
  const ComplexMatrix hamiltonian = build_hamiltonian(params, space);
  const std::vector<Channel> channels = build_channels(params, space);
  const bool influx_free = config.gamma_prime_dt == 0.0;
  const ComplexMatrix rho0 = initial_density(space);

  RunResult result;
  result.dimension = space.dimension();
  result.channel_count = channels.size();
  InvariantLog log;

  oracle::OracleOptions oracle_options;
  oracle_options.k_max = config.k_max;
  oracle_options.hbar = params.hbar;

  if (config.mode == RunMode::oracle) {
    const oracle::DenseIntegrator integrator(hamiltonian, channels, config.dt, oracle_options);
    TrajectoryRecord record{params.n_atoms, {}};
    ComplexMatrix rho = rho0;
    record.rows.push_back(observe(rho, space, 0, 0.0));
    check_row(record.rows.back(), nullptr, influx_free, tol, log);
    for (int step = 1; step <= config.steps; ++step) {
      rho = integrator.step(rho);
      record.rows.push_back(observe(rho, space, step, step * config.dt));
      check_row(record.rows.back(), &record.rows[record.rows.size() - 2], influx_free, tol, log);
    }
    result.trajectory = std::move(record);
    result.final_rho = std::move(rho);
    result.violations = log.finish();
    return result;
  }

  // Mode both: the oracle advances in lockstep so only the current state is kept.
  std::optional<oracle::DenseIntegrator> integrator;
  ComplexMatrix oracle_rho;
  TrajectoryRecord oracle_record{params.n_atoms, {}};
  if (config.mode == RunMode::both) {
    integrator.emplace(hamiltonian, channels, config.dt, oracle_options);
    oracle_rho = rho0;
    oracle_record.rows.push_back(observe(oracle_rho, space, 0, 0.0));
  }

  ProcessorGrid grid{GridConfig(config.grid_side)};
  PropagatorOptions prop_options;
  prop_options.k_max = config.k_max;
  prop_options.hbar = params.hbar;
  prop_options.strict = config.strict;
  const PropagatorPair props = build_propagators(hamiltonian, config.dt, grid, prop_options);
  result.warnings = props.warnings;
  const ChannelUpdatePlan plan(channels, config.dt, BlockPartition(space.dimension(), config.grid_side));

  DistributedMatrix rho = DistributedMatrix::scatter(rho0, config.grid_side);
  TrajectoryRecord record{params.n_atoms, {}};
  record.rows.push_back(observe(rho0, space, 0, 0.0));
  check_row(record.rows.back(), nullptr, influx_free, tol, log);
  for (int step = 1; step <= config.steps; ++step) {
    rho = unitary_step(rho, props, grid);
    const double trace_before = diagonal_trace(rho);
    apply_all_channels(rho, plan, grid);
    const double trace_change = std::abs(diagonal_trace(rho) - trace_before);
    result.max_dissipator_trace_change = std::max(result.max_dissipator_trace_change, trace_change);
    if (trace_change > tol.dissipator_trace) {
      std::ostringstream msg;
      msg << at_step(step) << "dissipator changed the trace by " << trace_change;
      log.fail(msg.str());
    }
    const ComplexMatrix dense = rho.gather();
    record.rows.push_back(observe(dense, space, step, step * config.dt));
    check_row(record.rows.back(), &record.rows[record.rows.size() - 2], influx_free, tol, log);
    if (integrator) {
      oracle_rho = integrator->step(oracle_rho);
      oracle_record.rows.push_back(observe(oracle_rho, space, step, step * config.dt));
      const double dev = max_abs_diff(dense, oracle_rho);
      result.max_oracle_deviation = std::max(result.max_oracle_deviation, dev);
      if (dev > tol.oracle_agreement) {
        std::ostringstream msg;
        msg << at_step(step) << "distributed and oracle rho differ by " << dev;
        log.fail(msg.str());
      }
    }
    if (step == config.steps) result.final_rho = dense;
  }

  if (integrator) result.oracle = std::move(oracle_record);
  result.trajectory = std::move(record);
  result.setup_timing = grid.collect_timing(Phase::setup);
  result.unitary_timing = grid.collect_timing(Phase::unitary);
  result.dissipator_timing = grid.collect_timing(Phase::dissipator);
  result.unitary_messages = grid.events(Phase::unitary).size();
  result.dissipator_messages = grid.events(Phase::dissipator).size();
  result.violations = log.finish();
  return result;
}

// ---------------------------------------------------------------------------
// Comparison

ComparisonReport compare_runs(const TrajectoryRecord& a, const TrajectoryRecord& b, double tolerance) {
  if (a.n_atoms != b.n_atoms) throw std::invalid_argument("compare_runs: atom counts differ");
  if (a.rows.size() != b.rows.size()) {
    throw std::invalid_argument("compare_runs: " + std::to_string(a.rows.size()) + " vs " +
                                std::to_string(b.rows.size()) + " rows");
  }
  for (std::size_t k = 0; k < a.rows.size(); ++k) {
    if (a.rows[k].step != b.rows[k].step || std::abs(a.rows[k].time - b.rows[k].time) > 1e-12 * (1.0 + std::abs(a.rows[k].time))) {
      throw std::invalid_argument("compare_runs: time grids differ at row " + std::to_string(k));
    }
  }

  ComparisonReport report;
  auto track = [&](const std::string& name, auto value_of) {
    ObservableDeviation dev{name, 0.0, std::nullopt};
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
      const double d = std::abs(value_of(a.rows[k]) - value_of(b.rows[k]));
      dev.max_abs = std::max(dev.max_abs, d);
      if (!dev.first_step_over && d > tolerance) dev.first_step_over = a.rows[k].step;
    }
    report.max_abs = std::max(report.max_abs, dev.max_abs);
    if (dev.first_step_over && (!report.first_step_over || *dev.first_step_over < *report.first_step_over)) {
      report.first_step_over = dev.first_step_over;
    }
    report.observables.push_back(std::move(dev));
  };
  for (int n = 0; n <= a.n_atoms; ++n) {
    track("P" + std::to_string(n), [n](const TrajectoryRow& r) { return r.populations[static_cast<std::size_t>(n)]; });
  }
  track("trace", [](const TrajectoryRow& r) { return r.trace; });
  track("energy", [](const TrajectoryRow& r) { return r.energy(); });
  return report;
}

void write_comparison(std::ostream& os, const ComparisonReport& report, double tolerance) {
  os << "observable\tmax_abs_deviation\tfirst_step_over_" << format_double(tolerance) << '\n';
  for (const auto& d : report.observables) {
    os << d.observable << '\t' << format_double(d.max_abs) << '\t'
       << (d.first_step_over ? std::to_string(*d.first_step_over) : "-") << '\n';
  }
  os << "overall\t" << format_double(report.max_abs) << '\t'
     << (report.first_step_over ? std::to_string(*report.first_step_over) : "-") << '\n';
}

// ---------------------------------------------------------------------------
// Reports

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

}  // namespace

void emit_reports(const RunResult& result, const RunConfig& config, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  {
    auto os = open_for_write(out_dir / "trajectory.tsv");
    write_trajectory(os, result.trajectory);
  }
  if (result.oracle) {
    auto os = open_for_write(out_dir / "oracle_trajectory.tsv");
    write_trajectory(os, *result.oracle);
  }
  if (config.mode != RunMode::oracle) {
    for (const TimingReport* report : {&result.unitary_timing, &result.dissipator_timing}) {
      auto os = open_for_write(out_dir / ("timing_" + std::string(phase_name(report->phase)) + ".json"));
      write_timing(os, *report);
    }
  }

  std::ostringstream cfg;
  write_config(cfg, config);
  nlohmann::json summary;
  summary["config"] = cfg.str();
  summary["dimension"] = result.dimension;
  summary["channels"] = result.channel_count;
  summary["dissipator_flops_per_step"] = count_flops(result.channel_count, result.dimension);
  summary["max_dissipator_trace_change"] = result.max_dissipator_trace_change;
  if (result.oracle) summary["max_oracle_deviation"] = result.max_oracle_deviation;
  summary["unitary_messages"] = result.unitary_messages;
  summary["dissipator_messages"] = result.dissipator_messages;
  summary["unitary_critical_path"] = result.unitary_timing.critical_path();
  summary["dissipator_critical_path"] = result.dissipator_timing.critical_path();
  summary["warnings"] = result.warnings;
  summary["violations"] = result.violations;
  auto os = open_for_write(out_dir / "summary.json");
  os << summary.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// Grid-size sweep

std::vector<BenchRow> run_bench(const RunConfig& config, std::span<const int> grid_sides) {
  std::vector<BenchRow> rows;
  for (int side : grid_sides) {
    RunConfig c = config;
    c.grid_side = side;
    c.validate();
    const ModelParams params = c.model();
    const Subspace space = tcm_subspace(params);
    const ComplexMatrix hamiltonian = build_hamiltonian(params, space);
    const std::vector<Channel> channels = build_channels(params, space);

    ProcessorGrid grid{GridConfig(side)};
    PropagatorOptions options;
    options.k_max = c.k_max;
    options.strict = c.strict;
    const PropagatorPair props = build_propagators(hamiltonian, c.dt, grid, options);
    const ChannelUpdatePlan plan(channels, c.dt, BlockPartition(space.dimension(), side));
    DistributedMatrix rho = DistributedMatrix::scatter(initial_density(space), side);
    grid.reset_instrumentation();
    for (int step = 0; step < c.steps; ++step) {
      rho = unitary_step(rho, props, grid);
      apply_all_channels(rho, plan, grid);
    }

    BenchRow row;
    row.grid_side = side;
    row.workers = side * side;
    row.dimension = space.dimension();
    row.channels = channels.size();
    row.steps = c.steps;
    row.unitary = grid.collect_timing(Phase::unitary);
    row.dissipator = grid.collect_timing(Phase::dissipator);
    row.unitary_mean_mac = row.unitary.mean_mac_time();
    row.unitary_max_mac = row.unitary.max_mac_time();
    row.unitary_mean_comm = row.unitary.mean_comm_time();
    row.unitary_critical_path = row.unitary.critical_path();
    row.unitary_messages = grid.events(Phase::unitary).size();
    row.dissipator_mean_mac = row.dissipator.mean_mac_time();
    row.dissipator_max_mac = row.dissipator.max_mac_time();
    row.dissipator_mean_comm = row.dissipator.mean_comm_time();
    row.dissipator_critical_path = row.dissipator.critical_path();
    row.dissipator_messages = grid.events(Phase::dissipator).size();
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_bench(std::ostream& os, std::span<const BenchRow> rows) {
  os << "grid_side\tworkers\tdimension\tchannels\tsteps\t"
        "unitary_mean_mac\tunitary_max_mac\tunitary_mean_comm\tunitary_critical_path\tunitary_messages\t"
        "dissipator_mean_mac\tdissipator_max_mac\tdissipator_mean_comm\tdissipator_critical_path\t"
        "dissipator_messages\n";
  for (const auto& r : rows) {
    os << r.grid_side << '\t' << r.workers << '\t' << r.dimension << '\t' << r.channels << '\t' << r.steps << '\t'
       << r.unitary_mean_mac << '\t' << r.unitary_max_mac << '\t' << r.unitary_mean_comm << '\t'
       << r.unitary_critical_path << '\t' << r.unitary_messages << '\t' << r.dissipator_mean_mac << '\t'
       << r.dissipator_max_mac << '\t' << r.dissipator_mean_comm << '\t' << r.dissipator_critical_path << '\t'
       << r.dissipator_messages << '\n';
  }
}

}  // namespace lqed
