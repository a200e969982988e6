// Command-line driver: run / oracle / compare / bench / subspace.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "lqed/simulation.hpp"
#include "lqed/subspace.hpp"
#include "lqed/tcm_model.hpp"

namespace {

constexpr const char* kConfigKeys[] = {"n_at",  "g_over_E",  "gamma_dt", "gamma_prime_dt", "k_max", "dt",
                                       "steps", "grid_side", "mode",     "seed",           "strict", "out_dir"};

/// Options shared by every subcommand that builds a RunConfig. Flags override the config file.
struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app, bool with_mode) {
    app->add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    for (const char* key : kConfigKeys) {
      const std::string k = key;
      if (k == "mode" && !with_mode) continue;
      app->add_option("--" + k, overrides[k], "override config key '" + k + "'");
    }
  }

  lqed::RunConfig resolve(const CLI::App* app) const {
    lqed::RunConfig config;
    if (!config_path.empty()) config = lqed::load_config(config_path);
    for (const auto& [key, value] : overrides) {
      if (app->count("--" + key) > 0) lqed::set_config_value(config, key, value);
    }
    return config;
  }
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int report_violations(const std::vector<std::string>& violations) {
  if (violations.empty()) return 0;
  std::cerr << "invariant violations:\n";
  for (const auto& v : violations) std::cerr << "  " << v << '\n';
  return 2;
}

int do_run(const lqed::RunConfig& config) {
  const lqed::RunResult result = lqed::run_simulation(config);
  print_warnings(result.warnings);
  if (!config.out_dir.empty()) {
    lqed::emit_reports(result, config, config.out_dir);
  } else {
    lqed::write_trajectory(std::cout, result.trajectory);
  }
  const auto& last = result.trajectory.rows.back();
  std::cerr << "N = " << result.dimension << ", M = " << result.channel_count << ", steps = " << config.steps
            << ", grid " << config.grid_side << "x" << config.grid_side << ", final trace " << std::setprecision(15)
            << last.trace << '\n';
  if (result.oracle) std::cerr << "max |rho - rho_oracle| = " << result.max_oracle_deviation << '\n';
  return report_violations(result.violations);
}

lqed::TrajectoryRecord read_trajectory_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return lqed::read_trajectory(is);
}

std::vector<int> parse_sides(const std::string& text) {
  std::vector<int> sides;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) sides.push_back(std::stoi(item));
  if (sides.empty()) throw std::invalid_argument("--sides needs at least one grid side");
  return sides;
}

int do_subspace(int n_atoms, bool influx, bool list) {
  lqed::ModelParams params;
  params.n_atoms = n_atoms;
  params.gamma = 1.0;
  params.gamma_prime = influx ? 0.5 : 0.0;
  const lqed::Subspace space = lqed::tcm_subspace(params);
  const auto reduced = space.dimension();
  const auto full = space.full_dimension();
  const double dim_ratio = static_cast<double>(reduced) / static_cast<double>(full);
  const double mem_ratio = lqed::memory_ratio(reduced, full);
  const auto channels = lqed::build_channels(params, space);
  std::cout << "n_at\t" << n_atoms << '\n'
            << "dimension\t" << reduced << '\n'
            << "full_dimension\t" << full << '\n'
            << "dimension_ratio\t" << std::setprecision(6) << dim_ratio << '\t' << std::fixed << std::setprecision(2)
            << 100.0 * dim_ratio << "%\n"
            << std::defaultfloat << std::setprecision(6) << "memory_ratio\t" << mem_ratio << '\t' << std::fixed
            << std::setprecision(2) << 100.0 * mem_ratio << "%\n"
            << std::defaultfloat << "channels\t" << channels.size() << '\n';
  if (list) lqed::export_subspace(std::cout, space);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed Lindblad solver for the Tavis-Cummings model"};
  app.require_subcommand(1);

  ConfigOptions run_opts;
  auto* run = app.add_subcommand("run", "split-step simulation on a processor grid");
  run_opts.attach(run, true);

  ConfigOptions oracle_opts;
  auto* oracle = app.add_subcommand("oracle", "dense single-worker reference run");
  oracle_opts.attach(oracle, false);

  std::string file_a, file_b;
  double tolerance = 1e-10;
  auto* compare = app.add_subcommand("compare", "compare two trajectory files");
  compare->add_option("a", file_a, "first trajectory")->required()->check(CLI::ExistingFile);
  compare->add_option("b", file_b, "second trajectory")->required()->check(CLI::ExistingFile);
  compare->add_option("--tolerance", tolerance, "deviation reported as a failure");

  ConfigOptions bench_opts;
  std::string sides_text = "1,2,4";
  std::string bench_out;
  auto* bench = app.add_subcommand("bench", "grid-size sweep with per-phase timing tables");
  bench_opts.attach(bench, false);
  bench->add_option("--sides", sides_text, "comma-separated grid sides");
  bench->add_option("--out", bench_out, "write the table here instead of stdout");

  int sub_atoms = 1;
  bool sub_influx = false;
  bool sub_list = false;
  auto* subspace = app.add_subcommand("subspace", "dimension and memory report of the reachable subspace");
  subspace->add_option("--n_at", sub_atoms, "number of atoms")->required();
  subspace->add_flag("--influx", sub_influx, "include the influx channel moves");
  subspace->add_flag("--list", sub_list, "list every basis state");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return do_run(run_opts.resolve(run));
    if (*oracle) {
      auto config = oracle_opts.resolve(oracle);
      config.mode = lqed::RunMode::oracle;
      return do_run(config);
    }
    if (*compare) {
      const auto report =
          lqed::compare_runs(read_trajectory_file(file_a), read_trajectory_file(file_b), tolerance);
      lqed::write_comparison(std::cout, report, tolerance);
      return report.first_step_over ? 1 : 0;
    }
    if (*bench) {
      auto config = bench_opts.resolve(bench);
      if (bench->count("--steps") == 0 && bench_opts.config_path.empty()) config.steps = 5;
      const auto sides = parse_sides(sides_text);
      const auto rows = lqed::run_bench(config, sides);
      if (bench_out.empty()) {
        lqed::write_bench(std::cout, rows);
      } else {
        std::ofstream os(bench_out);
        if (!os) throw std::runtime_error("cannot write " + bench_out);
        lqed::write_bench(os, rows);
      }
      return 0;
    }
    if (*subspace) return do_subspace(sub_atoms, sub_influx, sub_list);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
