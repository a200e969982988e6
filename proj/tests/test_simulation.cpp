#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "lqed/simulation.hpp"
#include "lqed/timing.hpp"

using namespace lqed;

namespace {

RunConfig small_config(int n, int steps, int side, RunMode mode) {
  RunConfig c;
  c.n_atoms = n;
  c.steps = steps;
  c.grid_side = side;
  c.mode = mode;
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config text round trip") {
  std::istringstream in(
      "# preset\n"
      "n_at = 3\n"
      "g_over_E = 0.25   # coupling\n"
      "\n"
      "gamma_dt=0.02\n"
      "gamma_prime_dt = 0.005\n"
      "k_max = 8\n"
      "dt = 0.01\n"
      "steps = 50\n"
      "grid_side = 2\n"
      "mode = both\n"
      "seed = 7\n"
      "strict = false\n");
  const auto c = parse_config(in);
  CHECK(c.n_atoms == 3);
  CHECK(c.g_over_E == 0.25);
  CHECK(c.gamma_dt == 0.02);
  CHECK(c.gamma_prime_dt == 0.005);
  CHECK(c.k_max == 8);
  CHECK(c.steps == 50);
  CHECK(c.grid_side == 2);
  CHECK(c.mode == RunMode::both);
  CHECK(c.seed == 7);
  CHECK_FALSE(c.strict);
  CHECK_NOTHROW(c.validate());

  std::stringstream out;
  write_config(out, c);
  const auto again = parse_config(out);
  std::stringstream out2;
  write_config(out2, again);
  CHECK(out.str() == out2.str());
}

TEST_CASE("config errors name the key") {
  RunConfig c;
  CHECK_THROWS_WITH_AS(set_config_value(c, "bogus", "1"), doctest::Contains("bogus"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(set_config_value(c, "steps", "ten"), doctest::Contains("steps"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(set_config_value(c, "mode", "fast"), doctest::Contains("mode"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(set_config_value(c, "strict", "maybe"), doctest::Contains("strict"), std::invalid_argument);
  std::istringstream no_eq("n_at 3\n");
  CHECK_THROWS_AS(parse_config(no_eq), std::invalid_argument);
  CHECK_THROWS(load_config("/nonexistent/config.txt"));

  auto invalid = [](auto mutate) {
    RunConfig r;
    mutate(r);
    return r;
  };
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.grid_side = 3; }).validate(), doctest::Contains("grid_side"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.n_atoms = 1; r.grid_side = 4; }).validate(),
                    doctest::Contains("grid_side"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.gamma_dt = 1.0; }).validate(), doctest::Contains("gamma_dt"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.gamma_prime_dt = 0.05; }).validate(),
                    doctest::Contains("gamma_prime_dt"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.dt = 0.0; }).validate(), doctest::Contains("dt"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.n_atoms = 13; }).validate(), doctest::Contains("n_at"));
  CHECK_THROWS_WITH(invalid([](RunConfig& r) { r.steps = 0; }).validate(), doctest::Contains("steps"));
}

TEST_CASE("model derived from the config") {
  RunConfig c;
  c.n_atoms = 2;
  c.g_over_E = 0.3;
  c.gamma_dt = 0.04;
  c.gamma_prime_dt = 0.01;
  c.dt = 0.02;
  const auto m = c.model();
  CHECK(m.n_atoms == 2);
  CHECK(m.g == doctest::Approx(0.3));
  CHECK(m.gamma == doctest::Approx(2.0));
  CHECK(m.gamma_prime == doctest::Approx(0.5));
  CHECK(m.hbar_omega == 1.0);
}

TEST_CASE("trajectory text round trip is exact") {
  const auto result = run_simulation(small_config(2, 20, 2, RunMode::distributed));
  std::stringstream ss;
  write_trajectory(ss, result.trajectory);
  CHECK(ss.str().rfind("step\ttime\tP0\tP1\tP2\ttrace\thermiticity_defect\n", 0) == 0);
  CHECK(read_trajectory(ss) == result.trajectory);

  std::istringstream bad("step\ttime\n");
  CHECK_THROWS(read_trajectory(bad));
  std::istringstream ragged("step\ttime\tP0\tP1\ttrace\thermiticity_defect\n0\t0\t1\n");
  CHECK_THROWS(read_trajectory(ragged));
}

TEST_CASE("distributed run agrees with the oracle on every grid") {
  for (int side : {1, 2, 4}) {
    CAPTURE(side);
    const auto r = run_simulation(small_config(2, 40, side, RunMode::both));
    REQUIRE(r.oracle.has_value());
    CHECK(r.violations.empty());
    CHECK(r.max_oracle_deviation <= 1e-10);
    CHECK(r.max_dissipator_trace_change <= 1e-14);
    CHECK(r.trajectory.rows.size() == 41);
    CHECK(r.trajectory.rows.front().populations.back() == 1.0);
    CHECK(compare_runs(r.trajectory, *r.oracle, 1e-10).first_step_over == std::nullopt);
  }
}

TEST_CASE("oracle mode runs without a grid") {
  const auto r = run_simulation(small_config(2, 10, 1, RunMode::oracle));
  CHECK_FALSE(r.oracle.has_value());
  CHECK(r.violations.empty());
  CHECK(r.trajectory.rows.size() == 11);
  CHECK(r.unitary_messages == 0);
}

TEST_CASE("violations are collected, not thrown") {
  InvariantTolerances strict;
  strict.energy_increase = -1.0;  // demand a strict decrease of at least 1 per step
  const auto r = run_simulation(small_config(1, 30, 1, RunMode::distributed), strict);
  CHECK_FALSE(r.violations.empty());
  CHECK(r.violations.size() <= 21);
  CHECK(r.violations.back().find("more invariant violations") != std::string::npos);
}

TEST_CASE("comparison reports per observable") {
  const auto a = run_simulation(small_config(2, 10, 1, RunMode::distributed)).trajectory;
  auto b = a;
  b.rows[4].populations[1] += 1e-6;
  const auto report = compare_runs(a, b, 1e-8);
  REQUIRE(report.first_step_over.has_value());
  CHECK(*report.first_step_over == 4);
  CHECK(report.max_abs == doctest::Approx(1e-6));
  CHECK(report.observables.size() == 5);
  CHECK(report.observables[1].observable == "P1");
  CHECK(report.observables[0].max_abs == 0.0);
  CHECK(compare_runs(a, b, 1e-5).first_step_over == std::nullopt);

  auto shorter = a;
  shorter.rows.pop_back();
  CHECK_THROWS_AS(compare_runs(a, shorter, 1e-8), std::invalid_argument);
  auto shifted = a;
  shifted.rows[3].time += 1.0;
  CHECK_THROWS_AS(compare_runs(a, shifted, 1e-8), std::invalid_argument);

  std::ostringstream os;
  write_comparison(os, report, 1e-8);
  CHECK(os.str().find("overall") != std::string::npos);
}

TEST_CASE("reports and determinism") {
  const auto root = std::filesystem::temp_directory_path() / "lqed_test_reports";
  std::filesystem::remove_all(root);
  auto config = small_config(2, 15, 2, RunMode::both);
  const auto first = run_simulation(config);
  const auto second = run_simulation(config);
  emit_reports(first, config, root / "a");
  emit_reports(second, config, root / "b");

  for (const char* f : {"trajectory.tsv", "oracle_trajectory.tsv", "timing_unitary.json", "timing_dissipator.json",
                        "summary.json"}) {
    CHECK(std::filesystem::exists(root / "a" / f));
  }
  CHECK(slurp(root / "a" / "trajectory.tsv") == slurp(root / "b" / "trajectory.tsv"));
  CHECK(slurp(root / "a" / "oracle_trajectory.tsv") == slurp(root / "b" / "oracle_trajectory.tsv"));
  CHECK(first.unitary_messages == second.unitary_messages);
  CHECK(first.dissipator_messages == second.dissipator_messages);

  std::ifstream ts(root / "a" / "timing_unitary.json");
  const auto timing = read_timing(ts);
  CHECK(timing.phase == Phase::unitary);
  CHECK(timing.processors.size() == 4);

  std::ifstream sj(root / "a" / "summary.json");
  const auto summary = nlohmann::json::parse(sj);
  CHECK(summary["dimension"] == 9);
  CHECK(summary["channels"] == 6);
  CHECK(summary["violations"].empty());
  std::filesystem::remove_all(root);
}

TEST_CASE("bench tabulates every grid side") {
  auto config = small_config(3, 2, 1, RunMode::distributed);
  const int sides[] = {1, 2, 4};
  const auto rows = run_bench(config, sides);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].unitary_messages == 0);
  CHECK(rows[0].dissipator_messages == 0);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto px = static_cast<std::size_t>(rows[k].grid_side);
    const std::size_t per_multiply = 2 * px * (px - 1) + 2 * px * px * (px - 1);
    CHECK(rows[k].workers == rows[k].grid_side * rows[k].grid_side);
    CHECK(rows[k].unitary_messages == 2 * 2 * per_multiply);
    CHECK(rows[k].dimension == 27);
  }
  std::ostringstream os;
  write_bench(os, rows);
  std::istringstream is(os.str());
  std::string line;
  int lines = 0;
  while (std::getline(is, line)) ++lines;
  CHECK(lines == 4);
}
