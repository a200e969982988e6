#include "lqed/timing.hpp"

#include <time.h>

#include <algorithm>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

namespace lqed {

const char* phase_name(Phase phase) {
  switch (phase) {
    case Phase::setup: return "setup";
    case Phase::unitary: return "unitary";
    case Phase::dissipator: return "dissipator";
  }
  return "unknown";
}

Phase parse_phase(const std::string& name) {
  for (Phase p : {Phase::setup, Phase::unitary, Phase::dissipator}) {
    if (name == phase_name(p)) return p;
  }
  throw std::invalid_argument("unknown phase '" + name + "'");
}

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

namespace {

template <class Field>
double reduce(const std::vector<ProcessorTiming>& ps, Field field, bool want_max) {
  if (ps.empty()) return 0.0;
  double acc = ps.front().*field;
  for (const auto& p : ps) acc = want_max ? std::max(acc, p.*field) : std::min(acc, p.*field);
  return acc;
}

template <class Field>
double mean(const std::vector<ProcessorTiming>& ps, Field field) {
  if (ps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : ps) sum += p.*field;
  return sum / static_cast<double>(ps.size());
}

}  // namespace

double TimingReport::mean_mac_time() const { return mean(processors, &ProcessorTiming::mac_time); }
double TimingReport::max_mac_time() const { return reduce(processors, &ProcessorTiming::mac_time, true); }
double TimingReport::min_mac_time() const { return reduce(processors, &ProcessorTiming::mac_time, false); }
double TimingReport::mean_comm_time() const { return mean(processors, &ProcessorTiming::comm_time); }
double TimingReport::max_total_time() const { return reduce(processors, &ProcessorTiming::total_time, true); }
double TimingReport::critical_path() const { return reduce(processors, &ProcessorTiming::busy_time, true); }

std::size_t TimingReport::total_messages() const {
  std::size_t n = 0;
  for (const auto& p : processors) n += p.messages_sent;
  return n;
}

void write_timing(std::ostream& os, const TimingReport& report) {
  nlohmann::json doc;
  doc["phase"] = phase_name(report.phase);
  doc["grid_side"] = report.grid_side;
  auto& procs = doc["processors"] = nlohmann::json::array();
  for (const auto& p : report.processors) {
    procs.push_back({{"row", p.coord.row},
                     {"col", p.coord.col},
                     {"mac_time", p.mac_time},
                     {"comm_time", p.comm_time},
                     {"total_time", p.total_time},
                     {"busy_time", p.busy_time},
                     {"messages_sent", p.messages_sent},
                     {"entries_sent", p.entries_sent}});
  }
  doc["aggregate"] = {{"mean_mac_time", report.mean_mac_time()},
                      {"max_mac_time", report.max_mac_time()},
                      {"mean_comm_time", report.mean_comm_time()},
                      {"max_total_time", report.max_total_time()},
                      {"critical_path", report.critical_path()},
                      {"total_messages", report.total_messages()}};
  os << doc.dump(2) << '\n';
}

TimingReport read_timing(std::istream& is) {
  const auto doc = nlohmann::json::parse(is);
  TimingReport report;
  report.phase = parse_phase(doc.at("phase").get<std::string>());
  report.grid_side = doc.at("grid_side").get<int>();
  for (const auto& p : doc.at("processors")) {
    ProcessorTiming t;
    t.coord = {p.at("row").get<int>(), p.at("col").get<int>()};
    t.mac_time = p.at("mac_time").get<double>();
    t.comm_time = p.at("comm_time").get<double>();
    t.total_time = p.at("total_time").get<double>();
    t.busy_time = p.at("busy_time").get<double>();
    t.messages_sent = p.at("messages_sent").get<std::size_t>();
    t.entries_sent = p.at("entries_sent").get<std::size_t>();
    report.processors.push_back(t);
  }
  return report;
}

}  // namespace lqed
