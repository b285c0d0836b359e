#include "commplan/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace commplan {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Keeps the events file one record per line.
std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += "\"\"";
    else if (ch == '\n') out += ' ';
    else out += ch;
  }
  return out + "\"";
}

}  // namespace

std::size_t MetricsLog::violation_count() const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [](const Event& e) { return e.violation; }));
}

std::vector<double> MetricsLog::cumulative_net_trades() const {
  std::vector<double> total(n_robots, 0.0);
  for (const auto& c : cycles)
    for (std::size_t i = 0; i < c.net_trades.size() && i < total.size(); ++i) total[i] += c.net_trades[i];
  return total;
}

StepStats steps_per_cycle(const MetricsLog& log) {
  StepStats s;
  std::vector<double> v;
  for (const auto& c : log.cycles) v.push_back(static_cast<double>(c.steps));
  s.count = v.size();
  if (v.empty()) return s;
  std::sort(v.begin(), v.end());
  s.min = v.front();
  s.max = v.back();
  const std::size_t mid = v.size() / 2;
  s.median = v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  return s;
}

void write_traces(const MetricsLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  {
    auto out = open_csv(dir / "positions.csv");
    const Eigen::Index dim = log.steps.empty() || log.steps.front().positions.empty()
                                 ? 0
                                 : log.steps.front().positions.front().size();
    out << "step,robot";
    for (Eigen::Index a = 0; a < dim; ++a) out << ",x" << a;
    for (Eigen::Index a = 0; a < dim; ++a) out << ",ref_x" << a;
    out << '\n';
    for (const auto& s : log.steps) {
      for (std::size_t i = 0; i < s.positions.size(); ++i) {
        out << s.step << ',' << i;
        for (Eigen::Index a = 0; a < dim; ++a) out << ',' << fmt(s.positions[i](a));
        for (Eigen::Index a = 0; a < dim; ++a) out << ',' << fmt(s.references[i](a));
        out << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "fiedler.csv");
    out << "step,true,est_min,est_max\n";
    for (const auto& s : log.steps)
      out << s.step << ',' << fmt(s.true_lambda2) << ',' << fmt(s.est_min) << ',' << fmt(s.est_max) << '\n';
  }
  {
    auto out = open_csv(dir / "trades.csv");
    out << "cycle,robot,neighbor,t,mu\n";
    for (const auto& t : log.trades)
      out << t.cycle << ',' << t.robot << ',' << t.neighbor << ',' << fmt(t.trade) << ',' << fmt(t.multiplier)
          << '\n';
  }
  {
    auto out = open_csv(dir / "cost.csv");
    out << "cycle,mode,objective\n";
    for (const auto& c : log.costs) out << c.cycle << ',' << c.mode << ',' << fmt(c.objective) << '\n';
  }
  {
    auto out = open_csv(dir / "events.csv");
    out << "step,kind,detail\n";
    for (const auto& e : log.events) out << e.step << ',' << e.kind << ',' << csv_field(e.detail) << '\n';
  }
}

}  // namespace commplan
