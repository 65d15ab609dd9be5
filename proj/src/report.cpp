// Copyright 2026 The pdrive Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "pdrive/report.hpp"

#include "pdrive/dynamics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

namespace pdrive::report {

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string f2(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

const char* color(std::size_t i) {
  static const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  return kColors[i % 6];
}

std::vector<std::string> vehicle_names(const sim::SimLog& log) {
  std::vector<std::string> names;
  if (!log.records.empty())
    for (const auto& v : log.records.front().vehicles) names.push_back(v.name);
  return names;
}

struct Axis {
  double lo, hi;
};

// Round bounds and a tick step of 1, 2 or 5 times a power of ten.
double tick_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

// Right-aligned row of names in the title line.
void legend(std::ostream& s, const std::vector<std::string>& names, double right) {
  double x = right;
  for (std::size_t i = names.size(); i-- > 0;) {
    s << "<text x=\"" << f2(x) << "\" y=\"18\" text-anchor=\"end\" fill=\"" << color(i)
      << "\">" << names[i] << "</text>\n";
    x -= 8.0 * static_cast<double>(names[i].size()) + 16.0;
  }
}

}  // namespace

void write_csv(const sim::SimLog& log, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const sim::StepRecord& r : log.records) {
    for (const sim::VehicleRecord& v : r.vehicles) {
      out << r.step << ',' << g9(r.time_s) << ',' << v.name << ',' << g9(v.state.x) << ','
          << g9(v.state.y) << ',' << g9(normalize_angle(v.state.theta)) << ',' << g9(v.state.v)
          << ',' << g9(v.input.a) << ',' << g9(v.input.delta) << ',' << g9(v.omega_hat) << ','
          << g9(r.alpha) << ',' << g9(r.beta) << ',' << g9(r.j_total) << ',' << v.status << '\n';
    }
  }
}

std::string metrics_json(const sim::SimLog& log) {
  using nlohmann::json;
  double min_omega = std::numeric_limits<double>::infinity();
  double ego_cost = 0.0;
  int fallback = 0;
  int converged = 0;
  int solved = 0;
  std::map<std::string, std::pair<double, int>> speed;
  for (const sim::StepRecord& r : log.records) {
    min_omega = std::min(min_omega, r.min_omega);
    for (const sim::VehicleRecord& v : r.vehicles) {
      auto& [sum, n] = speed[v.name];
      sum += v.state.v;
      ++n;
    }
    if (r.vehicles.empty()) continue;
    const std::string& st = r.vehicles.front().status;
    if (st == "final" || st == "breach") continue;
    ++solved;
    if (st == "fallback") ++fallback;
    if (st == "converged") ++converged;
    if (std::isfinite(r.j_total)) ego_cost += r.j_total;
  }
  json mean = json::object();
  for (const auto& [name, sn] : speed) mean[name] = sn.first / sn.second;
  json doc = {{"scenario", log.scenario},
              {"outcome", sim::to_string(log.outcome)},
              {"completion_step", log.completion_step >= 0 ? json(log.completion_step) : json()},
              {"steps", solved},
              {"min_pairwise_omega", std::isfinite(min_omega) ? json(min_omega) : json()},
              {"mean_speed_mps", mean},
              {"total_ego_cost", ego_cost},
              {"converged_steps", converged},
              {"fallback_steps", fallback}};
  if (!log.breach.empty()) doc["breach"] = log.breach;
  return doc.dump(2) + "\n";
}

std::string trajectory_svg(const sim::SimLog& log, const sim::ScenarioConfig& cfg, int every) {
  if (log.records.empty()) throw Error(ErrorCode::kInvalidArgument, "empty log");
  every = std::max(1, every);
  Axis ax{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  Axis ay{cfg.lane.y_min, cfg.lane.y_max};
  for (const auto& r : log.records)
    for (const auto& v : r.vehicles) {
      ax.lo = std::min(ax.lo, v.state.x - 0.4);
      ax.hi = std::max(ax.hi, v.state.x + 0.4);
      ay.lo = std::min(ay.lo, v.state.y - 0.4);
      ay.hi = std::max(ay.hi, v.state.y + 0.4);
    }
  const double ml = 60, mr = 20, mt = 30, mb = 50;
  const double scale = std::min(900.0 / (ax.hi - ax.lo), 700.0 / (ay.hi - ay.lo));
  const double w = (ax.hi - ax.lo) * scale;
  const double h = (ay.hi - ay.lo) * scale;
  const auto px = [&](double x) { return ml + (x - ax.lo) * scale; };
  const auto py = [&](double y) { return mt + (ay.hi - y) * scale; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(ml + w + mr) << "\" height=\""
    << f2(mt + h + mb) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << f2(ml) << "\" y=\"18\">" << log.scenario << " trajectories</text>\n";
  s << "<clipPath id=\"plot\"><rect x=\"" << f2(ml) << "\" y=\"" << f2(mt) << "\" width=\""
    << f2(w) << "\" height=\"" << f2(h) << "\"/></clipPath>\n<g clip-path=\"url(#plot)\">\n";

  // Road surface: the ego lanes, plus each agent corridor that crosses them.
  const auto band = [&](double heading, double lo, double hi) {
    const double c = std::cos(heading), sn = std::sin(heading);
    const double L = 100.0;
    const Vec2 n(-sn, c), d(c, sn);
    const Vec2 pts[4] = {lo * n - L * d, lo * n + L * d, hi * n + L * d, hi * n - L * d};
    s << "<polygon fill=\"#e8e8e8\" points=\"";
    for (int i = 0; i < 4; ++i) s << (i ? " " : "") << f2(px(pts[i][0])) << ',' << f2(py(pts[i][1]));
    s << "\"/>\n";
  };
  band(0.0, cfg.lane.y_min, cfg.lane.y_max);
  for (const auto& a : cfg.agents) {
    const double hd = a.config.reference.heading;
    if (std::abs(std::sin(hd)) > 1e-9)
      band(hd, a.config.reference.corridor_min, a.config.reference.corridor_max);
  }
  for (double y : {cfg.lane.y_min, cfg.lane.y_max})
    s << "<line x1=\"" << f2(ml) << "\" y1=\"" << f2(py(y)) << "\" x2=\"" << f2(ml + w)
      << "\" y2=\"" << f2(py(y)) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  for (double y = cfg.lane.y_min + cfg.lane.w_l; y < cfg.lane.y_max - 1e-9; y += cfg.lane.w_l)
    s << "<line x1=\"" << f2(ml) << "\" y1=\"" << f2(py(y)) << "\" x2=\"" << f2(ml + w)
      << "\" y2=\"" << f2(py(y)) << "\" stroke=\"black\" stroke-dasharray=\"8,6\"/>\n";

  const std::vector<std::string> names = vehicle_names(log);
  for (std::size_t i = 0; i < names.size(); ++i) {
    const VehicleDims dims = i == 0 ? cfg.dims : cfg.agents[i - 1].config.dims;
    for (std::size_t k = 0; k < log.records.size(); k += static_cast<std::size_t>(every)) {
      const auto& v = log.records[k].vehicles[i];
      s << "<polygon fill=\"" << color(i) << "\" fill-opacity=\"0.15\" stroke=\"" << color(i)
        << "\" stroke-width=\"0.8\" points=\"";
      bool first = true;
      for (const Vec2& c : dynamics::corners(v.state, dims)) {
        s << (first ? "" : " ") << f2(px(c[0])) << ',' << f2(py(c[1]));
        first = false;
      }
      s << "\"/>\n";
    }
    s << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\""
      << (i == 0 ? "2.5" : "1.5") << "\"" << (i == 0 ? "" : " stroke-dasharray=\"6,3\"")
      << " points=\"";
    for (std::size_t k = 0; k < log.records.size(); ++k) {
      const auto& v = log.records[k].vehicles[i];
      s << (k ? " " : "") << f2(px(v.state.x)) << ',' << f2(py(v.state.y));
    }
    s << "\"/>\n";
  }
  s << "</g>\n";

  // Axes.
  s << "<rect x=\"" << f2(ml) << "\" y=\"" << f2(mt) << "\" width=\"" << f2(w) << "\" height=\""
    << f2(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double tx = tick_step(ax.hi - ax.lo, 10);
  for (double x = std::ceil(ax.lo / tx) * tx; x <= ax.hi; x += tx)
    s << "<text x=\"" << f2(px(x)) << "\" y=\"" << f2(mt + h + 16)
      << "\" text-anchor=\"middle\">" << g9(std::round(x / tx) * tx + 0.0) << "</text>\n";
  const double ty = tick_step(ay.hi - ay.lo, 6);
  for (double y = std::ceil(ay.lo / ty) * ty; y <= ay.hi; y += ty)
    s << "<text x=\"" << f2(ml - 6) << "\" y=\"" << f2(py(y) + 4) << "\" text-anchor=\"end\">"
      << g9(std::round(y / ty) * ty + 0.0) << "</text>\n";
  s << "<text x=\"" << f2(ml + w / 2) << "\" y=\"" << f2(mt + h + 38)
    << "\" text-anchor=\"middle\">x [m]</text>\n";
  s << "<text x=\"16\" y=\"" << f2(mt + h / 2) << "\" transform=\"rotate(-90 16 " << f2(mt + h / 2)
    << ")\" text-anchor=\"middle\">y [m]</text>\n";
  legend(s, names, ml + w);
  s << "</svg>\n";
  return s.str();
}

std::string speed_svg(const sim::SimLog& log) {
  if (log.records.empty()) throw Error(ErrorCode::kInvalidArgument, "empty log");
  const double ml = 60, mr = 20, mt = 30, mb = 50, w = 720, h = 300;
  const double t_hi = std::max(log.records.back().time_s, 1e-9);
  double v_hi = 0.0;
  for (const auto& r : log.records)
    for (const auto& v : r.vehicles) v_hi = std::max(v_hi, v.state.v);
  v_hi = std::max(0.1, v_hi * 1.1);
  const auto px = [&](double t) { return ml + t / t_hi * w; };
  const auto py = [&](double v) { return mt + (1.0 - v / v_hi) * h; };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(ml + w + mr) << "\" height=\""
    << f2(mt + h + mb) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << f2(ml) << "\" y=\"18\">" << log.scenario << " speeds</text>\n";
  s << "<rect x=\"" << f2(ml) << "\" y=\"" << f2(mt) << "\" width=\"" << f2(w) << "\" height=\""
    << f2(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const double tt = tick_step(t_hi, 10);
  for (double t = 0.0; t <= t_hi + 1e-9; t += tt)
    s << "<text x=\"" << f2(px(t)) << "\" y=\"" << f2(mt + h + 16) << "\" text-anchor=\"middle\">"
      << g9(std::round(t / tt) * tt) << "</text>\n";
  const double tv = tick_step(v_hi, 6);
  for (double v = 0.0; v <= v_hi + 1e-9; v += tv) {
    s << "<line x1=\"" << f2(ml) << "\" y1=\"" << f2(py(v)) << "\" x2=\"" << f2(ml + w)
      << "\" y2=\"" << f2(py(v)) << "\" stroke=\"#dddddd\"/>\n";
    s << "<text x=\"" << f2(ml - 6) << "\" y=\"" << f2(py(v) + 4) << "\" text-anchor=\"end\">"
      << g9(std::round(v / tv) * tv) << "</text>\n";
  }
  s << "<text x=\"" << f2(ml + w / 2) << "\" y=\"" << f2(mt + h + 38)
    << "\" text-anchor=\"middle\">time [s]</text>\n";
  s << "<text x=\"16\" y=\"" << f2(mt + h / 2) << "\" transform=\"rotate(-90 16 " << f2(mt + h / 2)
    << ")\" text-anchor=\"middle\">speed [m/s]</text>\n";
  const std::vector<std::string> names = vehicle_names(log);
  for (std::size_t i = 0; i < names.size(); ++i) {
    s << "<polyline fill=\"none\" stroke=\"" << color(i) << "\" stroke-width=\""
      << (i == 0 ? "2.5" : "1.5") << "\" points=\"";
    for (std::size_t k = 0; k < log.records.size(); ++k) {
      const auto& r = log.records[k];
      s << (k ? " " : "") << f2(px(r.time_s)) << ',' << f2(py(r.vehicles[i].state.v));
    }
    s << "\"/>\n";
  }
  legend(s, names, ml + w);
  s << "</svg>\n";
  return s.str();
}

void write_log(const sim::SimLog& log, const std::filesystem::path& dir) {
  ensure_dir(dir);
  std::ostringstream csv;
  write_csv(log, csv);
  write_file(dir / "trajectory.csv", csv.str());
  write_file(dir / "metrics.json", metrics_json(log));
}

void plot(const sim::SimLog& log, const sim::ScenarioConfig& cfg,
          const std::filesystem::path& dir) {
  ensure_dir(dir);
  write_file(dir / "trajectory.svg", trajectory_svg(log, cfg));
  write_file(dir / "speed.svg", speed_svg(log));
}

}  // namespace pdrive::report
