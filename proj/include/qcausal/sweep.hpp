#pragma once

// Parameter sweeps over capacity bounds, with CSV output.
//
// A grid has one or two axes. Each grid point rewrites the base parameters
// and conventions, then evaluates qram_max_qubits once per requested
// dimension. Points are evaluated on a thread pool; rows come back in grid
// order regardless of completion order.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "qcausal/bounds.hpp"
#include "qcausal/params.hpp"

namespace qcausal::sweep {

enum class Spacing { linear, log };

struct SweepAxis {
  std::string name;  // velocity, tau0, g, g1, g2, lambda_over_m, a, m
  double min = 0.0;
  double max = 0.0;
  int points = 2;
  Spacing spacing = Spacing::linear;

  double value(int i) const {
    if (points == 1) return min;
    const double f = static_cast<double>(i) / (points - 1);
    if (spacing == Spacing::linear) return min + f * (max - min);
    return std::exp(std::log(min) + f * (std::log(max) - std::log(min)));
  }
};

struct SweepGrid {
  std::string label;
  std::vector<SweepAxis> axes;
  HardwareParams base;
  Conventions conventions;
  std::vector<int> dims{1};  // one output column per dimension

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= static_cast<std::size_t>(ax.points);
    return n;
  }
};

inline bool known_axis(const std::string& name) {
  static const char* names[] = {"velocity", "tau0", "g", "g1", "g2", "lambda_over_m", "a", "m"};
  return std::any_of(std::begin(names), std::end(names), [&](const char* n) { return name == n; });
}

inline void validate(const SweepGrid& grid) {
  if (grid.axes.empty() || grid.axes.size() > 2) throw ValidationError("a sweep needs one or two axes");
  for (const auto& ax : grid.axes) {
    if (!known_axis(ax.name)) throw ValidationError("unknown sweep axis '" + ax.name + "'");
    if (ax.points < 2) throw ValidationError("points >= 2 required on axis '" + ax.name + "'");
    if (!(ax.min > 0.0) || !(ax.max >= ax.min) || !std::isfinite(ax.max))
      throw ValidationError("axis '" + ax.name + "' needs 0 < min <= max");
  }
  if (grid.axes.size() == 2 && grid.axes[0].name == grid.axes[1].name) throw ValidationError("duplicate sweep axis");
  if (grid.size() > 1'000'000) throw ValidationError("sweep exceeds 1e6 points");
  if (grid.dims.empty()) throw ValidationError("no output dimensions");
  for (int d : grid.dims)
    if (d < 1 || d > 3) throw ValidationError("dimension must be 1, 2 or 3");
  for (const auto& ax : grid.axes)
    if (ax.name == "velocity" && grid.conventions.velocity_source != VelocitySource::explicit_value)
      throw ValidationError("velocity axis requires the explicit velocity source");
  validate(grid.base);
}

/// Writes one axis value into params / conventions.
inline void apply_axis(const std::string& name, double v, HardwareParams& p, Conventions& c) {
  if (name == "velocity") {
    c.explicit_velocity = v;
  } else if (name == "tau0") {
    p.g1 = p.g2 = coupling_for_tau0(v);
  } else if (name == "g") {
    p.g1 = p.g2 = v;
  } else if (name == "g1") {
    p.g1 = v;
  } else if (name == "g2") {
    p.g2 = v;
  } else if (name == "lambda_over_m") {
    // keep the relative weights of the couplings, rescale their sum
    const double scale = v * p.m / coupling_sum(p.lambda);
    for (double& l : p.lambda) l *= scale;
  } else if (name == "a") {
    p.a = v;
  } else if (name == "m") {
    p.m = v;
  } else {
    throw ValidationError("unknown sweep axis '" + name + "'");
  }
}

struct SweepRow {
  std::vector<double> axis_values;
  std::vector<double> max_qubits;  // parallel to grid.dims
};

struct SweepTable {
  SweepGrid grid;
  std::vector<SweepRow> rows;
};

inline SweepRow evaluate_point(const SweepGrid& grid, std::size_t index) {
  SweepRow row;
  HardwareParams p = grid.base;
  Conventions c = grid.conventions;
  // the last axis varies fastest
  std::size_t rem = index;
  row.axis_values.resize(grid.axes.size());
  for (std::size_t a = grid.axes.size(); a-- > 0;) {
    const auto& ax = grid.axes[a];
    row.axis_values[a] = ax.value(static_cast<int>(rem % static_cast<std::size_t>(ax.points)));
    rem /= static_cast<std::size_t>(ax.points);
  }
  for (std::size_t a = 0; a < grid.axes.size(); ++a) apply_axis(grid.axes[a].name, row.axis_values[a], p, c);
  for (int d : grid.dims) {
    p.d = d;
    row.max_qubits.push_back(qram_max_qubits(p, c).max_qubits_total);
  }
  return row;
}

inline SweepTable run_sweep(const SweepGrid& grid, unsigned threads = 0) {
  validate(grid);
  const std::size_t total = grid.size();
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, total));

  SweepTable table{grid, std::vector<SweepRow>(total)};
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        table.rows[i] = evaluate_point(grid, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = total;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return table;
}

inline std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Single-line description of the fixed inputs of a sweep.
inline std::string metadata_line(const SweepGrid& grid) {
  const auto& p = grid.base;
  std::string out = "# preset=" + (grid.label.empty() ? std::string("custom") : grid.label) + " " +
                    describe(grid.conventions) + " a=" + format_number(p.a) + " delta_t=" +
                    format_number(p.delta_t) + " g1=" + format_number(p.g1) + " g2=" + format_number(p.g2) +
                    " lambda=";
  for (std::size_t j = 0; j < p.lambda.size(); ++j) out += (j ? ";" : "") + format_number(p.lambda[j]);
  out += " m=" + format_number(p.m) + " nu=" + std::to_string(p.nu) + " c_max=" + format_number(p.c_max);
  for (const auto& ax : grid.axes)
    out += " axis=" + ax.name + ":" + format_number(ax.min) + ":" + format_number(ax.max) + ":" +
           std::to_string(ax.points) + ":" + (ax.spacing == Spacing::log ? "log" : "linear");
  return out;
}

inline std::vector<std::string> column_names(const SweepGrid& grid) {
  std::vector<std::string> cols;
  for (const auto& ax : grid.axes) cols.push_back(ax.name);
  for (int d : grid.dims) cols.push_back("max_qubits_d" + std::to_string(d));
  return cols;
}

inline void write_csv(const SweepTable& table, std::ostream& out) {
  out << metadata_line(table.grid) << '\n';
  const auto cols = column_names(table.grid);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const auto& row : table.rows) {
    bool first = true;
    for (double v : row.axis_values) {
      out << (first ? "" : ",") << format_number(v);
      first = false;
    }
    for (double v : row.max_qubits) out << ',' << format_number(v);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Presets

/// Velocity axis 1e2..6e3 m/s against d = 1, 2, 3 at a = 1e-6 m, tau0 = 1e-3 s.
inline SweepGrid velocity_preset(int points = 50) {
  SweepGrid g;
  g.label = "velocity";
  g.axes = {{"velocity", 1e2, 6e3, points, Spacing::log}};
  g.base.a = 1e-6;
  g.base.delta_t = 1e-3;
  g.base.g1 = g.base.g2 = coupling_for_tau0(1e-3);
  g.conventions.velocity_source = VelocitySource::explicit_value;
  g.conventions.depth_exponent = 2;
  g.conventions.explicit_velocity = 1e2;
  g.dims = {1, 2, 3};
  return g;
}

/// Coupling g = g1 = g2 against lambda/m for a one-dimensional chain at a = 1e-3 m,
/// using the Lieb-Robinson velocity.
inline SweepGrid coupling_preset(int points = 40) {
  SweepGrid g;
  g.label = "coupling";
  g.axes = {{"g", 1e-3, 1.0, points, Spacing::log}, {"lambda_over_m", 1e8, 2.25e12, points, Spacing::log}};
  g.base.a = 1e-3;
  g.base.delta_t = 1e-3;
  g.base.m = 1.0;
  g.base.lambda = {1e8};
  g.base.nu = 1;
  g.conventions.velocity_source = VelocitySource::lieb_robinson;
  g.conventions.depth_exponent = 2;
  g.dims = {1};
  return g;
}

inline double max_value(const SweepTable& t) {
  double best = 0.0;
  for (const auto& row : t.rows)
    for (double v : row.max_qubits) best = std::max(best, v);
  return best;
}

}  // namespace qcausal::sweep
