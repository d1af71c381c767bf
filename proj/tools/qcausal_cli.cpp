// qcausal: capacity bounds, sweeps, light cones, QRAM simulation and self-checks.
//
// Exit codes: 0 ok, 1 verification failure, 2 configuration error,
// 3 retrieval mismatch.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qcausal/qcausal.hpp"

namespace {

using namespace qcausal;
using nlohmann::json;

enum Exit : int { kOk = 0, kVerifyFailed = 1, kConfigError = 2, kRetrievalMismatch = 3 };

struct ParamFlags {
  std::string config;
  std::optional<double> a, delta_t, g1, g2, m, c_max;
  std::optional<std::string> lambda;
  std::optional<int> d, nu;

  void attach(CLI::App* app) {
    app->add_option("--config", config, "key = value parameter file");
    app->add_option("--a", a, "lattice spacing [m]");
    app->add_option("--delta_t", delta_t, "clock cycle time [s]");
    app->add_option("--g1", g1, "beam-splitter coupling [rad/s]");
    app->add_option("--g2", g2, "controlled-phase coupling [rad/s]");
    app->add_option("--lambda", lambda, "spring constants, comma separated [kg/s^2]");
    app->add_option("--m", m, "site mass [kg]");
    app->add_option("--d", d, "spatial dimension");
    app->add_option("--nu", nu, "interaction range");
    app->add_option("--c_max", c_max, "speed cap [m/s]");
  }

  /// Config file (if any) under `base`, then explicit flags.
  HardwareParams resolve(HardwareParams base) const {
    if (!config.empty()) base = load_config(config);
    if (a) base.a = *a;
    if (delta_t) base.delta_t = *delta_t;
    if (g1) base.g1 = *g1;
    if (g2) base.g2 = *g2;
    if (m) base.m = *m;
    if (c_max) base.c_max = *c_max;
    if (d) base.d = *d;
    if (lambda) {
      base.lambda = parse_number_list(*lambda);
      if (!nu) base.nu = static_cast<int>(base.lambda.size());
    }
    if (nu) base.nu = *nu;
    return validate(base);
  }
};

struct ConventionFlags {
  std::optional<std::string> log_base, velocity_source;
  std::optional<int> depth_exponent;
  std::optional<double> velocity;

  void attach(CLI::App* app) {
    app->add_option("--log_base", log_base, "natural | 2");
    app->add_option("--depth_exponent", depth_exponent, "p in tau0 log^p N");
    app->add_option("--velocity_source", velocity_source, "lieb_robinson | qft | group | explicit | teleport-hybrid");
    app->add_option("--velocity", velocity, "explicit one-dimensional velocity [m/s]");
  }

  Conventions resolve(Conventions c) const {
    if (log_base) c.log_base = parse_log_base(*log_base);
    if (depth_exponent) c.depth_exponent = *depth_exponent;
    if (velocity) {
      c.explicit_velocity = *velocity;
      c.velocity_source = VelocitySource::explicit_value;
    }
    if (velocity_source) c.velocity_source = parse_velocity_source(*velocity_source);
    return c;
  }
};

json to_json(const Conventions& c) {
  json j{{"log_base", to_string(c.log_base)},
         {"depth_exponent", c.depth_exponent},
         {"velocity_source", to_string(c.velocity_source)}};
  if (c.velocity_source == VelocitySource::explicit_value) j["explicit_velocity"] = c.explicit_velocity;
  return j;
}

json to_json(const HardwareParams& p) {
  return json{{"a", p.a},         {"delta_t", p.delta_t}, {"g1", p.g1}, {"g2", p.g2}, {"lambda", p.lambda},
              {"m", p.m},         {"d", p.d},             {"nu", p.nu}, {"c_max", p.c_max}};
}

json to_json(const BoundResult& r) {
  return json{{"max_qubits_total", r.max_qubits_total},
              {"max_linear_extent", r.max_linear_extent},
              {"velocity_used", r.velocity_used},
              {"ratio", r.ratio},
              {"conventions", to_json(r.conventions)},
              {"inputs", to_json(r.inputs)}};
}

// ---------------------------------------------------------------------------
// bound

struct BoundCommand {
  ParamFlags params;
  ConventionFlags conventions;
  std::string preset;
  std::string formula = "capacity";
  bool json_only = false;

  void attach(CLI::App* app) {
    params.attach(app);
    conventions.attach(app);
    app->add_option("--preset", preset, "naive | sound")->check(CLI::IsMember({"naive", "sound"}));
    app->add_option("--formula", formula, "capacity (tau0 log^p N) or naive (delta_t log N at c_max)")
        ->check(CLI::IsMember({"capacity", "naive"}));
    app->add_flag("--json", json_only, "print only the JSON record");
  }

  int run() {
    HardwareParams base;
    Conventions conv;
    std::string chosen_formula = formula;
    if (preset == "naive") {
      base.a = 1e-6;
      base.delta_t = 1e-3;
      base.c_max = kSpeedOfLight;
      conv.depth_exponent = 1;
      chosen_formula = "naive";
    } else if (preset == "sound") {
      base.a = 1e-6;
      base.delta_t = 1e-3;
      base.g1 = base.g2 = coupling_for_tau0(1e-3);
      conv.velocity_source = VelocitySource::explicit_value;
      conv.explicit_velocity = 6000.0;
    }
    const auto p = params.resolve(base);
    conv = conventions.resolve(conv);

    json record;
    if (chosen_formula == "naive") {
      const double n = naive_max_qubits(p.a, p.delta_t, p.c_max, conv.log_base);
      record = json{{"formula", "naive"},
                    {"max_qubits_total", n},
                    {"max_linear_extent", n},
                    {"velocity_used", p.c_max},
                    {"conventions", json{{"log_base", to_string(conv.log_base)}, {"depth_exponent", 1},
                                         {"velocity_source", "c_max"}}},
                    {"inputs", to_json(p)}};
    } else {
      record = to_json(qram_max_qubits(p, conv));
      record["formula"] = "capacity";
    }
    if (!json_only) {
      std::printf("max qubits (total):   %.6e\n", record["max_qubits_total"].get<double>());
      std::printf("max linear extent:    %.6e\n", record["max_linear_extent"].get<double>());
      std::printf("velocity used [m/s]:  %.6e\n", record["velocity_used"].get<double>());
      std::printf("conventions:          %s\n", record["conventions"].dump().c_str());
    }
    std::printf("%s\n", record.dump().c_str());
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// sweep

sweep::SweepAxis parse_axis(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ':');) parts.push_back(item);
  if (parts.size() < 4 || parts.size() > 5) throw ConfigError("axis must be name:min:max:points[:log|linear]");
  sweep::SweepAxis ax;
  ax.name = parts[0];
  try {
    ax.min = std::stod(parts[1]);
    ax.max = std::stod(parts[2]);
    ax.points = std::stoi(parts[3]);
  } catch (const std::exception&) {
    throw ConfigError("invalid axis '" + text + "'");
  }
  if (parts.size() == 5) {
    if (parts[4] == "log") ax.spacing = sweep::Spacing::log;
    else if (parts[4] == "linear") ax.spacing = sweep::Spacing::linear;
    else throw ConfigError("axis spacing must be log or linear");
  }
  return ax;
}

struct SweepCommand {
  ParamFlags params;
  ConventionFlags conventions;
  std::string preset;
  std::vector<std::string> axes;
  std::optional<std::string> dims;
  std::optional<int> points;
  std::string out;
  unsigned threads = 0;

  void attach(CLI::App* app) {
    params.attach(app);
    conventions.attach(app);
    app->add_option("--preset", preset, "velocity | coupling")->check(CLI::IsMember({"velocity", "coupling"}));
    app->add_option("--axis", axes, "name:min:max:points[:log|linear]; replaces the preset axes");
    app->add_option("--dims", dims, "output dimensions, e.g. 1,2,3");
    app->add_option("--points", points, "points per preset axis");
    app->add_option("--out", out, "CSV path (default: stdout)");
    app->add_option("--threads", threads, "worker threads (0: hardware concurrency)");
  }

  int run() {
    sweep::SweepGrid grid;
    if (preset == "velocity") grid = sweep::velocity_preset(points.value_or(50));
    else if (preset == "coupling") grid = sweep::coupling_preset(points.value_or(40));
    grid.base = params.resolve(grid.base);
    grid.conventions = conventions.resolve(grid.conventions);
    if (!axes.empty()) {
      grid.axes.clear();
      for (const auto& a : axes) grid.axes.push_back(parse_axis(a));
    }
    if (dims) {
      grid.dims.clear();
      for (double v : parse_number_list(*dims, "dims")) grid.dims.push_back(static_cast<int>(v));
    }
    const auto table = sweep::run_sweep(grid, threads);
    if (out.empty()) {
      sweep::write_csv(table, std::cout);
    } else {
      std::ofstream file(out);
      if (!file) throw ConfigError("cannot write '" + out + "'");
      sweep::write_csv(table, file);
      if (!file) throw ConfigError("cannot write '" + out + "'");
      std::fprintf(stderr, "wrote %zu rows to %s (max %.6e)\n", table.rows.size(), out.c_str(),
                   sweep::max_value(table));
    }
    return kOk;
  }
};

// ---------------------------------------------------------------------------
// lightcone

struct LightConeCommand {
  int d = 1;
  int L = 400;
  std::string lambda = "1";
  double m = 1.0;
  double a = 1.0;
  lattice::LightConeOptions options;
  std::string out;

  void attach(CLI::App* app) {
    app->add_option("--d", d, "spatial dimension");
    app->add_option("--L", L, "sites per axis");
    app->add_option("--lambda", lambda, "spring constants, comma separated");
    app->add_option("--m", m, "site mass");
    app->add_option("--a", a, "lattice spacing [m]");
    app->add_option("--threshold", options.threshold, "arrival threshold as a fraction of the peak");
    app->add_option("--r_max", options.r_max, "largest probe distance (0: L/2 - nu)");
    app->add_option("--t_max", options.t_max, "scan horizon (0: automatic)");
    app->add_option("--dt", options.dt, "scan step (0: automatic)");
    app->add_option("--out", out, "CSV of arrivals");
  }

  int run() {
    lattice::LatticeSpec spec{d, L, parse_number_list(lambda), m, a, true};
    lattice::validate(spec);
    const auto cone = lattice::measure_light_cone(spec, options);
    if (!out.empty()) {
      std::ofstream file(out);
      if (!file) throw ConfigError("cannot write '" + out + "'");
      file << "# d=" << d << " L=" << L << " lambda=" << lambda << " m=" << m << " threshold=" << options.threshold
           << " t_max=" << cone.t_max << "\n";
      file << "r,t_arrival,peak\n";
      file.precision(17);
      for (const auto& arr : cone.arrivals) {
        file << arr.r << ',';
        if (arr.t_arrival) file << *arr.t_arrival;
        file << ',' << arr.peak << '\n';
      }
    }
    const bool pass = cone.within_bound();
    std::printf("fitted velocity:      %.6f sites/s (%.6e m/s)\n", cone.fitted_velocity, cone.fitted_velocity_physical);
    std::printf("group velocity:       %.6f sites/s\n", cone.group_velocity);
    std::printf("Lieb-Robinson bound:  %.6f sites/s\n", cone.lr_bound);
    std::printf("%s\n", pass ? "PASS" : "FAIL");
    return pass ? kOk : kVerifyFailed;
  }
};

// ---------------------------------------------------------------------------
// qramsim

struct QramCommand {
  std::string db_path;
  std::optional<std::size_t> random_size;
  std::uint64_t seed = 7;
  std::vector<std::size_t> addresses;
  std::size_t superpositions = 10;
  double g1 = std::numbers::pi;
  double g2 = std::numbers::pi;

  void attach(CLI::App* app) {
    app->add_option("--db", db_path, "database file of '0'/'1' characters");
    app->add_option("--N,--random", random_size, "use a random database of this size");
    app->add_option("--seed", seed, "seed for random databases and address states");
    app->add_option("--address", addresses, "query only these basis addresses (default: all)");
    app->add_option("--superpositions", superpositions, "random superposition queries");
    app->add_option("--g1", g1, "beam-splitter coupling [rad/s]");
    app->add_option("--g2", g2, "controlled-phase coupling [rad/s]");
  }

  int run() {
    qram::ClassicalDatabase db;
    if (!db_path.empty()) db = qram::load_database(db_path);
    else if (random_size) db = qram::random_database(*random_size, seed);
    else throw ConfigError("give --db or --N");
    qram::make_layout(db.depth()).mode_register();  // enforces the state-vector cap up front

    std::printf("database: %s (N=%zu)\n", db.str().c_str(), db.size());
    std::printf("address,expected,read,probability\n");
    bool ok = true;
    double min_fidelity = 1.0;
    auto record = [&](const qram::RetrievalRow& row) {
      std::printf("%zu,%d,%d,%.12f\n", row.address, row.expected, row.read, row.probability);
      ok = ok && row.read == row.expected && row.probability >= 1.0 - 1e-9;
    };
    if (addresses.empty()) {
      const auto report = qram::verify_retrieval(db, seed, superpositions, g1, g2);
      for (const auto& row : report.basis) record(row);
      min_fidelity = report.min_fidelity;
      ok = ok && report.passed();
      std::printf("superposition queries: %zu, max linearity error %.3e, min restoration %.12f\n",
                  report.superpositions, report.max_linearity_error, report.min_restoration);
    } else {
      for (auto x : addresses) {
        if (x >= db.size()) throw ConfigError("address out of range");
        const auto r = qram::simulate_query(db, qram::basis_address(db.size(), x), g1, g2);
        record(r.table.front());
        min_fidelity = std::min(min_fidelity, r.fidelity);
      }
    }
    ok = ok && min_fidelity >= 1.0 - 1e-9;
    std::printf("min fidelity: %.12f\n%s\n", min_fidelity, ok ? "PASS" : "FAIL");
    return ok ? kOk : kRetrievalMismatch;
  }
};

// ---------------------------------------------------------------------------
// verify

struct VerifyCommand {
  bool corrupt = false;
  std::uint64_t seed = 42;

  void attach(CLI::App* app) {
    app->add_option("--seed", seed, "seed for randomized checks");
    app->add_flag("--corrupt-dispersion", corrupt)->group("");  // harness self-test
  }

  int run() {
    verify::Options opt;
    opt.seed = seed;
    if (corrupt) opt.dispersion_scale = 1.01;
    bool ok = true;
    for (const auto& r : verify::run_all(opt)) {
      std::printf("%s %-8s %.3f s\n", r.passed() ? "PASS" : "FAIL", r.name.c_str(), r.seconds);
      for (const auto& f : r.failures) std::printf("    %s\n", f.c_str());
      ok = ok && r.passed();
    }
    return ok ? kOk : kVerifyFailed;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Causality bounds and constructive checks for bucket-brigade QRAM"};
  app.require_subcommand(1);

  BoundCommand bound;
  SweepCommand sweep_cmd;
  LightConeCommand lightcone;
  QramCommand qramsim;
  VerifyCommand verify_cmd;
  bound.attach(app.add_subcommand("bound", "evaluate one capacity bound"));
  sweep_cmd.attach(app.add_subcommand("sweep", "sweep capacity bounds over one or two axes"));
  lightcone.attach(app.add_subcommand("lightcone", "measure the commutator light cone of a harmonic lattice"));
  qramsim.attach(app.add_subcommand("qramsim", "simulate QRAM retrieval on the full state vector"));
  verify_cmd.attach(app.add_subcommand("verify", "run the self-check suites"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (app.got_subcommand("bound")) return bound.run();
    if (app.got_subcommand("sweep")) return sweep_cmd.run();
    if (app.got_subcommand("lightcone")) return lightcone.run();
    if (app.got_subcommand("qramsim")) return qramsim.run();
    if (app.got_subcommand("verify")) return verify_cmd.run();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  } catch (const ConvergenceError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kConfigError;
  }
  return kConfigError;
}
