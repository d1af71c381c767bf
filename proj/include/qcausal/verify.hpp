#pragma once

// Self-check suites run by `qcausal verify`. Each suite exercises the
// invariants of one module and reports its failures and wall time.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qcausal/bounds.hpp"
#include "qcausal/gates.hpp"
#include "qcausal/lattice.hpp"
#include "qcausal/params.hpp"
#include "qcausal/qram.hpp"
#include "qcausal/sweep.hpp"

namespace qcausal::verify {

struct Options {
  double dispersion_scale = 1.0;  // != 1 corrupts the dispersion check (harness self-test)
  std::uint64_t seed = 42;
};

struct SuiteResult {
  std::string name;
  std::vector<std::string> failures;
  double seconds = 0.0;

  bool passed() const { return failures.empty(); }
};

class Checker {
 public:
  explicit Checker(std::vector<std::string>& sink) : sink_(sink) {}

  void expect(bool ok, const std::string& what) {
    if (!ok) sink_.push_back(what);
  }
  void near(double got, double want, double tol, const std::string& what) {
    if (!(std::abs(got - want) <= tol)) {
      std::ostringstream msg;
      msg.precision(12);
      msg << what << ": got " << got << ", expected " << want << " (tol " << tol << ")";
      sink_.push_back(msg.str());
    }
  }
  void rel(double got, double want, double tol, const std::string& what) {
    near(got, want, tol * std::abs(want), what);
  }

 private:
  std::vector<std::string>& sink_;
};

inline HardwareParams reference_params() {
  HardwareParams p;
  p.a = 1e-6;
  p.delta_t = 1e-3;
  p.g1 = p.g2 = std::numbers::pi * 1e3;
  p.lambda = {1.0};
  p.m = 1.0;
  p.d = 1;
  p.nu = 1;
  return p;
}

inline void params_suite(Checker& c, const Options&) {
  const auto p = reference_params();
  c.expect(validate(validate(p)) == validate(p), "validate is not idempotent");
  const double gs[] = {0.5, 1.0, 3.0, 10.0};
  for (double a : gs) {
    for (double b : gs) {
      c.near(tau0(a, b), tau0(b, a), 0.0, "tau0 not symmetric");
      c.expect(tau0(a * 1.1, b) < tau0(a, b), "tau0 not decreasing in g1");
      c.expect(tau0(a, b * 1.1) < tau0(a, b), "tau0 not decreasing in g2");
    }
  }
}

inline void bounds_suite(Checker& c, const Options&) {
  c.rel(naive_max_qubits(1e-6, 1e-3, 3e8), 8.9e12, 0.02, "naive bound");

  for (double R : {10.0, 1e3, 1e6, 1e9}) {
    for (int p : {1, 2}) {
      const double n = fixed_point_solve(R, p);
      c.rel(n, R * std::pow(std::log(n), p), 1e-9, "fixed-point residual");
    }
  }

  // Monotone in v, tau0 and 1/a.
  Conventions conv;
  conv.velocity_source = VelocitySource::explicit_value;
  const double vs[] = {1e2, 1e3, 1e4};
  const double taus[] = {1e-4, 1e-3, 1e-2};
  const double as[] = {1e-4, 1e-5, 1e-6};
  double previous_v = 0.0;
  for (double v : vs) {
    double previous_tau = 0.0;
    for (double tau : taus) {
      double previous_a = 0.0;
      for (double a : as) {
        auto p = reference_params();
        p.a = a;
        p.g1 = p.g2 = coupling_for_tau0(tau);
        conv.explicit_velocity = v;
        const double n = qram_max_qubits(p, conv).max_qubits_total;
        c.expect(n >= previous_a, "bound not monotone in 1/a");
        previous_a = n;
      }
      c.expect(previous_a >= previous_tau, "bound not monotone in tau0");
      previous_tau = previous_a;
    }
    c.expect(previous_tau >= previous_v, "bound not monotone in v");
    previous_v = previous_tau;
  }

  for (int d : {2, 3}) {
    auto p1 = reference_params();
    auto pd = p1;
    pd.d = d;
    c.rel(lr_velocity(pd).physical / lr_velocity(p1).physical, std::sqrt(d), 1e-12, "LR sqrt(d) scaling");
    c.rel(qft_velocity(coarse_grain(pd), density(p1)) / qft_velocity(coarse_grain(p1), density(p1)),
          std::sqrt(d), 1e-12, "continuum sqrt(d) scaling");
  }
}

inline void lattice_suite(Checker& c, const Options& opt) {
  // Dispersion against eigenvalues of the force-constant matrix.
  for (int d : {1, 2}) {
    lattice::LatticeSpec spec{d, d == 1 ? 12 : 6, {1.0, 0.3}, 1.7, 1.0, true};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lattice::coupling_matrix(spec) / spec.m);
    std::vector<double> want;
    for (double e : eig.eigenvalues()) want.push_back(std::sqrt(std::max(0.0, e)));
    const auto modes = lattice::normal_modes(spec);
    std::vector<double> got;
    for (const auto& k : modes.k) got.push_back(opt.dispersion_scale * lattice::dispersion(spec, k));
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    double worst = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] * got[i] - want[i] * want[i]));
    c.near(worst, 0.0, 1e-9, "dispersion vs force-constant spectrum (d=" + std::to_string(d) + ")");
  }

  // Spectral vs ODE propagator and symplecticity.
  lattice::LatticeSpec spec{1, 8, {1.0}, 1.0, 1.0, true};
  const double w_max = lattice::max_frequency(spec);
  const double t = 10.0 / w_max;
  const auto S = lattice::propagate(spec, t);
  const auto S_ode = lattice::propagate_ode(spec, t, 0.01 / w_max);
  c.near((S.dense() - S_ode.dense()).cwiseAbs().maxCoeff(), 0.0, 1e-6, "spectral vs ODE propagator");

  std::mt19937_64 rng(7);
  std::normal_distribution<double> gauss;
  const auto n = static_cast<Eigen::Index>(2 * spec.sites());
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    Eigen::VectorXd u(n), v(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      u[j] = gauss(rng);
      v[j] = gauss(rng);
    }
    worst = std::max(worst, std::abs(lattice::symplectic_form(S.apply(u), S.apply(v)) - lattice::symplectic_form(u, v)));
  }
  c.near(worst, 0.0, 1e-10, "symplectic form preservation");

  // Small light cone stays inside the Lieb-Robinson cone.
  lattice::LatticeSpec chain{1, 200, {1.0}, 1.0, 1.0, true};
  const auto cone = lattice::measure_light_cone(chain);
  c.expect(cone.within_bound(), "fitted light-cone velocity exceeds the Lieb-Robinson bound");
  c.rel(cone.fitted_velocity, cone.group_velocity, 0.1, "fitted light-cone velocity vs group velocity");
}

inline void gates_suite(Checker& c, const Options&) {
  const double g1 = 1.3, g2 = 0.7;
  const auto times = gates::gate_times(g1, g2);
  for (int i = 0; i < 20; ++i) {
    const double t = 0.17 * i;
    const auto U = gates::bs_unitary(g1, t);
    c.expect(gates::is_unitary(U), "beam splitter not unitary");
    c.near(std::norm(U(1, 2)), std::pow(std::sin(g1 * t), 2), 1e-9, "beam-splitter transfer probability");
  }
  c.near(((gates::bs_unitary(g1, 0.3) * gates::bs_unitary(g1, 0.5)) - gates::bs_unitary(g1, 0.8)).cwiseAbs().maxCoeff(),
         0.0, 1e-10, "beam-splitter duration additivity");
  c.near(std::abs(gates::cz_unitary(g2, times.t_cz)(3, 3) + 1.0), 0.0, 1e-10, "CZ phase on |11>");
  c.expect(gates::gauge_equivalent(gates::cswap_composite(g1, g2), gates::fredkin()).equivalent,
           "controlled-SWAP composite not gauge equivalent to Fredkin");
  c.expect(gates::gauge_equivalent(gates::cswap_composite(g1, g2, gates::SecondSplitter::inverse, gates::CzArm::second),
                                   gates::fredkin())
               .equivalent,
           "controlled-SWAP with CZ on the second arm not gauge equivalent to Fredkin");
  c.near(gates::duration(gates::ControlledSwap{0, 1, 2, g1, g2}), 2 * times.t_bs + times.t_cz, 0.0, "CSWAP duration");
}

inline void qram_suite(Checker& c, const Options& opt) {
  for (int n = 1; n <= 6; ++n) {
    const auto counts = qram::count_gates(qram::schedule_initialization(n));
    c.expect(counts.swaps == static_cast<std::size_t>(n), "initialization SWAP count");
    c.expect(counts.routing_cswaps == static_cast<std::size_t>(n * (n - 1) / 2), "initialization CSWAP count");
  }
  const double g = std::numbers::pi * 1e3;
  auto ratio = [&](int n) {
    return qram::total_time(qram::schedule_initialization(n), qram::schedule_query(n), g, g) / (tau0(g, g) * n * n);
  };
  c.rel(ratio(20), ratio(19), 0.05, "T / (tau0 n^2) between n=19 and n=20");

  for (std::size_t N : {2u, 4u, 8u}) {
    const auto report = qram::verify_retrieval(qram::random_database(N, opt.seed), opt.seed, 3);
    c.expect(report.passed(), "retrieval failed for N=" + std::to_string(N));
  }
}

inline void sweep_suite(Checker& c, const Options&) {
  const auto table = sweep::run_sweep(sweep::velocity_preset(12));
  std::vector<double> previous(3, 0.0);
  for (const auto& row : table.rows) {
    for (std::size_t d = 0; d < 3; ++d) {
      c.expect(std::isfinite(row.max_qubits[d]), "non-finite sweep value");
      c.expect(row.max_qubits[d] >= previous[d], "sweep column not monotone");
      previous[d] = row.max_qubits[d];
    }
    c.expect(row.max_qubits[0] <= row.max_qubits[1] && row.max_qubits[1] <= row.max_qubits[2],
             "sweep columns not ordered by dimension");
  }
}

inline std::vector<SuiteResult> run_all(const Options& opt = {}) {
  const std::vector<std::pair<std::string, std::function<void(Checker&, const Options&)>>> suites = {
      {"params", params_suite}, {"bounds", bounds_suite}, {"lattice", lattice_suite},
      {"gates", gates_suite},   {"qram", qram_suite},     {"sweep", sweep_suite},
  };
  std::vector<SuiteResult> out;
  for (const auto& [name, body] : suites) {
    SuiteResult r{name, {}, 0.0};
    Checker c(r.failures);
    const auto start = std::chrono::steady_clock::now();
    try {
      body(c, opt);
    } catch (const std::exception& e) {
      r.failures.push_back(std::string("exception: ") + e.what());
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace qcausal::verify
