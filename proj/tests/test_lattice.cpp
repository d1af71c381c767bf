#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "qcausal/lattice.hpp"

using namespace qcausal;
using namespace qcausal::lattice;
using cd = std::complex<double>;

namespace {

LatticeSpec make(int d, int L, std::vector<double> lambda = {1.0}, double m = 1.0) {
  return validate(LatticeSpec{d, L, std::move(lambda), m, 1.0, true});
}

std::vector<double> sorted_dispersion(const LatticeSpec& spec) {
  std::vector<double> w;
  for (const auto& k : normal_modes(spec).k) w.push_back(dispersion(spec, k));
  std::sort(w.begin(), w.end());
  return w;
}

std::vector<double> sorted_eigenfrequencies(const LatticeSpec& spec) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(coupling_matrix(spec) / spec.m);
  std::vector<double> w;
  for (double e : eig.eigenvalues()) w.push_back(std::sqrt(std::max(0.0, e)));
  std::sort(w.begin(), w.end());
  return w;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

// ---------------------------------------------------------------------------
// Spec

TEST(LatticeSpec, RangeMustFit) {
  try {
    make(1, 4, {1.0, 1.0});
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "L too small for range");
  }
  EXPECT_NO_THROW(make(1, 6, {1.0, 1.0}));
}

// ---------------------------------------------------------------------------
// Dispersion

TEST(Dispersion, Examples) {
  EXPECT_NEAR(dispersion(make(1, 16), {std::numbers::pi, 0, 0}), 2.0, 1e-15);
  EXPECT_EQ(dispersion(make(2, 8, {1.0, 0.5}), {0, 0, 0}), 0.0);
  EXPECT_NEAR(dispersion(make(2, 8), {std::numbers::pi, std::numbers::pi, 0}), std::sqrt(8.0), 1e-14);
}

TEST(Dispersion, MatchesForceConstantSpectrum) {
  const std::vector<LatticeSpec> specs = {make(1, 16), make(1, 32, {1.0, 0.4, 0.1}, 2.5), make(2, 8, {1.0, 0.5}),
                                          make(3, 4, {0.8}, 0.6)};
  for (const auto& spec : specs) {
    const auto got = sorted_dispersion(spec);
    const auto want = sorted_eigenfrequencies(spec);
    ASSERT_EQ(got.size(), want.size());
    // squared frequencies: sqrt amplifies rounding of the zero mode
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i] * got[i], want[i] * want[i], 1e-9);
  }
}

TEST(Dispersion, EvenAndNonnegative) {
  const auto spec = make(2, 8, {1.0, 0.3});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 200; ++i) {
    const KVector k{u(rng), u(rng), 0.0};
    const KVector mk{-k[0], -k[1], 0.0};
    EXPECT_GE(dispersion(spec, k), 0.0);
    EXPECT_NEAR(dispersion(spec, k), dispersion(spec, mk), 1e-14);
  }
}

TEST(Dispersion, GroupVelocityIsGradient) {
  const auto spec = make(2, 8, {1.0, 0.7});
  const KVector k{0.4, -1.1, 0.0};
  const auto v = group_velocity(spec, k);
  const double h = 1e-6;
  for (int b = 0; b < 2; ++b) {
    KVector kp = k, km = k;
    kp[b] += h;
    km[b] -= h;
    EXPECT_NEAR(v[b], (dispersion(spec, kp) - dispersion(spec, km)) / (2 * h), 1e-8);
  }
}

TEST(GroupVelocity, NearestNeighbourChain) {
  const auto g = max_group_velocity(make(1, 16));
  EXPECT_NEAR(g.lattice_units, 1.0, 1e-12);
  EXPECT_NEAR(g.long_wavelength, 1.0, 1e-12);
}

TEST(GroupVelocity, NextNearestChain) {
  const auto g = max_group_velocity(make(1, 16, {1.0, 1.0}));
  EXPECT_NEAR(g.long_wavelength, std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(g.lattice_units, 2.2360679775, 1e-9);
}

TEST(GroupVelocity, VanishingCoupling) {
  EXPECT_NEAR(max_group_velocity(make(1, 16, {1e-14})).lattice_units, 1e-7, 1e-12);
}

TEST(GroupVelocity, PhysicalUnits) {
  auto spec = make(1, 16, {4.0});
  spec.a = 1e-6;
  EXPECT_NEAR(max_group_velocity(spec).physical, 2e-6, 1e-15);
}

TEST(GroupVelocity, AxisSlopeIndependentOfDimension) {
  for (int d : {1, 2, 3}) {
    const auto spec = make(d, 8, {1.0, 0.5});
    EXPECT_NEAR(long_wavelength_slope(spec, {1.0, 0.0, 0.0}), std::sqrt(3.0), 1e-12);
    EXPECT_NEAR(lieb_robinson_speed(spec) / lieb_robinson_speed(make(1, 8, {1.0, 0.5})), std::sqrt(d), 1e-12);
  }
}

// ---------------------------------------------------------------------------
// Propagators

TEST(Propagator, IdentityAtZero) {
  const auto spec = make(2, 6, {1.0, 0.5});
  const auto S = propagate(spec, 0.0).dense();
  EXPECT_LT(max_abs(S - Eigen::MatrixXd::Identity(S.rows(), S.cols())), 1e-14);
  const auto S_ode = propagate_ode(make(1, 8), 0.0, 1e-3).dense();
  EXPECT_LT(max_abs(S_ode - Eigen::MatrixXd::Identity(S_ode.rows(), S_ode.cols())), 1e-15);
}

TEST(Propagator, MatchesOdeOnSmallChain) {
  const auto spec = make(1, 4);
  EXPECT_LT(max_abs(propagate(spec, 0.1).dense() - propagate_ode(spec, 0.1, 1e-4).dense()), 1e-6);
}

TEST(Propagator, MatchesOdeOnChainOfEight) {
  const auto spec = make(1, 8);
  EXPECT_LT(max_abs(propagate(spec, 1.0).dense() - propagate_ode(spec, 1.0, 1e-4).dense()), 1e-6);
}

TEST(Propagator, MatchesOdeUpToTenOverOmegaMax) {
  for (const auto& spec : {make(1, 8, {1.0, 0.5}, 2.0), make(2, 6, {0.6})}) {
    const double w = max_frequency(spec);
    for (double t : {1.0 / w, 4.0 / w, 10.0 / w})
      EXPECT_LT(max_abs(propagate(spec, t).dense() - propagate_ode(spec, t, 0.01 / w).dense()), 1e-6);
  }
}

TEST(Propagator, OdeRejectsLargeStep) {
  const auto spec = make(1, 8);
  try {
    propagate_ode(spec, 1.0, 1.0 / max_frequency(spec));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_STREQ(e.what(), "step too large");
  }
}

TEST(Propagator, TimeReversal) {
  const auto spec = make(1, 10, {1.0, 0.2});
  const auto fwd = propagate(spec, 2.3).dense();
  const auto back = propagate(spec, -2.3).dense();
  EXPECT_LT(max_abs(back * fwd - Eigen::MatrixXd::Identity(fwd.rows(), fwd.cols())), 1e-9);
}

TEST(Propagator, GroupProperty) {
  const auto spec = make(2, 6, {1.0, 0.4});
  const auto a = propagate(spec, 0.7).dense();
  const auto b = propagate(spec, 1.9).dense();
  EXPECT_LT(max_abs(propagate(spec, 2.6).dense() - a * b), 1e-9);
}

TEST(Propagator, PreservesSymplecticForm) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> uni(0.2, 2.0);
  for (int d : {1, 2}) {
    for (int nu : {1, 2}) {
      std::vector<double> lambda;
      for (int j = 0; j < nu; ++j) lambda.push_back(uni(rng));
      const auto spec = make(d, d == 1 ? 12 : 6, lambda, uni(rng));
      const auto S = propagate(spec, 5.0 * uni(rng));
      const auto n = static_cast<Eigen::Index>(2 * spec.sites());
      for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd u(n), v(n);
        for (Eigen::Index i = 0; i < n; ++i) {
          u[i] = gauss(rng);
          v[i] = gauss(rng);
        }
        EXPECT_NEAR(symplectic_form(S.apply(u), S.apply(v)), symplectic_form(u, v), 1e-10);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Weyl commutators

TEST(Weyl, Examples) {
  const auto spec = make(1, 8);
  const WeylFunction f{{0, {1.0, 0.0}}};
  const WeylFunction g_far{{3, {0.0, 1.0}}};
  EXPECT_NEAR(weyl_commutator_norm(spec, f, g_far, 0.0), 0.0, 1e-15);
  const WeylFunction h{{0, {0.4, -0.2}}, {1, {1.0, 0.5}}};
  EXPECT_NEAR(weyl_commutator_norm(spec, h, h, 0.0), 0.0, 1e-15);
  const WeylFunction g{{0, {0.0, 1.0}}};
  EXPECT_NEAR(weyl_commutator_norm(spec, f, g, 0.0), 2.0 * std::sin(0.5), 1e-15);
  EXPECT_NEAR(weyl_commutator_norm(spec, f, g, 0.0), 0.958851077208406, 1e-12);
}

TEST(Weyl, RejectsSupportOutsideLattice) {
  const auto spec = make(1, 8);
  EXPECT_THROW(weyl_commutator_norm(spec, {{8, {1.0, 0.0}}}, {{0, {0.0, 1.0}}}, 0.0), ValidationError);
}

TEST(Weyl, BoundedByTwo) {
  const auto spec = make(1, 8);
  const WeylFunction f{{0, {3.0, 1.0}}, {2, {-2.0, 0.5}}};
  const WeylFunction g{{1, {0.0, 4.0}}, {2, {1.5, -2.0}}};
  for (double t = 0.0; t < 10.0; t += 0.37) {
    const double v = weyl_commutator_norm(spec, f, g, t);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 2.0);
  }
}

namespace {

// Two bosonic modes, each truncated at `cut` levels. Returns the norm of
// [W(f), W(g)] restricted to inputs with at most one quantum per mode, where
// the truncation error of exp(i(x q + y p)) stays small.
double fock_commutator_norm(const WeylFunction& f, const WeylFunction& g, int cut) {
  const int dim = cut * cut;
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(cut, cut);
  for (int n = 1; n < cut; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(cut, cut);
  const Eigen::MatrixXcd q1 = (a + a.adjoint()) / std::sqrt(2.0);
  const Eigen::MatrixXcd p1 = cd(0.0, 1.0) * (a.adjoint() - a) / std::sqrt(2.0);
  auto kron = [](const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    Eigen::MatrixXcd out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
      for (Eigen::Index j = 0; j < A.cols(); ++j) out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
  };
  const Eigen::MatrixXcd q[2] = {kron(q1, id), kron(id, q1)};
  const Eigen::MatrixXcd p[2] = {kron(p1, id), kron(id, p1)};
  auto weyl = [&](const WeylFunction& w) {
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [site, amp] : w) G += amp.real() * q[site] + amp.imag() * p[site];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const Eigen::VectorXcd phase = (eig.eigenvalues().cast<cd>() * cd(0.0, 1.0)).array().exp().matrix();
    return Eigen::MatrixXcd(eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint());
  };
  const Eigen::MatrixXcd Wf = weyl(f), Wg = weyl(g);
  const Eigen::MatrixXcd C = Wf * Wg - Wg * Wf;
  Eigen::MatrixXcd restricted(dim, 4);
  int col = 0;
  for (int n0 = 0; n0 < 2; ++n0)
    for (int n1 = 0; n1 < 2; ++n1) restricted.col(col++) = C.col(n0 * cut + n1);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(restricted).singularValues()[0];
}

}  // namespace

TEST(Weyl, MatchesTruncatedFockSpace) {
  const auto spec = make(1, 4);
  const WeylFunction f{{0, {1.0, 0.0}}};
  const WeylFunction g{{0, {0.0, 1.0}}};
  EXPECT_NEAR(fock_commutator_norm(f, g, 6), weyl_commutator_norm(spec, f, g, 0.0), 1e-3);

  const WeylFunction f2{{0, {0.6, 0.3}}, {1, {0.2, 0.0}}};
  const WeylFunction g2{{0, {-0.1, 0.5}}, {1, {0.4, 0.7}}};
  EXPECT_NEAR(fock_commutator_norm(f2, g2, 6), weyl_commutator_norm(spec, f2, g2, 0.0), 1e-3);
}

// ---------------------------------------------------------------------------
// Envelope

TEST(Envelope, Examples) {
  const auto spec = make(1, 8);
  EXPECT_DOUBLE_EQ(lr_bound_envelope(spec, {1.0, 1.0}, 0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(lr_constant(1, {1.0}, 1.0), 1.0);
  EXPECT_NEAR(lr_bound_envelope(spec, {1.0, 1.0}, 10.0, 0.0), 4.5399929762484854e-5, 1e-18);
  EXPECT_THROW(lr_bound_envelope(spec, {0.0, 1.0}, 1.0, 0.0), ValidationError);
}

TEST(Envelope, DominatesCalibratedRay) {
  // Calibrate C at (r, t_c); the measured norm rises faster than the envelope
  // before arrival, so it stays below for t < t_c.
  const auto spec = make(1, 64);
  const AxisProbe probe(spec, 30);
  const LRBoundParams unit{1.0, 1.0};
  for (int r : {10, 20, 30}) {
    const double t_c = 0.2 * r;
    const LRBoundParams bp{probe.norm(r, t_c) / lr_bound_envelope(spec, unit, r, t_c), 1.0};
    for (double t = 0.05 * t_c; t <= t_c; t += 0.05 * t_c)
      EXPECT_LE(probe.norm(r, t), lr_bound_envelope(spec, bp, r, t) * (1.0 + 1e-9) + 1e-14) << r << " " << t;
  }
}

// ---------------------------------------------------------------------------
// Light cones

TEST(LightCone, AxisProbeMatchesPropagator) {
  const auto spec = make(2, 8, {1.0, 0.3});
  const AxisProbe probe(spec, 2);
  for (double t : {0.3, 1.7}) {
    const auto S = propagate(spec, t);
    for (int r = 0; r <= 2; ++r) {
      const WeylFunction f{{0, {1.0, 0.0}}};
      const WeylFunction g{{site_index(spec, {r, 0, 0}), {0.0, 1.0}}};
      EXPECT_NEAR(probe.norm(r, t), weyl_commutator_norm(S, f, g), 1e-12);
    }
  }
}

TEST(LightCone, NearestNeighbourChain) {
  const auto cone = measure_light_cone(make(1, 400));
  EXPECT_NEAR(cone.fitted_velocity, 1.0, 0.1);
  EXPECT_LT(cone.fitted_velocity, 4.0);
  EXPECT_DOUBLE_EQ(cone.lr_bound, 4.0);
  EXPECT_TRUE(cone.within_bound());
  EXPECT_EQ(cone.arrivals.size(), 199u);
}

TEST(LightCone, ScalesWithSqrtLambda) {
  const double v1 = measure_light_cone(make(1, 200)).fitted_velocity;
  const double v4 = measure_light_cone(make(1, 200, {4.0})).fitted_velocity;
  EXPECT_NEAR(v4 / v1, 2.0, 0.2);
}

TEST(LightCone, TwoDimensionalAxisStaysBelowBound) {
  const auto cone = measure_light_cone(make(2, 32));
  EXPECT_DOUBLE_EQ(cone.lr_bound, 4.0 * std::sqrt(2.0));
  EXPECT_TRUE(cone.within_bound());
}

TEST(LightCone, CausalTailIsNegligible) {
  for (const auto& spec : {make(1, 200), make(1, 200, {1.0, 1.0}), make(2, 32)}) {
    const int r_max = spec.L / 2 - spec.range();
    const AxisProbe probe(spec, r_max);
    const double v = lieb_robinson_speed(spec);
    std::vector<double> sigma;
    for (double t = 0.0; t <= (r_max - 5) / v; t += 0.05) {
      probe.sigma_all(t, sigma);
      for (int r = 1; r <= r_max; ++r)
        if (r - v * t >= 5.0) EXPECT_LT(2.0 * std::abs(std::sin(0.5 * sigma[r])), 1e-6) << r << " " << t;
    }
  }
}

TEST(LightCone, OptionErrors) {
  const auto spec = make(1, 40);
  EXPECT_THROW(measure_light_cone(spec, {1.5}), ValidationError);
  LightConeOptions opt;
  opt.r_max = 30;
  EXPECT_THROW(measure_light_cone(spec, opt), ValidationError);
}
