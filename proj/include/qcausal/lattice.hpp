#pragma once

// Exact Heisenberg dynamics of the isotropic harmonic lattice
//
//   H = sum_r P_r^2 / 2m + sum_r sum_beta sum_j lambda_j/2 (U(r) - U(r + j e_beta))^2
//
// on a periodic L^d lattice. Every Cartesian displacement component evolves
// independently with the same dynamics, so a propagator acts on the 2n
// dimensional phase space (q_1..q_n, p_1..p_n) of one component.
//
// Lattice units: wavevectors are in radians per lattice spacing, distances in
// sites, velocities in sites per second. Multiply by `a` for SI.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qcausal/params.hpp"

namespace qcausal::lattice {

using KVector = std::array<double, 3>;
using Coords = std::array<int, 3>;

struct LatticeSpec {
  int d = 1;
  int L = 16;                       // sites per axis
  std::vector<double> lambda{1.0};  // [kg/s^2]
  double m = 1.0;                   // [kg]
  double a = 1.0;                   // [m]
  bool periodic = true;

  int range() const { return static_cast<int>(lambda.size()); }
  std::size_t sites() const {
    std::size_t n = 1;
    for (int b = 0; b < d; ++b) n *= static_cast<std::size_t>(L);
    return n;
  }
};

inline LatticeSpec validate(const LatticeSpec& spec) {
  if (spec.d < 1 || spec.d > 3) throw ValidationError("dimension must be 1, 2 or 3");
  if (spec.lambda.empty()) throw ValidationError("nonpositive interaction range");
  detail::require_positive(spec.m, "mass");
  detail::require_positive(spec.a, "lattice spacing");
  bool any_positive = false;
  for (double l : spec.lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("negative spring constant");
    any_positive = any_positive || l > 0.0;
  }
  if (!any_positive) throw ValidationError("all spring constants zero");
  if (!spec.periodic) throw ValidationError("only periodic boundaries are supported");
  if (spec.L < 2 * spec.range() + 2) throw ValidationError("L too small for range");
  return spec;
}

inline LatticeSpec from_params(const HardwareParams& p, int L) {
  validate(p);
  return validate(LatticeSpec{p.d, L, p.lambda, p.m, p.a, true});
}

/// c_{omega,lambda} = (d sum_j lambda_j / m)^{1/2}, lattice units.
inline double lr_constant(int d, const std::vector<double>& lambda, double m) {
  return std::sqrt(d * coupling_sum(lambda) / m);
}

/// Lieb-Robinson velocity 4 (d sum_j lambda_j / m)^{1/2}, lattice units.
inline double lieb_robinson_speed(int d, const std::vector<double>& lambda, double m) {
  return 4.0 * lr_constant(d, lambda, m);
}

inline double lieb_robinson_speed(const LatticeSpec& s) { return lieb_robinson_speed(s.d, s.lambda, s.m); }

// ---------------------------------------------------------------------------
// Dispersion

/// omega(k) = sqrt((4/m) sum_beta sum_j lambda_j sin^2(j k_beta / 2)).
inline double dispersion(const LatticeSpec& spec, const KVector& k) {
  double acc = 0.0;
  for (int b = 0; b < spec.d; ++b) {
    for (int j = 1; j <= spec.range(); ++j) {
      const double s = std::sin(0.5 * j * k[b]);
      acc += spec.lambda[j - 1] * s * s;
    }
  }
  return std::sqrt(4.0 * acc / spec.m);
}

/// Analytic gradient of omega. Zero at k = 0 where the gradient is direction dependent.
inline KVector group_velocity(const LatticeSpec& spec, const KVector& k) {
  KVector v{0.0, 0.0, 0.0};
  const double w = dispersion(spec, k);
  if (w == 0.0) return v;
  for (int b = 0; b < spec.d; ++b) {
    double acc = 0.0;
    for (int j = 1; j <= spec.range(); ++j) acc += spec.lambda[j - 1] * j * std::sin(j * k[b]);
    v[b] = acc / (spec.m * w);
  }
  return v;
}

inline double group_speed(const LatticeSpec& spec, const KVector& k) {
  const auto v = group_velocity(spec, k);
  return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
}

/// Limit of omega(kappa * direction) / kappa as kappa -> 0.
///
/// For a unit direction this is the sound speed sqrt(sum_j lambda_j j^2 / m),
/// the same along every direction. Along the per-axis diagonal (1, ..., 1) it
/// picks up a factor sqrt(d).
inline double long_wavelength_slope(const LatticeSpec& spec, const KVector& direction) {
  double norm2 = 0.0;
  for (int b = 0; b < spec.d; ++b) norm2 += direction[b] * direction[b];
  double stiffness = 0.0;
  for (int j = 1; j <= spec.range(); ++j) stiffness += spec.lambda[j - 1] * j * j;
  return std::sqrt(norm2 * stiffness / spec.m);
}

struct GroupVelocity {
  double lattice_units = 0.0;   // sites / s
  double physical = 0.0;        // m / s
  double long_wavelength = 0.0; // k -> 0 sound speed, sites / s
  KVector argmax{0.0, 0.0, 0.0};
};

/// Maximum of |grad omega| over a dense grid of the irreducible zone
/// (2^14 points for d = 1, 256^2 for d = 2, 64^3 for d = 3), together with
/// the k -> 0 limit, which the open grid cannot reach.
inline GroupVelocity max_group_velocity(const LatticeSpec& spec) {
  const int per_axis = spec.d == 1 ? (1 << 14) : spec.d == 2 ? 256 : 64;
  GroupVelocity out;
  out.long_wavelength = long_wavelength_slope(spec, {1.0, 0.0, 0.0});
  out.lattice_units = out.long_wavelength;

  const double h = std::numbers::pi / per_axis;
  const int hi1 = per_axis;
  const int hi2 = spec.d >= 2 ? per_axis : 0;
  const int hi3 = spec.d >= 3 ? per_axis : 0;
  for (int i = 0; i <= hi1; ++i) {
    for (int j = 0; j <= hi2; ++j) {
      for (int l = 0; l <= hi3; ++l) {
        if (i == 0 && j == 0 && l == 0) continue;
        const KVector k{i * h, j * h, l * h};
        const double v = group_speed(spec, k);
        if (v > out.lattice_units) {
          out.lattice_units = v;
          out.argmax = k;
        }
      }
    }
  }
  out.physical = out.lattice_units * spec.a;
  return out;
}

// ---------------------------------------------------------------------------
// Normal modes and site bookkeeping

inline Coords site_coords(const LatticeSpec& spec, std::size_t site) {
  Coords c{0, 0, 0};
  for (int b = 0; b < spec.d; ++b) {
    c[b] = static_cast<int>(site % spec.L);
    site /= spec.L;
  }
  return c;
}

inline std::size_t site_index(const LatticeSpec& spec, const Coords& c) {
  std::size_t idx = 0;
  for (int b = spec.d - 1; b >= 0; --b) {
    const int wrapped = ((c[b] % spec.L) + spec.L) % spec.L;
    idx = idx * spec.L + static_cast<std::size_t>(wrapped);
  }
  return idx;
}

/// Site index of the displacement x - y, wrapped onto the torus.
inline std::size_t displacement(const LatticeSpec& spec, std::size_t x, std::size_t y) {
  const auto cx = site_coords(spec, x);
  const auto cy = site_coords(spec, y);
  return site_index(spec, {cx[0] - cy[0], cx[1] - cy[1], cx[2] - cy[2]});
}

struct NormalModes {
  std::vector<KVector> k;      // components in (-pi, pi]
  std::vector<Coords> index;   // integer wavevector q with k = 2 pi q / L
  std::vector<double> omega;   // [1/s]
};

inline NormalModes normal_modes(const LatticeSpec& spec) {
  validate(spec);
  const std::size_t n = spec.sites();
  NormalModes modes;
  modes.k.reserve(n);
  modes.index.reserve(n);
  modes.omega.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const Coords q = site_coords(spec, s);
    KVector k{0.0, 0.0, 0.0};
    for (int b = 0; b < spec.d; ++b) {
      k[b] = 2.0 * std::numbers::pi * q[b] / spec.L;
      if (k[b] > std::numbers::pi + 1e-15) k[b] -= 2.0 * std::numbers::pi;
    }
    modes.k.push_back(k);
    modes.index.push_back(q);
    modes.omega.push_back(dispersion(spec, k));
  }
  return modes;
}

inline double max_frequency(const LatticeSpec& spec) {
  const auto modes = normal_modes(spec);
  return *std::max_element(modes.omega.begin(), modes.omega.end());
}

/// Applies the force-constant matrix: (K q)_x = sum_beta sum_j lambda_j (2 q_x - q_{x+j e_beta} - q_{x-j e_beta}).
inline void apply_coupling(const LatticeSpec& spec, const std::vector<double>& q, std::vector<double>& out) {
  const std::size_t n = spec.sites();
  out.assign(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const Coords c = site_coords(spec, x);
    double acc = 0.0;
    for (int b = 0; b < spec.d; ++b) {
      for (int j = 1; j <= spec.range(); ++j) {
        Coords up = c, down = c;
        up[b] += j;
        down[b] -= j;
        acc += spec.lambda[j - 1] * (2.0 * q[x] - q[site_index(spec, up)] - q[site_index(spec, down)]);
      }
    }
    out[x] = acc;
  }
}

/// Dense n x n force-constant matrix.
inline Eigen::MatrixXd coupling_matrix(const LatticeSpec& spec) {
  const std::size_t n = spec.sites();
  Eigen::MatrixXd K(n, n);
  std::vector<double> e(n, 0.0), col;
  for (std::size_t y = 0; y < n; ++y) {
    e.assign(n, 0.0);
    e[y] = 1.0;
    apply_coupling(spec, e, col);
    for (std::size_t x = 0; x < n; ++x) K(x, y) = col[x];
  }
  return K;
}

// ---------------------------------------------------------------------------
// Propagators

/// Linear map S(t) on one displacement component's phase space,
///
///   q_x(t) = sum_y qq(x - y) q_y + qp(x - y) p_y
///   p_x(t) = sum_y pq(x - y) q_y + pp(x - y) p_y
///
/// stored through its translation-invariant kernels.
class SymplecticPropagator {
 public:
  SymplecticPropagator(LatticeSpec spec, double t, std::vector<double> qq, std::vector<double> qp,
                       std::vector<double> pq, std::vector<double> pp)
      : spec_(std::move(spec)), t_(t), qq_(std::move(qq)), qp_(std::move(qp)), pq_(std::move(pq)),
        pp_(std::move(pp)) {}

  const LatticeSpec& spec() const { return spec_; }
  double time() const { return t_; }
  std::size_t sites() const { return qq_.size(); }

  double qq(std::size_t disp) const { return qq_[disp]; }
  double qp(std::size_t disp) const { return qp_[disp]; }
  double pq(std::size_t disp) const { return pq_[disp]; }
  double pp(std::size_t disp) const { return pp_[disp]; }

  /// Dense 2n x 2n matrix in the (q, p) ordering.
  Eigen::MatrixXd dense() const {
    const std::size_t n = sites();
    Eigen::MatrixXd S(2 * n, 2 * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t r = displacement(spec_, x, y);
        S(x, y) = qq_[r];
        S(x, n + y) = qp_[r];
        S(n + x, y) = pq_[r];
        S(n + x, n + y) = pp_[r];
      }
    }
    return S;
  }

  /// Schrodinger-picture action on a phase-space vector (q, p) of length 2n.
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const {
    const std::size_t n = sites();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(2 * n);
    for (std::size_t x = 0; x < n; ++x) {
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t r = displacement(spec_, x, y);
        out[x] += qq_[r] * u[y] + qp_[r] * u[n + y];
        out[n + x] += pq_[r] * u[y] + pp_[r] * u[n + y];
      }
    }
    return out;
  }

  /// Heisenberg evolution of a Weyl symbol: tau_t(W(f)) = W(f_t). Real parts
  /// of the result are q coefficients, imaginary parts p coefficients.
  std::vector<std::complex<double>> heisenberg(const std::map<std::size_t, std::complex<double>>& f) const {
    const std::size_t n = sites();
    std::vector<std::complex<double>> out(n);
    for (const auto& [site, amp] : f) {
      for (std::size_t y = 0; y < n; ++y) {
        const std::size_t r = displacement(spec_, site, y);
        out[y] += std::complex<double>(amp.real() * qq_[r] + amp.imag() * pq_[r],
                                       amp.real() * qp_[r] + amp.imag() * pp_[r]);
      }
    }
    return out;
  }

 private:
  LatticeSpec spec_;
  double t_;
  std::vector<double> qq_, qp_, pq_, pp_;
};

/// Spectral construction: each normal mode rotates in its (q_k, p_k) plane,
/// the zero mode drifts freely (q += t p / m).
inline SymplecticPropagator propagate(const LatticeSpec& spec, double t) {
  const auto modes = normal_modes(spec);
  const std::size_t n = spec.sites();
  const int L = spec.L;

  std::vector<double> cw(n), sw(n), mw(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double w = modes.omega[k];
    cw[k] = std::cos(w * t);
    if (w == 0.0) {
      sw[k] = t / spec.m;
      mw[k] = 0.0;
    } else {
      sw[k] = std::sin(w * t) / (spec.m * w);
      mw[k] = -spec.m * w * std::sin(w * t);
    }
  }

  std::vector<double> cos_table(L);
  for (int i = 0; i < L; ++i) cos_table[i] = std::cos(2.0 * std::numbers::pi * i / L);

  std::vector<double> qq(n, 0.0), qp(n, 0.0), pq(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const Coords cr = site_coords(spec, r);
    double a = 0.0, b = 0.0, c = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const Coords& q = modes.index[k];
      long phase = 0;
      for (int ax = 0; ax < spec.d; ++ax) phase += static_cast<long>(q[ax]) * cr[ax];
      const double cs = cos_table[static_cast<std::size_t>(phase % L)];
      a += cw[k] * cs;
      b += sw[k] * cs;
      c += mw[k] * cs;
    }
    qq[r] = a / n;
    qp[r] = b / n;
    pq[r] = c / n;
  }
  std::vector<double> pp = qq;
  return {spec, t, std::move(qq), std::move(qp), std::move(pq), std::move(pp)};
}

/// Classical RK4 integration of q' = p/m, p' = -K q. Independent of the
/// spectral route; requires |dt| <= 0.01 / omega_max.
inline SymplecticPropagator propagate_ode(const LatticeSpec& spec, double t, double dt) {
  validate(spec);
  const double w_max = max_frequency(spec);
  if (!(dt > 0.0) || dt > 0.01 / w_max * (1.0 + 1e-12)) throw ValidationError("step too large");
  const std::size_t n = spec.sites();
  const auto steps = static_cast<std::size_t>(std::ceil(std::abs(t) / dt));
  const double h = steps == 0 ? 0.0 : t / static_cast<double>(steps);

  using State = std::pair<std::vector<double>, std::vector<double>>;
  std::vector<double> force;
  auto deriv = [&](const State& s) {
    State ds;
    ds.first.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.first[i] = s.second[i] / spec.m;
    apply_coupling(spec, s.first, force);
    ds.second.resize(n);
    for (std::size_t i = 0; i < n; ++i) ds.second[i] = -force[i];
    return ds;
  };
  auto axpy = [n](const State& s, double w, const State& ds) {
    State out = s;
    for (std::size_t i = 0; i < n; ++i) {
      out.first[i] += w * ds.first[i];
      out.second[i] += w * ds.second[i];
    }
    return out;
  };
  auto evolve = [&](State s) {
    for (std::size_t step = 0; step < steps; ++step) {
      const State k1 = deriv(s);
      const State k2 = deriv(axpy(s, 0.5 * h, k1));
      const State k3 = deriv(axpy(s, 0.5 * h, k2));
      const State k4 = deriv(axpy(s, h, k3));
      for (std::size_t i = 0; i < n; ++i) {
        s.first[i] += h / 6.0 * (k1.first[i] + 2.0 * k2.first[i] + 2.0 * k3.first[i] + k4.first[i]);
        s.second[i] += h / 6.0 * (k1.second[i] + 2.0 * k2.second[i] + 2.0 * k3.second[i] + k4.second[i]);
      }
    }
    return s;
  };

  State from_q{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  from_q.first[0] = 1.0;
  State from_p{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  from_p.second[0] = 1.0;
  auto [qq, pq] = evolve(std::move(from_q));
  auto [qp, pp] = evolve(std::move(from_p));
  return {spec, t, std::move(qq), std::move(qp), std::move(pq), std::move(pp)};
}

// ---------------------------------------------------------------------------
// Weyl operators

/// Finite-support phase-space function: Re f couples to q, Im f to p.
using WeylFunction = std::map<std::size_t, std::complex<double>>;

/// sigma(f, g) = sum_n Re f(n) Im g(n) - Im f(n) Re g(n).
inline double symplectic_form(const std::vector<std::complex<double>>& f, const WeylFunction& g) {
  double s = 0.0;
  for (const auto& [site, amp] : g) s += f[site].real() * amp.imag() - f[site].imag() * amp.real();
  return s;
}

inline double symplectic_form(const WeylFunction& f, const WeylFunction& g) {
  double s = 0.0;
  for (const auto& [site, amp] : g) {
    if (auto it = f.find(site); it != f.end())
      s += it->second.real() * amp.imag() - it->second.imag() * amp.real();
  }
  return s;
}

/// Phase-space pairing u_q . v_p - u_p . v_q of two 2n vectors.
inline double symplectic_form(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  const auto n = u.size() / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

inline void check_support(const LatticeSpec& spec, const WeylFunction& f) {
  for (const auto& [site, amp] : f) {
    if (site >= spec.sites()) throw ValidationError("Weyl function support outside lattice");
    if (!std::isfinite(amp.real()) || !std::isfinite(amp.imag()))
      throw ValidationError("non-finite Weyl amplitude");
  }
}

/// ||[tau_t(W(f)), W(g)]|| = 2 |sin(sigma(f_t, g) / 2)|, exact for quadratic dynamics.
inline double weyl_commutator_norm(const SymplecticPropagator& S, const WeylFunction& f, const WeylFunction& g) {
  check_support(S.spec(), f);
  check_support(S.spec(), g);
  const double sigma = symplectic_form(S.heisenberg(f), g);
  return 2.0 * std::abs(std::sin(0.5 * sigma));
}

inline double weyl_commutator_norm(const LatticeSpec& spec, const WeylFunction& f, const WeylFunction& g,
                                   double t) {
  return weyl_commutator_norm(propagate(spec, t), f, g);
}

// ---------------------------------------------------------------------------
// Lieb-Robinson envelope

struct LRBoundParams {
  double C = 1.0;
  double mu = 1.0;
};

/// C exp(-mu m [dist - c max(2/mu, e^{mu/2 + 1}) |t|]) for unit single-site probes.
inline double lr_bound_envelope(const LatticeSpec& spec, const LRBoundParams& bp, double dist, double t) {
  if (!(bp.C > 0.0) || !(bp.mu > 0.0)) throw ValidationError("nonpositive envelope constant");
  if (!(dist >= 0.0)) throw ValidationError("negative distance");
  const double c = lr_constant(spec.d, spec.lambda, spec.m);
  const double speed = c * std::max(2.0 / bp.mu, std::exp(0.5 * bp.mu + 1.0));
  return bp.C * std::exp(-bp.mu * spec.m * (dist - speed * std::abs(t)));
}

// ---------------------------------------------------------------------------
// Light cones

struct LightConeOptions {
  double threshold = 1e-3;  // fraction of the per-distance peak
  double t_max = 0.0;       // 0: 1.3 r_max / v_group + 20 / omega_max
  int r_max = 0;            // 0: L/2 - nu
  double dt = 0.0;          // scan step; 0: 0.1 / omega_max
};

struct Arrival {
  int r = 0;
  std::optional<double> t_arrival;  // empty: no arrival within t_max
  double peak = 0.0;
};

struct LightCone {
  std::vector<Arrival> arrivals;
  double fitted_velocity = 0.0;           // sites / s
  double fitted_velocity_physical = 0.0;  // m / s
  double group_velocity = 0.0;            // max |grad omega|, sites / s
  double lr_bound = 0.0;                  // 4 (d sum lambda / m)^{1/2}, sites / s
  double t_max = 0.0;
  bool within_bound() const { return fitted_velocity < lr_bound; }
};

/// Commutator of a q probe at the origin with p probes along the first axis,
/// evaluated mode by mode. Cheap enough to scan in time for large lattices.
class AxisProbe {
 public:
  AxisProbe(const LatticeSpec& spec, int r_max) : L_(spec.L), r_max_(r_max) {
    const auto modes = normal_modes(spec);
    n_ = modes.omega.size();
    omega_ = modes.omega;
    axis_index_.reserve(n_);
    for (const auto& q : modes.index) axis_index_.push_back(q[0]);
    cos_.resize(static_cast<std::size_t>(L_) * (r_max_ + 1));
    for (int q = 0; q < L_; ++q)
      for (int r = 0; r <= r_max_; ++r)
        cos_[q * (r_max_ + 1) + r] = std::cos(2.0 * std::numbers::pi * q * r / L_);
  }

  /// sigma(r, t) for r = 0..r_max.
  void sigma_all(double t, std::vector<double>& out) const {
    std::vector<double> axis_sum(L_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) axis_sum[axis_index_[k]] += std::cos(omega_[k] * t);
    out.assign(r_max_ + 1, 0.0);
    for (int q = 0; q < L_; ++q) {
      const double s = axis_sum[q];
      for (int r = 0; r <= r_max_; ++r) out[r] += s * cos_[q * (r_max_ + 1) + r];
    }
    for (double& v : out) v /= static_cast<double>(n_);
  }

  double sigma(int r, double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < n_; ++k)
      acc += std::cos(omega_[k] * t) * cos_[axis_index_[k] * (r_max_ + 1) + r];
    return acc / static_cast<double>(n_);
  }

  double norm(int r, double t) const { return 2.0 * std::abs(std::sin(0.5 * sigma(r, t))); }

 private:
  int L_;
  int r_max_;
  std::size_t n_ = 0;
  std::vector<double> omega_;
  std::vector<int> axis_index_;
  std::vector<double> cos_;
};

/// Least-squares slope of y against x.
inline double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

/// Earliest time at which the probe commutator reaches `threshold` times its
/// peak over [0, t_max], for each distance 1..r_max along the first axis.
/// The fitted velocity is the slope of r against arrival time.
inline LightCone measure_light_cone(const LatticeSpec& spec, const LightConeOptions& opt = {}) {
  validate(spec);
  if (!(opt.threshold > 0.0 && opt.threshold < 1.0)) throw ValidationError("threshold must lie in (0, 1)");
  const int r_limit = spec.L / 2 - spec.range();
  const int r_max = opt.r_max > 0 ? opt.r_max : r_limit;
  if (r_max > r_limit) throw ValidationError("r_max exceeds L/2 - nu");
  if (r_max < 2) throw ValidationError("r_max must be at least 2");

  const double w_max = max_frequency(spec);
  LightCone out;
  out.group_velocity = max_group_velocity(spec).lattice_units;
  out.lr_bound = lieb_robinson_speed(spec);
  out.t_max = opt.t_max > 0.0 ? opt.t_max : 1.3 * r_max / out.group_velocity + 20.0 / w_max;
  const double dt = opt.dt > 0.0 ? opt.dt : 0.1 / w_max;
  const auto steps = static_cast<std::size_t>(std::ceil(out.t_max / dt));

  const AxisProbe probe(spec, r_max);
  std::vector<std::vector<double>> series(r_max + 1, std::vector<double>(steps + 1));
  std::vector<double> sig;
  for (std::size_t i = 0; i <= steps; ++i) {
    probe.sigma_all(std::min(i * dt, out.t_max), sig);
    for (int r = 1; r <= r_max; ++r) series[r][i] = 2.0 * std::abs(std::sin(0.5 * sig[r]));
  }

  std::vector<double> ts, rs;
  for (int r = 1; r <= r_max; ++r) {
    Arrival arr;
    arr.r = r;
    const auto& s = series[r];
    arr.peak = *std::max_element(s.begin(), s.end());
    if (arr.peak > 1e-12) {
      const double level = opt.threshold * arr.peak;
      const auto first = static_cast<std::size_t>(
          std::find_if(s.begin(), s.end(), [level](double v) { return v >= level; }) - s.begin());
      double lo = first == 0 ? 0.0 : (first - 1) * dt;
      double hi = std::min(first * dt, out.t_max);
      for (int it = 0; it < 60 && first > 0; ++it) {
        const double mid = 0.5 * (lo + hi);
        (probe.norm(r, mid) >= level ? hi : lo) = mid;
      }
      arr.t_arrival = hi;
      ts.push_back(hi);
      rs.push_back(r);
    }
    out.arrivals.push_back(arr);
  }
  if (ts.size() < 2) throw ValidationError("fewer than two arrivals; increase t_max");
  out.fitted_velocity = fit_slope(ts, rs);
  out.fitted_velocity_physical = out.fitted_velocity * spec.a;
  return out;
}

}  // namespace qcausal::lattice
