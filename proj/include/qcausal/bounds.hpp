#pragma once

// Causality bounds on QRAM capacity.
//
// A QRAM of linear extent N sites spans N a meters and takes T = tau0 log^p N
// to run. Information cannot outrun the available velocity v, so
//
//   N / log^p N <= v tau0 / a = R,
//
// and the capacity is the largest fixed point of N = R log^p N.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qcausal/lattice.hpp"
#include "qcausal/params.hpp"

namespace qcausal {

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BoundResult {
  double max_qubits_total = 0.0;   // extent^d
  double max_linear_extent = 0.0;  // qubits along one axis
  double velocity_used = 0.0;      // m/s, after the c_max cap
  double ratio = 0.0;              // R = v tau0 / a
  Conventions conventions;
  HardwareParams inputs;
};

struct Velocity {
  double lattice_units = 0.0;  // sites / s
  double physical = 0.0;       // m / s
};

inline double log_in(LogBase base, double x) { return base == LogBase::natural ? std::log(x) : std::log2(x); }

/// Lieb-Robinson velocity 4 (d sum_j lambda_j / m)^{1/2}; physical = a * lattice.
inline Velocity lr_velocity(const HardwareParams& params) {
  validate(params);
  Velocity v;
  v.lattice_units = lattice::lieb_robinson_speed(params.d, params.lambda, params.m);
  v.physical = params.a * v.lattice_units;
  return v;
}

/// Continuum stiffness lambda^(d) = d sum_j lambda_j a j^2.
inline double coarse_grain(const HardwareParams& params) {
  validate(params);
  double acc = 0.0;
  for (std::size_t j = 1; j <= params.lambda.size(); ++j)
    acc += params.lambda[j - 1] * params.a * static_cast<double>(j * j);
  return params.d * acc;
}

inline double qft_velocity(double lambda_d, double rho) {
  if (!(rho > 0.0)) throw ValidationError("nonpositive density");
  if (!(lambda_d >= 0.0)) throw ValidationError("negative continuum coupling");
  return std::sqrt(lambda_d / rho);
}

/// Largest fixed point of N = R (log N)^p, by iterating N <- R (log N)^p from
/// N0 = max(R, base^2) until the relative change drops below 1e-12.
inline double fixed_point_solve(double R, int p, LogBase base = LogBase::natural) {
  if (!(R > 0.0) || !std::isfinite(R)) throw ValidationError("nonpositive ratio");
  if (p < 0) throw ValidationError("negative depth exponent");
  if (p == 0) return R;

  constexpr int kMaxIterations = 1'000'000;
  const double b = base == LogBase::natural ? std::numbers::e : 2.0;
  double n = std::max(R, b * b);
  for (int it = 0; it < kMaxIterations; ++it) {
    const double lg = log_in(base, n);
    const double next = R * std::pow(lg, p);
    if (!(next > 1.0) || lg <= 0.0) throw ConvergenceError("no fixed point above 1");
    const double change = std::abs(next - n) / next;
    n = next;
    if (change < 1e-12) return n;
  }
  throw ConvergenceError("fixed-point iteration did not converge after 1000000 iterations");
}

/// One-dimensional chain clocked at delta_t per log N layer:
/// N a / (delta_t log N) <= c.
inline double naive_max_qubits(double a, double delta_t, double c, LogBase base = LogBase::natural) {
  if (!(a > 0.0) || !(delta_t > 0.0) || !(c > 0.0)) throw ValidationError("nonpositive input");
  return fixed_point_solve(c * delta_t / a, 1, base);
}

namespace detail {

inline BoundResult bound_from_velocity(const HardwareParams& params, Conventions conv, double velocity) {
  BoundResult out;
  out.inputs = params;
  out.conventions = conv;
  out.velocity_used = std::min(velocity, params.c_max);
  out.ratio = out.velocity_used * tau0(params) / params.a;
  out.max_linear_extent = fixed_point_solve(out.ratio, conv.depth_exponent, conv.log_base);
  out.max_qubits_total = std::pow(out.max_linear_extent, params.d);
  return out;
}

}  // namespace detail

/// Physical velocity selected by `conv`, before the c_max cap.
///
/// An explicit velocity is read as the one-dimensional value and scaled by
/// sqrt(d), like the Lieb-Robinson and continuum velocities.
inline double resolve_velocity(const HardwareParams& params, const Conventions& conv) {
  switch (conv.velocity_source) {
    case VelocitySource::lieb_robinson:
      return lr_velocity(params).physical;
    case VelocitySource::qft:
      return qft_velocity(coarse_grain(params), density(params));
    case VelocitySource::group: {
      const auto spec = lattice::from_params(params, 2 * params.nu + 2);
      return lattice::max_group_velocity(spec).physical;
    }
    case VelocitySource::explicit_value:
      if (!(conv.explicit_velocity > 0.0) || !std::isfinite(conv.explicit_velocity))
        throw ValidationError("velocity resolution failure: explicit velocity must be positive");
      return std::sqrt(static_cast<double>(params.d)) * conv.explicit_velocity;
    case VelocitySource::teleport_hybrid:
      return params.c_max;
  }
  throw ValidationError("velocity resolution failure");
}

/// Capacity bound N / log^p N <= v tau0 / a with the velocity chosen by `conv`.
inline BoundResult teleport_hybrid_max_qubits(const HardwareParams& params, Conventions conv);

inline BoundResult qram_max_qubits(const HardwareParams& params, const Conventions& conv) {
  validate(params);
  if (conv.depth_exponent < 0) throw ValidationError("negative depth exponent");
  if (conv.velocity_source == VelocitySource::teleport_hybrid) return teleport_hybrid_max_qubits(params, conv);
  return detail::bound_from_velocity(params, conv, resolve_velocity(params, conv));
}

/// 2D architecture that routes by teleportation: routing is limited by c_max
/// rather than by sound, so R uses the speed cap directly.
inline BoundResult teleport_hybrid_max_qubits(const HardwareParams& params, Conventions conv) {
  validate(params);
  if (params.d != 2) throw ValidationError("teleport-hybrid defined for d=2");
  conv.velocity_source = VelocitySource::teleport_hybrid;
  return detail::bound_from_velocity(params, conv, params.c_max);
}

}  // namespace qcausal
