#pragma once

// Physical configuration of the hybrid acoustic QRAM hardware model, plus the
// bookkeeping conventions attached to every capacity bound.
//
// All public quantities are SI: meters, seconds, kilograms, radians/second.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qcausal {

/// Raised when a configuration violates one of its invariants. The message
/// names the first violated invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kSpeedOfLight = 3.0e8;

struct HardwareParams {
  double a = 1.0e-6;        // lattice spacing [m]
  double delta_t = 1.0e-3;  // clock cycle [s]
  double g1 = 1.0;          // beam-splitter coupling [rad/s]
  double g2 = 1.0;          // controlled-phase coupling [rad/s]
  std::vector<double> lambda{1.0};  // spring constants lambda_1..lambda_nu [kg/s^2]
  double m = 1.0;           // site mass [kg]
  int d = 1;                // spatial dimension
  int nu = 1;               // interaction range
  double c_max = kSpeedOfLight;  // absolute speed cap [m/s]

  bool operator==(const HardwareParams&) const = default;
};

enum class LogBase { natural, two };

enum class VelocitySource { lieb_robinson, qft, group, explicit_value, teleport_hybrid };

/// Which logarithm, depth exponent and velocity feed a capacity bound.
struct Conventions {
  LogBase log_base = LogBase::natural;
  int depth_exponent = 2;
  VelocitySource velocity_source = VelocitySource::lieb_robinson;
  /// Base (one-dimensional) velocity in m/s, used when velocity_source is
  /// explicit_value.
  double explicit_velocity = 0.0;

  bool operator==(const Conventions&) const = default;
};

inline std::string to_string(LogBase b) { return b == LogBase::natural ? "natural" : "2"; }

inline std::string to_string(VelocitySource s) {
  switch (s) {
    case VelocitySource::lieb_robinson: return "lieb_robinson";
    case VelocitySource::qft: return "qft";
    case VelocitySource::group: return "group";
    case VelocitySource::explicit_value: return "explicit";
    case VelocitySource::teleport_hybrid: return "teleport-hybrid";
  }
  return "unknown";
}

inline LogBase parse_log_base(std::string_view s) {
  if (s == "natural" || s == "e" || s == "ln") return LogBase::natural;
  if (s == "2" || s == "two" || s == "log2") return LogBase::two;
  throw ValidationError("unknown log base '" + std::string(s) + "'");
}

inline VelocitySource parse_velocity_source(std::string_view s) {
  if (s == "lieb_robinson" || s == "lr") return VelocitySource::lieb_robinson;
  if (s == "qft") return VelocitySource::qft;
  if (s == "group") return VelocitySource::group;
  if (s == "explicit") return VelocitySource::explicit_value;
  if (s == "teleport-hybrid" || s == "teleport_hybrid" || s == "teleport")
    return VelocitySource::teleport_hybrid;
  throw ValidationError("unknown velocity source '" + std::string(s) + "'");
}

inline std::string describe(const Conventions& c) {
  std::string out = "log_base=" + to_string(c.log_base) +
                    " depth_exponent=" + std::to_string(c.depth_exponent) +
                    " velocity_source=" + to_string(c.velocity_source);
  if (c.velocity_source == VelocitySource::explicit_value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " velocity=%.12g", c.explicit_velocity);
    out += buf;
  }
  return out;
}

namespace detail {

inline void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw ValidationError(std::string("nonpositive ") + what);
  if (!std::isfinite(v)) throw ValidationError(std::string("non-finite ") + what);
}

}  // namespace detail

/// Checks every invariant of `params` and returns it unchanged.
inline HardwareParams validate(const HardwareParams& params) {
  detail::require_positive(params.a, "lattice spacing");
  detail::require_positive(params.delta_t, "clock cycle time");
  detail::require_positive(params.g1, "coupling g1");
  detail::require_positive(params.g2, "coupling g2");
  detail::require_positive(params.m, "mass");
  detail::require_positive(params.c_max, "speed cap");
  if (params.d < 1 || params.d > 3) throw ValidationError("dimension must be 1, 2 or 3");
  if (params.nu < 1) throw ValidationError("nonpositive interaction range");
  if (params.lambda.size() != static_cast<std::size_t>(params.nu))
    throw ValidationError("range/coupling length mismatch");
  bool any_positive = false;
  for (double l : params.lambda) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ValidationError("negative spring constant");
    any_positive = any_positive || l > 0.0;
  }
  if (!any_positive) throw ValidationError("all spring constants zero");
  return params;
}

/// Per-stage gate time scale pi/g1 + pi/g2.
inline double tau0(double g1, double g2) {
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw ValidationError("nonpositive coupling");
  return std::numbers::pi / g1 + std::numbers::pi / g2;
}

inline double tau0(const HardwareParams& p) { return tau0(p.g1, p.g2); }

/// Continuum mass density m / a^d.
inline double density(const HardwareParams& params) {
  validate(params);
  return params.m / std::pow(params.a, params.d);
}

inline double coupling_sum(const std::vector<double>& lambda) {
  double s = 0.0;
  for (double l : lambda) s += l;
  return s;
}

/// Couplings g1 = g2 that give the requested tau0.
inline double coupling_for_tau0(double tau) { return 2.0 * std::numbers::pi / tau; }

}  // namespace qcausal
