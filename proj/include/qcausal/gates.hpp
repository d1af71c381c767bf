#pragma once

// QRAM primitive gates on two-level transmon/phonon modes.
//
// Beam splitter and SWAP come from the excitation-exchange generator
// g1 (a^dag b + a b^dag); the controlled phase from the number-number
// generator g2 n_a n_b. With these generators
//
//   t_sw = pi / (2 g1),  t_bs = pi / (4 g1),  t_cz = pi / g2,
//
// and BS^dag . CZ . BS realizes a controlled SWAP up to diagonal phases.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "qcausal/params.hpp"

namespace qcausal::gates {

using Complex = std::complex<double>;
using Unitary = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

inline constexpr std::size_t kMaxRegisterDimension = std::size_t{1} << 14;

/// Ordered modes; mode 0 is the most significant tensor factor.
struct ModeRegister {
  std::vector<int> dims;

  std::size_t size() const { return dims.size(); }
  std::size_t total_dimension() const {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    return total;
  }
  std::size_t stride(std::size_t mode) const {
    std::size_t s = 1;
    for (std::size_t j = mode + 1; j < dims.size(); ++j) s *= static_cast<std::size_t>(dims[j]);
    return s;
  }
};

inline ModeRegister validate(const ModeRegister& reg) {
  if (reg.dims.empty()) throw ValidationError("empty register");
  std::size_t total = 1;
  for (int d : reg.dims) {
    if (d < 2) throw ValidationError("mode truncation below 2");
    total *= static_cast<std::size_t>(d);
    if (total > kMaxRegisterDimension) throw ValidationError("state-vector cap exceeded");
  }
  return reg;
}

inline ModeRegister qubit_register(std::size_t modes) { return validate(ModeRegister{std::vector<int>(modes, 2)}); }

struct GateTimes {
  double t_sw = 0.0;
  double t_bs = 0.0;
  double t_cz = 0.0;
  double cswap() const { return 2.0 * t_bs + t_cz; }
};

inline GateTimes gate_times(double g1, double g2) {
  if (!(g1 > 0.0) || !(g2 > 0.0)) throw ValidationError("nonpositive coupling");
  return {std::numbers::pi / (2.0 * g1), std::numbers::pi / (4.0 * g1), std::numbers::pi / g2};
}

inline bool is_unitary(const Unitary& U, double tol = 1e-10) {
  const Unitary d = U.adjoint() * U - Unitary::Identity(U.rows(), U.cols());
  return d.cwiseAbs().maxCoeff() <= tol;
}

// ---------------------------------------------------------------------------
// Matrices

/// exp(-i t H) for Hermitian H.
inline Unitary hermitian_exp(const Unitary& H, double t) {
  Eigen::SelfAdjointEigenSolver<Unitary> eig(H);
  const Eigen::VectorXcd phases =
      (eig.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
  return eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
}

inline Unitary annihilation(int dim) {
  Unitary a = Unitary::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Unitary kron(const Unitary& A, const Unitary& B) {
  Unitary out(A.rows() * B.rows(), A.cols() * B.cols());
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

/// exp(-i t g1 (a^dag b + a b^dag)) on two modes.
inline Unitary bs_unitary(double g1, double t, std::array<int, 2> dims = {2, 2}) {
  if (!(g1 > 0.0)) throw ValidationError("nonpositive coupling g1");
  const Unitary a = kron(annihilation(dims[0]), Unitary::Identity(dims[1], dims[1]));
  const Unitary b = kron(Unitary::Identity(dims[0], dims[0]), annihilation(dims[1]));
  const Unitary H = a.adjoint() * b + a * b.adjoint();
  return hermitian_exp(g1 * H, t);
}

/// exp(-i t g2 n_a n_b) on two modes.
inline Unitary cz_unitary(double g2, double t, std::array<int, 2> dims = {2, 2}) {
  if (!(g2 > 0.0)) throw ValidationError("nonpositive coupling g2");
  Unitary U = Unitary::Zero(dims[0] * dims[1], dims[0] * dims[1]);
  for (int na = 0; na < dims[0]; ++na)
    for (int nb = 0; nb < dims[1]; ++nb)
      U(na * dims[1] + nb, na * dims[1] + nb) = std::exp(Complex(0.0, -t * g2 * na * nb));
  return U;
}

enum class SecondSplitter { inverse, same };
enum class CzArm { first, second };

namespace detail {

/// Embeds a unitary acting on `targets` (in that order) into a register operator.
inline Unitary embed(const Unitary& local, const std::vector<std::size_t>& targets, const ModeRegister& reg);

}  // namespace detail

/// BS_{a,b}(t_bs)^dag . CZ_{ctrl,arm}(t_cz) . BS_{a,b}(t_bs) on (ctrl, a, b).
///
/// With the inverse second splitter this is a Fredkin gate up to diagonal
/// phases; with the same-orientation splitter the swap fires on ctrl = 0.
inline Unitary cswap_composite(double g1, double g2, SecondSplitter second = SecondSplitter::inverse,
                               CzArm arm = CzArm::first) {
  const auto times = gate_times(g1, g2);
  const ModeRegister reg{{2, 2, 2}};
  const Unitary bs = detail::embed(bs_unitary(g1, times.t_bs), {1, 2}, reg);
  const Unitary bs2 = second == SecondSplitter::inverse ? Unitary(bs.adjoint()) : bs;
  const std::size_t arm_mode = arm == CzArm::first ? 1 : 2;
  const Unitary cz = detail::embed(cz_unitary(g2, times.t_cz), {0, arm_mode}, reg);
  return bs2 * cz * bs;
}

/// Textbook Fredkin gate on (ctrl, a, b).
inline Unitary fredkin() {
  Unitary F = Unitary::Identity(8, 8);
  F(5, 5) = F(6, 6) = 0.0;  // |101> <-> |110>
  F(5, 6) = F(6, 5) = 1.0;
  return F;
}

inline Unitary swap_matrix() {
  Unitary S = Unitary::Zero(4, 4);
  S(0, 0) = S(3, 3) = 1.0;
  S(1, 2) = S(2, 1) = 1.0;
  return S;
}

// ---------------------------------------------------------------------------
// Gauge comparison

struct GaugeResult {
  bool equivalent = false;
  double fidelity = 0.0;
  Eigen::VectorXcd left;   // D1 diagonal
  Eigen::VectorXcd right;  // D2 diagonal
};

/// Maximizes |Tr(D1 U D2 V^dag)| / dim over diagonal unit-modulus D1, D2 by
/// alternating phase alignment.
inline GaugeResult gauge_equivalent(const Unitary& U, const Unitary& V) {
  if (U.rows() != V.rows() || U.cols() != V.cols() || U.rows() != U.cols())
    throw ValidationError("dimension mismatch");
  const auto dim = U.rows();
  const Unitary M = U.cwiseProduct(V.conjugate());
  auto unit = [](Complex z) { return std::abs(z) < 1e-300 ? Complex(1.0) : std::conj(z) / std::abs(z); };

  GaugeResult out;
  out.left = Eigen::VectorXcd::Ones(dim);
  out.right = Eigen::VectorXcd::Ones(dim);
  double previous = -1.0;
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXcd rows = M * out.right;
    for (Eigen::Index x = 0; x < dim; ++x) out.left[x] = unit(rows[x]);
    const Eigen::VectorXcd cols = M.transpose() * out.left;
    for (Eigen::Index y = 0; y < dim; ++y) out.right[y] = unit(cols[y]);
    out.fidelity = std::min(1.0, std::abs(Complex((out.left.transpose() * M * out.right)(0, 0))) / static_cast<double>(dim));
    if (out.fidelity - previous < 1e-12) break;
    previous = out.fidelity;
  }
  out.equivalent = out.fidelity >= 1.0 - 1e-9;
  return out;
}

// ---------------------------------------------------------------------------
// Gate specifications

struct BeamSplitter {
  std::size_t i, j;
  double g1;
  double duration;
  bool inverse = false;
};

/// Full excitation transfer, a beam splitter run for t_sw.
struct Swap {
  std::size_t i, j;
  double g1;
  bool inverse = false;
};

struct ControlledPhase {
  std::size_t ctrl, tgt;
  double g2;
};

struct ControlledSwap {
  std::size_t ctrl, i, j;
  double g1, g2;
  SecondSplitter second = SecondSplitter::inverse;
  CzArm arm = CzArm::first;
};

/// Single-mode Z, a virtual frame update (zero duration).
struct PhaseFlip {
  std::size_t target;
};

/// Single-mode Hadamard from a fast drive on the mode (zero duration).
struct Hadamard {
  std::size_t target;
};

using GateSpec = std::variant<BeamSplitter, Swap, ControlledPhase, ControlledSwap, PhaseFlip, Hadamard>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline std::vector<std::size_t> targets(const GateSpec& gate) {
  return std::visit(overloaded{
                        [](const BeamSplitter& g) { return std::vector<std::size_t>{g.i, g.j}; },
                        [](const Swap& g) { return std::vector<std::size_t>{g.i, g.j}; },
                        [](const ControlledPhase& g) { return std::vector<std::size_t>{g.ctrl, g.tgt}; },
                        [](const ControlledSwap& g) { return std::vector<std::size_t>{g.ctrl, g.i, g.j}; },
                        [](const PhaseFlip& g) { return std::vector<std::size_t>{g.target}; },
                        [](const Hadamard& g) { return std::vector<std::size_t>{g.target}; },
                    },
                    gate);
}

inline double duration(const GateSpec& gate) {
  return std::visit(overloaded{
                        [](const BeamSplitter& g) { return g.duration; },
                        [](const Swap& g) { return std::numbers::pi / (2.0 * g.g1); },
                        [](const ControlledPhase& g) { return std::numbers::pi / g.g2; },
                        [](const ControlledSwap& g) { return gate_times(g.g1, g.g2).cswap(); },
                        [](const PhaseFlip&) { return 0.0; },
                        [](const Hadamard&) { return 0.0; },
                    },
                    gate);
}

/// Unitary on the gate's targets, in `targets(gate)` order.
inline Unitary local_unitary(const GateSpec& gate, const ModeRegister& reg) {
  auto dim = [&](std::size_t mode) { return reg.dims.at(mode); };
  auto require_qubits = [&](const std::vector<std::size_t>& modes) {
    for (auto m : modes)
      if (dim(m) != 2) throw ValidationError("gate defined for two-level modes only");
  };
  return std::visit(
      overloaded{
          [&](const BeamSplitter& g) -> Unitary {
            return bs_unitary(g.g1, g.inverse ? -g.duration : g.duration, {dim(g.i), dim(g.j)});
          },
          [&](const Swap& g) -> Unitary {
            const double t = std::numbers::pi / (2.0 * g.g1);
            return bs_unitary(g.g1, g.inverse ? -t : t, {dim(g.i), dim(g.j)});
          },
          [&](const ControlledPhase& g) -> Unitary {
            return cz_unitary(g.g2, std::numbers::pi / g.g2, {dim(g.ctrl), dim(g.tgt)});
          },
          [&](const ControlledSwap& g) -> Unitary {
            require_qubits({g.ctrl, g.i, g.j});
            return cswap_composite(g.g1, g.g2, g.second, g.arm);
          },
          [&](const PhaseFlip& g) -> Unitary {
            Unitary Z = Unitary::Zero(dim(g.target), dim(g.target));
            for (int n = 0; n < dim(g.target); ++n) Z(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
            return Z;
          },
          [&](const Hadamard& g) -> Unitary {
            require_qubits({g.target});
            Unitary H(2, 2);
            H << 1.0, 1.0, 1.0, -1.0;
            return H / std::sqrt(2.0);
          },
      },
      gate);
}

namespace detail {

inline void check_targets(const std::vector<std::size_t>& t, const ModeRegister& reg) {
  for (std::size_t a = 0; a < t.size(); ++a) {
    if (t[a] >= reg.size()) throw ValidationError("gate target out of range");
    for (std::size_t b = a + 1; b < t.size(); ++b)
      if (t[a] == t[b]) throw ValidationError("gate targets not distinct");
  }
}

/// In-place application of `local` to the tensor factors `targets`.
inline void apply_local(StateVector& state, const Unitary& local, const std::vector<std::size_t>& targets,
                        const ModeRegister& reg) {
  const std::size_t total = reg.total_dimension();
  std::size_t local_dim = 1;
  for (auto t : targets) local_dim *= static_cast<std::size_t>(reg.dims[t]);
  if (static_cast<std::size_t>(local.rows()) != local_dim) throw ValidationError("local unitary dimension mismatch");

  std::vector<std::size_t> offsets(local_dim, 0);
  for (std::size_t l = 0; l < local_dim; ++l) {
    std::size_t rem = l;
    for (std::size_t k = targets.size(); k-- > 0;) {
      const auto d = static_cast<std::size_t>(reg.dims[targets[k]]);
      offsets[l] += (rem % d) * reg.stride(targets[k]);
      rem /= d;
    }
  }

  Eigen::VectorXcd buf(local_dim);
  for (std::size_t base = 0; base < total; ++base) {
    bool is_base = true;
    for (auto t : targets) {
      if ((base / reg.stride(t)) % static_cast<std::size_t>(reg.dims[t]) != 0) {
        is_base = false;
        break;
      }
    }
    if (!is_base) continue;
    for (std::size_t l = 0; l < local_dim; ++l) buf[l] = state[base + offsets[l]];
    const Eigen::VectorXcd out = local * buf;
    for (std::size_t l = 0; l < local_dim; ++l) state[base + offsets[l]] = out[l];
  }
}

inline Unitary embed(const Unitary& local, const std::vector<std::size_t>& targets, const ModeRegister& reg) {
  const auto dim = static_cast<Eigen::Index>(reg.total_dimension());
  Unitary out(dim, dim);
  for (Eigen::Index col = 0; col < dim; ++col) {
    StateVector e = StateVector::Zero(dim);
    e[col] = 1.0;
    apply_local(e, local, targets, reg);
    out.col(col) = e;
  }
  return out;
}

}  // namespace detail

/// Applies `gate` to `state`. The state must match the register and be normalized.
inline StateVector apply_gate(StateVector state, const GateSpec& gate, const ModeRegister& reg) {
  validate(reg);
  if (static_cast<std::size_t>(state.size()) != reg.total_dimension())
    throw ValidationError("state dimension mismatch");
  if (std::abs(state.norm() - 1.0) > 1e-12) throw ValidationError("unnormalized state");
  const auto t = targets(gate);
  detail::check_targets(t, reg);
  detail::apply_local(state, local_unitary(gate, reg), t, reg);
  return state;
}

/// Full register operator of a gate sequence (applied left to right).
inline Unitary circuit_unitary(const std::vector<GateSpec>& circuit, const ModeRegister& reg) {
  validate(reg);
  const auto dim = static_cast<Eigen::Index>(reg.total_dimension());
  Unitary U = Unitary::Identity(dim, dim);
  for (const auto& gate : circuit) {
    const auto t = targets(gate);
    detail::check_targets(t, reg);
    U = detail::embed(local_unitary(gate, reg), t, reg) * U;
  }
  return U;
}

}  // namespace qcausal::gates
