#pragma once

// Bucket-brigade QRAM: router tree, clock-cycle schedules, time accounting
// and a state-vector simulator for small trees.
//
// Register layout (mode 0 most significant):
//
//   [ address a_1 .. a_n | routers R(l, i), level-major | ports P_0 .. P_{2^{n-1}-1} ]
//
// Router R(l, i) sits at depth l, position i. Port P_i is the carrier slot
// adjacent to the deepest router R(n-1, i); P_0 doubles as the bus.
//
// Address loading: address qubit k is swapped into R(k-1, 0) and routed down
// level k-1 by the k-1 routers above it, so that after loading the active
// path holds one address bit per level.
//
// Retrieval: the bus is prepared in |+>, routed down n-1 levels to the port
// below the addressed leaf pair, picks up a phase (-1)^{D_x} (a virtual Z for
// D_{2i} and a CZ with R(n-1, i) when D_{2i} != D_{2i+1}), is routed back and
// read out with a Hadamard. Loading is then reversed.

#include <algorithm>
#include <array>
#include <bit>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qcausal/gates.hpp"
#include "qcausal/params.hpp"

namespace qcausal::qram {

using gates::Complex;
using gates::StateVector;

// ---------------------------------------------------------------------------
// Structure

struct RouterTree {
  int depth = 0;

  std::size_t leaves() const { return std::size_t{1} << depth; }
  std::size_t node_count() const { return leaves() - 1; }
  std::size_t nodes_at(int level) const { return std::size_t{1} << level; }
  /// Heap index of router (level, position).
  std::size_t index(int level, std::size_t position) const { return (std::size_t{1} << level) - 1 + position; }
  bool is_internal(int level) const { return level + 1 < depth; }
};

inline RouterTree build_tree(std::size_t N) {
  if (N < 2 || !std::has_single_bit(N)) throw ValidationError("N must be a power of two, N >= 2");
  return RouterTree{std::countr_zero(N)};
}

struct QramLayout {
  RouterTree tree;

  int n() const { return tree.depth; }
  std::size_t address(int k) const { return static_cast<std::size_t>(k); }  // k = 0 .. n-1
  std::size_t router(int level, std::size_t position) const {
    return static_cast<std::size_t>(n()) + tree.index(level, position);
  }
  std::size_t port_count() const { return tree.leaves() / 2; }
  std::size_t port(std::size_t i) const { return static_cast<std::size_t>(n()) + tree.node_count() + i; }
  std::size_t bus() const { return port(0); }
  std::size_t modes() const { return static_cast<std::size_t>(n()) + tree.node_count() + port_count(); }

  gates::ModeRegister mode_register() const { return gates::validate(gates::ModeRegister{std::vector<int>(modes(), 2)}); }
};

inline QramLayout make_layout(int n) {
  if (n < 1) throw ValidationError("empty tree");
  return QramLayout{RouterTree{n}};
}

// ---------------------------------------------------------------------------
// Schedules

enum class OpKind { swap, swap_inverse, cswap, controlled_phase, phase_flip, hadamard };

struct ScheduledOp {
  OpKind kind;
  std::array<std::size_t, 3> modes{};  // (i, j), (ctrl, i, j), (ctrl, tgt) or (target)

  std::size_t arity() const {
    switch (kind) {
      case OpKind::cswap: return 3;
      case OpKind::phase_flip:
      case OpKind::hadamard: return 1;
      default: return 2;
    }
  }
};

enum class Stage { load, prepare, descend, flip, copy, ascend, readout, unload };

inline std::string to_string(Stage s) {
  switch (s) {
    case Stage::load: return "load";
    case Stage::prepare: return "prepare";
    case Stage::descend: return "descend";
    case Stage::flip: return "flip";
    case Stage::copy: return "copy";
    case Stage::ascend: return "ascend";
    case Stage::readout: return "readout";
    case Stage::unload: return "unload";
  }
  return "unknown";
}

struct Cycle {
  Stage stage;
  std::vector<ScheduledOp> ops;
};

struct Schedule {
  int n = 0;
  std::vector<Cycle> cycles;

  std::size_t cycle_count() const { return cycles.size(); }
};

inline gates::GateSpec to_gate(const ScheduledOp& op, double g1, double g2) {
  const auto& m = op.modes;
  switch (op.kind) {
    case OpKind::swap: return gates::Swap{m[0], m[1], g1, false};
    case OpKind::swap_inverse: return gates::Swap{m[0], m[1], g1, true};
    case OpKind::cswap: return gates::ControlledSwap{m[0], m[1], m[2], g1, g2};
    case OpKind::controlled_phase: return gates::ControlledPhase{m[0], m[1], g2};
    case OpKind::phase_flip: return gates::PhaseFlip{m[0]};
    case OpKind::hadamard: return gates::Hadamard{m[0]};
  }
  throw ValidationError("unknown operation");
}

inline double op_duration(OpKind kind, const gates::GateTimes& t) {
  switch (kind) {
    case OpKind::swap:
    case OpKind::swap_inverse: return t.t_sw;
    case OpKind::cswap: return t.cswap();
    case OpKind::controlled_phase: return t.t_cz;
    case OpKind::phase_flip:
    case OpKind::hadamard: return 0.0;
  }
  return 0.0;
}

namespace detail {

/// One routing layer: every router on `level` steers the pair of slots below it
/// among `slot(0) .. slot(2^span - 1)`.
template <class Slot>
Cycle routing_layer(const QramLayout& L, Stage stage, int level, int span, Slot slot) {
  Cycle c{stage, {}};
  const int s = span - level;
  for (std::size_t i = 0; i < L.tree.nodes_at(level); ++i) {
    const std::size_t left = i << s;
    const std::size_t right = left + (std::size_t{1} << (s - 1));
    c.ops.push_back({OpKind::cswap, {L.router(level, i), slot(left), slot(right)}});
  }
  return c;
}

inline std::vector<Cycle> load_cycles(const QramLayout& L, Stage stage) {
  std::vector<Cycle> out;
  for (int k = 1; k <= L.n(); ++k) {
    const int target = k - 1;
    out.push_back({stage, {{OpKind::swap, {L.address(k - 1), L.router(target, 0), 0}}}});
    for (int level = 0; level < target; ++level)
      out.push_back(routing_layer(L, stage, level, target, [&](std::size_t p) { return L.router(target, p); }));
  }
  return out;
}

inline std::vector<Cycle> reversed_load(const QramLayout& L) {
  auto cycles = load_cycles(L, Stage::unload);
  std::reverse(cycles.begin(), cycles.end());
  for (auto& c : cycles)
    for (auto& op : c.ops)
      if (op.kind == OpKind::swap) op.kind = OpKind::swap_inverse;
  return cycles;
}

}  // namespace detail

/// Address loading: for k = 1..n, one SWAP into the tree followed by k-1
/// routing layers.
inline Schedule schedule_initialization(int n) {
  const auto L = make_layout(n);
  return Schedule{n, detail::load_cycles(L, Stage::load)};
}

/// Retrieval plus unloading. `db` selects the data gates; without it every
/// port gets a copy gate, which is the worst case for timing.
inline Schedule schedule_query(int n, const std::vector<std::uint8_t>* db = nullptr) {
  const auto L = make_layout(n);
  if (db && db->size() != L.tree.leaves()) throw ValidationError("database size does not match tree");
  Schedule s{n, {}};
  s.cycles.push_back({Stage::prepare, {{OpKind::hadamard, {L.bus(), 0, 0}}}});

  auto port = [&](std::size_t p) { return L.port(p); };
  std::vector<Cycle> descend;
  for (int level = 0; level + 1 < n; ++level) descend.push_back(detail::routing_layer(L, Stage::descend, level, n - 1, port));
  s.cycles.insert(s.cycles.end(), descend.begin(), descend.end());

  Cycle flip{Stage::flip, {}};
  Cycle copy{Stage::copy, {}};
  for (std::size_t i = 0; i < L.port_count(); ++i) {
    if (db && (*db)[2 * i]) flip.ops.push_back({OpKind::phase_flip, {L.port(i), 0, 0}});
    if (!db || (*db)[2 * i] != (*db)[2 * i + 1])
      copy.ops.push_back({OpKind::controlled_phase, {L.router(n - 1, i), L.port(i), 0}});
  }
  s.cycles.push_back(std::move(flip));
  s.cycles.push_back(std::move(copy));

  for (auto it = descend.rbegin(); it != descend.rend(); ++it) {
    Cycle c = *it;
    c.stage = Stage::ascend;
    s.cycles.push_back(std::move(c));
  }
  s.cycles.push_back({Stage::readout, {{OpKind::hadamard, {L.bus(), 0, 0}}}});

  auto unload = detail::reversed_load(L);
  s.cycles.insert(s.cycles.end(), unload.begin(), unload.end());
  return s;
}

/// Throws if two operations in one cycle touch the same mode.
inline void check_disjoint(const Schedule& s) {
  for (const auto& c : s.cycles) {
    std::vector<std::size_t> used;
    for (const auto& op : c.ops)
      for (std::size_t k = 0; k < op.arity(); ++k) used.push_back(op.modes[k]);
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
      throw ValidationError("overlapping operations within a cycle");
  }
}

/// Sum over cycles of the longest gate in the cycle.
inline double wall_time(const Schedule& s, double g1, double g2) {
  const auto t = gates::gate_times(g1, g2);
  double total = 0.0;
  for (const auto& c : s.cycles) {
    double longest = 0.0;
    for (const auto& op : c.ops) longest = std::max(longest, op_duration(op.kind, t));
    total += longest;
  }
  return total;
}

inline double total_time(const Schedule& init, const Schedule& query, double g1, double g2) {
  return wall_time(init, g1, g2) + wall_time(query, g1, g2);
}

struct GateCounts {
  std::size_t swaps = 0;
  std::size_t routing_cswaps = 0;   // routing steps applied to the travelling qubit
  std::size_t physical_cswaps = 0;  // every CSWAP in the layers, including idle routers
  std::size_t controlled_phases = 0;
  std::size_t single_mode = 0;
};

inline GateCounts count_gates(const Schedule& s) {
  GateCounts g;
  for (const auto& c : s.cycles) {
    bool has_cswap = false;
    for (const auto& op : c.ops) {
      switch (op.kind) {
        case OpKind::swap:
        case OpKind::swap_inverse: ++g.swaps; break;
        case OpKind::cswap:
          ++g.physical_cswaps;
          has_cswap = true;
          break;
        case OpKind::controlled_phase: ++g.controlled_phases; break;
        default: ++g.single_mode;
      }
    }
    if (has_cswap) ++g.routing_cswaps;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Classical data

struct ClassicalDatabase {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  int depth() const { return build_tree(bits.size()).depth; }
  std::string str() const {
    std::string s;
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
  }
};

inline ClassicalDatabase make_database(std::vector<std::uint8_t> bits) {
  build_tree(bits.size());
  for (auto& b : bits) b = b ? 1 : 0;
  return {std::move(bits)};
}

/// Parses '0'/'1' characters; whitespace is ignored.
inline ClassicalDatabase parse_database(std::string_view text) {
  std::vector<std::uint8_t> bits;
  for (char ch : text) {
    if (ch == '0' || ch == '1') bits.push_back(static_cast<std::uint8_t>(ch - '0'));
    else if (ch != ' ' && ch != '\n' && ch != '\r' && ch != '\t')
      throw ValidationError(std::string("invalid database character '") + ch + "'");
  }
  return make_database(std::move(bits));
}

inline ClassicalDatabase load_database(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("database not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_database(buf.str());
}

inline ClassicalDatabase random_database(std::size_t N, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::uint8_t> bits(N);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  return make_database(std::move(bits));
}

/// Walks the routing rules bit by bit: bit 0 keeps left, bit 1 turns right.
inline int classical_trace(const ClassicalDatabase& db, std::size_t address) {
  const int n = db.depth();
  if (address >= db.size()) throw ValidationError("address out of range");
  std::size_t node = 0;  // position within the current level
  for (int level = 0; level < n; ++level) {
    const std::size_t bit = (address >> (n - 1 - level)) & 1u;
    node = 2 * node + bit;
  }
  return db.bits[node];
}

// ---------------------------------------------------------------------------
// Simulation

struct RetrievalRow {
  std::size_t address = 0;
  int expected = 0;
  int read = 0;
  double probability = 0.0;  // probability that the bus shows `expected`
};

struct QueryResult {
  StateVector state;
  std::vector<RetrievalRow> table;  // one row per address with nonzero amplitude
  double fidelity = 0.0;            // |<ideal|out>|^2, ideal = sum_x alpha_x |x>|D_x>|0...>
  double restoration = 0.0;         // weight with routers and spare ports back at |0>
  double norm = 0.0;
};

namespace detail {

/// Full-register index of (address x, bus bit, everything else |0>).
inline std::size_t reference_index(const QramLayout& L, const gates::ModeRegister& reg, std::size_t x, int bus) {
  std::size_t idx = 0;
  for (int k = 0; k < L.n(); ++k)
    if ((x >> (L.n() - 1 - k)) & 1u) idx += reg.stride(L.address(k));
  if (bus) idx += reg.stride(L.bus());
  return idx;
}

}  // namespace detail

/// Runs loading, retrieval and unloading on the full register.
///
/// `address_state` has 2^n amplitudes, address x with a_1 as its most
/// significant bit.
inline QueryResult simulate_query(const ClassicalDatabase& db, const Eigen::VectorXcd& address_state, double g1,
                                  double g2) {
  const int n = db.depth();
  const auto L = make_layout(n);
  const auto reg = L.mode_register();
  if (static_cast<std::size_t>(address_state.size()) != db.size())
    throw ValidationError("address state dimension mismatch");
  if (std::abs(address_state.norm() - 1.0) > 1e-12) throw ValidationError("unnormalized address state");

  StateVector psi = StateVector::Zero(static_cast<Eigen::Index>(reg.total_dimension()));
  for (std::size_t x = 0; x < db.size(); ++x) psi[detail::reference_index(L, reg, x, 0)] = address_state[x];

  const Schedule init = schedule_initialization(n);
  const Schedule query = schedule_query(n, &db.bits);
  for (const Schedule* s : {&init, &query})
    for (const auto& c : s->cycles)
      for (const auto& op : c.ops) psi = gates::apply_gate(std::move(psi), to_gate(op, g1, g2), reg);

  QueryResult out;
  out.norm = psi.norm();
  Complex overlap = 0.0;
  double reset = 0.0;
  for (std::size_t x = 0; x < db.size(); ++x) {
    const int dx = classical_trace(db, x);
    overlap += std::conj(address_state[x]) * psi[detail::reference_index(L, reg, x, dx)];
    const double p0 = std::norm(psi[detail::reference_index(L, reg, x, 0)]);
    const double p1 = std::norm(psi[detail::reference_index(L, reg, x, 1)]);
    reset += p0 + p1;
    const double weight = std::norm(address_state[x]);
    if (weight > 0.0) {
      RetrievalRow row;
      row.address = x;
      row.expected = dx;
      row.read = p1 > p0 ? 1 : 0;
      row.probability = (dx ? p1 : p0) / weight;
      out.table.push_back(row);
    }
  }
  out.fidelity = std::norm(overlap);
  out.restoration = reset;
  out.state = std::move(psi);
  return out;
}

inline Eigen::VectorXcd basis_address(std::size_t N, std::size_t x) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(N));
  v[static_cast<Eigen::Index>(x)] = 1.0;
  return v;
}

inline Eigen::VectorXcd random_address_state(std::size_t N, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(N));
  for (auto& z : v) z = Complex(gauss(rng), gauss(rng));
  return v / v.norm();
}

struct RetrievalReport {
  std::vector<RetrievalRow> basis;  // one row per basis address
  std::size_t superpositions = 0;
  double min_fidelity = 1.0;        // over basis and superposition queries
  double min_restoration = 1.0;
  double max_linearity_error = 0.0; // superposition output vs sum of basis outputs
  std::vector<std::string> mismatches;

  bool passed(double tol = 1e-9) const {
    return mismatches.empty() && min_fidelity >= 1.0 - tol && min_restoration >= 1.0 - tol &&
           max_linearity_error <= tol;
  }
};

/// Every basis address plus `superpositions` random address states.
inline RetrievalReport verify_retrieval(const ClassicalDatabase& db, std::uint64_t seed = 42,
                                        std::size_t superpositions = 10, double g1 = std::numbers::pi,
                                        double g2 = std::numbers::pi) {
  RetrievalReport report;
  std::vector<StateVector> basis_out;
  for (std::size_t x = 0; x < db.size(); ++x) {
    auto r = simulate_query(db, basis_address(db.size(), x), g1, g2);
    const auto& row = r.table.front();
    report.basis.push_back(row);
    if (row.read != row.expected || row.probability < 1.0 - 1e-9)
      report.mismatches.push_back("address " + std::to_string(x) + ": expected " + std::to_string(row.expected) +
                                  ", read " + std::to_string(row.read));
    report.min_fidelity = std::min(report.min_fidelity, r.fidelity);
    report.min_restoration = std::min(report.min_restoration, r.restoration);
    basis_out.push_back(std::move(r.state));
  }

  std::mt19937_64 rng(seed);
  for (std::size_t s = 0; s < superpositions; ++s) {
    const auto alpha = random_address_state(db.size(), rng);
    auto r = simulate_query(db, alpha, g1, g2);
    StateVector expected = StateVector::Zero(r.state.size());
    for (std::size_t x = 0; x < db.size(); ++x) expected += alpha[static_cast<Eigen::Index>(x)] * basis_out[x];
    report.max_linearity_error = std::max(report.max_linearity_error, (r.state - expected).cwiseAbs().maxCoeff());
    report.min_fidelity = std::min(report.min_fidelity, r.fidelity);
    report.min_restoration = std::min(report.min_restoration, r.restoration);
    ++report.superpositions;
  }
  return report;
}

}  // namespace qcausal::qram
