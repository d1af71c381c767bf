#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "qcausal/qram.hpp"

using namespace qcausal;
using namespace qcausal::qram;

namespace {

constexpr double kPi = std::numbers::pi;

GateCounts init_counts(int n) { return count_gates(schedule_initialization(n)); }

}  // namespace

TEST(Tree, Build) {
  EXPECT_EQ(build_tree(2).node_count(), 1u);
  const auto t = build_tree(8);
  EXPECT_EQ(t.node_count(), 7u);
  EXPECT_EQ(t.depth, 3);
  EXPECT_THROW(build_tree(6), ValidationError);
  EXPECT_THROW(build_tree(1), ValidationError);
}

TEST(Tree, HeapIndicesAreDistinct) {
  const auto t = build_tree(32);
  std::set<std::size_t> seen;
  for (int l = 0; l < t.depth; ++l)
    for (std::size_t i = 0; i < t.nodes_at(l); ++i) seen.insert(t.index(l, i));
  EXPECT_EQ(seen.size(), t.node_count());
  EXPECT_EQ(*seen.rbegin(), t.node_count() - 1);
}

TEST(Layout, ModeCounts) {
  EXPECT_EQ(make_layout(1).modes(), 3u);
  EXPECT_EQ(make_layout(2).modes(), 7u);
  EXPECT_EQ(make_layout(3).modes(), 14u);
  EXPECT_NO_THROW(make_layout(3).mode_register());
  EXPECT_THROW(make_layout(4).mode_register(), ValidationError);
  EXPECT_THROW(make_layout(0), ValidationError);
}

TEST(Initialization, Examples) {
  EXPECT_EQ(init_counts(1).routing_cswaps, 0u);
  EXPECT_EQ(init_counts(1).swaps, 1u);
  EXPECT_EQ(init_counts(2).routing_cswaps, 1u);
  EXPECT_EQ(init_counts(2).swaps, 2u);
  EXPECT_EQ(init_counts(3).routing_cswaps, 3u);
  EXPECT_EQ(init_counts(3).swaps, 3u);
}

TEST(Initialization, GateCountLaw) {
  for (int n = 1; n <= 16; ++n) {
    const auto c = init_counts(n);
    EXPECT_EQ(c.swaps, static_cast<std::size_t>(n));
    EXPECT_EQ(c.routing_cswaps, static_cast<std::size_t>(n * (n - 1) / 2));
    EXPECT_EQ(c.controlled_phases, 0u);
    EXPECT_EQ(schedule_initialization(n).cycle_count(), static_cast<std::size_t>(n * (n + 1) / 2));
  }
}

TEST(Initialization, SwapPrecedesRouting) {
  const auto s = schedule_initialization(3);
  // step k: SWAP cycle, then k-1 routing cycles
  EXPECT_EQ(s.cycles[0].ops[0].kind, OpKind::swap);
  EXPECT_EQ(s.cycles[1].ops[0].kind, OpKind::swap);
  EXPECT_EQ(s.cycles[2].ops[0].kind, OpKind::cswap);
  EXPECT_EQ(s.cycles[3].ops[0].kind, OpKind::swap);
  EXPECT_EQ(s.cycles[4].ops.size(), 1u);
  EXPECT_EQ(s.cycles[5].ops.size(), 2u);
}

TEST(Query, Structure) {
  for (int n : {1, 2, 3, 5}) {
    const auto q = schedule_query(n);
    std::size_t descend = 0, ascend = 0, copy = 0, unload = 0;
    for (const auto& c : q.cycles) {
      descend += c.stage == Stage::descend;
      ascend += c.stage == Stage::ascend;
      copy += c.stage == Stage::copy;
      unload += c.stage == Stage::unload;
    }
    EXPECT_EQ(descend, static_cast<std::size_t>(n - 1));
    EXPECT_EQ(ascend, static_cast<std::size_t>(n - 1));
    EXPECT_EQ(copy, 1u);
    EXPECT_EQ(unload, static_cast<std::size_t>(n * (n + 1) / 2));
  }
  EXPECT_THROW(schedule_query(0), ValidationError);
}

TEST(Schedule, CyclesActOnDisjointModes) {
  for (int n = 1; n <= 8; ++n) {
    EXPECT_NO_THROW(check_disjoint(schedule_initialization(n)));
    EXPECT_NO_THROW(check_disjoint(schedule_query(n)));
  }
  Schedule bad{1, {{Stage::load, {{OpKind::swap, {0, 1, 0}}, {OpKind::hadamard, {1, 0, 0}}}}}};
  EXPECT_THROW(check_disjoint(bad), ValidationError);
}

TEST(Timing, WallTimeIsSumOfCycleMaxima) {
  Schedule s{1,
             {{Stage::load, {{OpKind::swap, {0, 1, 0}}, {OpKind::controlled_phase, {2, 3, 0}}}},
              {Stage::copy, {{OpKind::hadamard, {0, 0, 0}}}}}};
  EXPECT_DOUBLE_EQ(wall_time(s, kPi, kPi / 2.0), 2.0);  // max(t_sw = 0.5, t_cz = 2)
}

TEST(Timing, SingleLevelExample) {
  // t_sw = 0.5, t_cz = 1: load SWAP, copy CZ, unload SWAP.
  const double t = total_time(schedule_initialization(1), schedule_query(1), kPi, kPi);
  EXPECT_DOUBLE_EQ(t, 2.0);
}

TEST(Timing, GrowsWithDepth) {
  double previous = 0.0;
  for (int n = 1; n <= 12; ++n) {
    const double t = total_time(schedule_initialization(n), schedule_query(n), kPi, kPi);
    EXPECT_GT(t, previous);
    previous = t;
  }
}

TEST(Timing, ClosedForm) {
  const double g1 = 2.0, g2 = 3.0;
  const auto gt = gates::gate_times(g1, g2);
  for (int n = 1; n <= 10; ++n) {
    const double load = n * gt.t_sw + n * (n - 1) / 2.0 * gt.cswap();
    const double retrieve = 2.0 * (n - 1) * gt.cswap() + gt.t_cz;
    EXPECT_NEAR(total_time(schedule_initialization(n), schedule_query(n), g1, g2), 2.0 * load + retrieve, 1e-12);
  }
}

TEST(Timing, LogSquaredShape) {
  const double g = kPi * 1e3;
  auto ratio = [&](int n) {
    return total_time(schedule_initialization(n), schedule_query(n), g, g) / (tau0(g, g) * n * n);
  };
  for (int n = 10; n < 20; ++n) EXPECT_LT(std::abs(ratio(n + 1) / ratio(n) - 1.0), 0.05) << n;
}

TEST(Database, Parsing) {
  EXPECT_EQ(parse_database("0110").bits, (std::vector<std::uint8_t>{0, 1, 1, 0}));
  EXPECT_EQ(parse_database(" 01\n10\n").str(), "0110");
  EXPECT_THROW(parse_database("012"), ValidationError);
  EXPECT_THROW(parse_database("011"), ValidationError);
  EXPECT_EQ(random_database(8, 42).str(), random_database(8, 42).str());
}

TEST(ClassicalTrace, Walk) {
  const auto db = parse_database("0110");
  EXPECT_EQ(classical_trace(db, 0), 0);
  EXPECT_EQ(classical_trace(db, 1), 1);
  EXPECT_EQ(classical_trace(db, 2), 1);
  EXPECT_EQ(classical_trace(db, 3), 0);
  EXPECT_THROW(classical_trace(db, 4), ValidationError);
}

TEST(Simulation, BasisExamples) {
  const auto db = parse_database("0110");
  auto r = simulate_query(db, basis_address(4, 2), kPi, kPi);
  EXPECT_EQ(r.table.front().read, 1);
  EXPECT_NEAR(r.table.front().probability, 1.0, 1e-12);
  r = simulate_query(db, basis_address(4, 0), kPi, kPi);
  EXPECT_EQ(r.table.front().read, 0);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
}

TEST(Simulation, SuperpositionExample) {
  const auto db = parse_database("0110");
  Eigen::VectorXcd alpha = Eigen::VectorXcd::Zero(4);
  alpha[0] = alpha[3] = 1.0 / std::sqrt(2.0);
  const auto r = simulate_query(db, alpha, kPi, kPi);
  EXPECT_NEAR(r.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(r.restoration, 1.0, 1e-12);
  ASSERT_EQ(r.table.size(), 2u);
  EXPECT_EQ(r.table[0].read, 0);
  EXPECT_EQ(r.table[1].read, 0);
}

TEST(Simulation, ExhaustiveBasisAgainstTrace) {
  std::mt19937_64 rng(1);
  for (std::size_t N : {2u, 4u, 8u}) {
    for (int trial = 0; trial < 3; ++trial) {
      const auto db = random_database(N, rng());
      for (std::size_t x = 0; x < N; ++x) {
        const auto r = simulate_query(db, basis_address(N, x), 1.3, 0.8);
        EXPECT_EQ(r.table.front().read, classical_trace(db, x)) << db.str() << " x=" << x;
        EXPECT_GE(r.table.front().probability, 1.0 - 1e-9);
        EXPECT_GE(r.fidelity, 1.0 - 1e-9);
        EXPECT_GE(r.restoration, 1.0 - 1e-9);
        EXPECT_NEAR(r.norm, 1.0, 1e-10);
      }
    }
  }
}

TEST(Simulation, Errors) {
  const auto db = parse_database("0110");
  EXPECT_THROW(simulate_query(db, basis_address(8, 0), kPi, kPi), ValidationError);
  EXPECT_THROW(simulate_query(db, 2.0 * basis_address(4, 0), kPi, kPi), ValidationError);
  EXPECT_THROW(simulate_query(random_database(16, 1), basis_address(16, 0), kPi, kPi), ValidationError);
}

TEST(Retrieval, Examples) {
  EXPECT_TRUE(verify_retrieval(parse_database("01")).passed());
  const auto r8 = verify_retrieval(random_database(8, 42));
  EXPECT_TRUE(r8.passed());
  EXPECT_EQ(r8.basis.size(), 8u);
  EXPECT_EQ(r8.superpositions, 10u);
  EXPECT_LE(r8.max_linearity_error, 1e-9);
  const auto ones = verify_retrieval(parse_database("1111"));
  for (const auto& row : ones.basis) EXPECT_EQ(row.read, 1);
}

TEST(Retrieval, ConstantAndAlternatingDatabases) {
  for (const char* text : {"00000000", "11111111", "01010101", "10101010", "00110011"}) {
    const auto report = verify_retrieval(parse_database(text), 42, 2);
    EXPECT_TRUE(report.passed()) << text;
  }
}
