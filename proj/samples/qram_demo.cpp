// Loads an address superposition into a four-cell bucket-brigade QRAM and
// prints the retrieved amplitudes.

#include <cstdio>
#include <random>

#include "qcausal/qram.hpp"

int main() {
  using namespace qcausal;
  const auto db = qram::parse_database("0110");
  std::mt19937_64 rng(3);
  const auto address = qram::random_address_state(db.size(), rng);
  const auto result = qram::simulate_query(db, address, 1.0, 1.0);
  for (const auto& row : result.table)
    std::printf("address %zu  D=%d  read=%d  p=%.4f\n", row.address, row.expected, row.read, row.probability);
  std::printf("fidelity %.12f  restoration %.12f\n", result.fidelity, result.restoration);
}
