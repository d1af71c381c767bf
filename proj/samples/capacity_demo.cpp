// Capacity bound for a micron-pitch lattice under each velocity source.

#include <cstdio>

#include "qcausal/bounds.hpp"

int main() {
  using namespace qcausal;
  HardwareParams p;
  p.a = 1e-6;
  p.delta_t = 1e-3;
  p.g1 = p.g2 = coupling_for_tau0(1e-3);
  p.lambda = {1e10, 2.5e9};
  p.nu = 2;
  p.m = 1.0;

  std::printf("naive bound at c: %.3e qubits\n", naive_max_qubits(p.a, p.delta_t, p.c_max));
  for (auto source : {VelocitySource::lieb_robinson, VelocitySource::qft, VelocitySource::group}) {
    Conventions c;
    c.velocity_source = source;
    for (int d = 1; d <= 3; ++d) {
      p.d = d;
      try {
        const auto r = qram_max_qubits(p, c);
        std::printf("%-14s d=%d  v=%.3e m/s  N_max=%.3e\n", to_string(source).c_str(), d, r.velocity_used,
                    r.max_qubits_total);
      } catch (const ConvergenceError& e) {
        // v tau0 / a too small for N = R log^2 N to have a root
        std::printf("%-14s d=%d  no bound (%s)\n", to_string(source).c_str(), d, e.what());
      }
    }
  }
}
