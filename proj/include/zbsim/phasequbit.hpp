// Harmonic quantization of current-biased junction modes.
//
// Every junction mode (the per-axis dynamical qubits and the shared bus /
// common junctions) is reduced to an oscillator with
//   omega  = sqrt(8 E_C (E_J cos(phi0) + E_r))   [GHz]
//   lambda = (2 E_C / (E_J cos(phi0) + E_r))^{1/4}
// where phi0 = arcsin(bias_ratio) and E_r is an optional series-inductance
// energy. lambda is the zero-point spread: phi = phi0 + lambda (a + a^dag).
//
// A brute-force oracle diagonalizes the full washboard Hamiltonian
//   4 E_C N^2 - E_J (cos phi + bias phi) + (E_r/2)(phi - phi0)^2
// in the oscillator basis centered at phi0 (functions of phi are evaluated
// through the eigendecomposition of a + a^dag). The washboard is unbounded
// below past the barrier; the basis restricts to the local well, which is
// the regime the two-level reduction uses anyway.
#pragma once

#include <Eigen/Dense>

#include "zbsim/config.hpp"

namespace zbsim {

enum class ModeRole { dynamical, bus, common };

struct PhaseMode {
  ModeRole role = ModeRole::dynamical;
  double lambda = 0.0;
  double omega_ghz = 0.0;
  double phi0 = 0.0;
  double er_ghz = 0.0;
};

// Core closed form; throws ConfigError when |bias_ratio| >= 1.
PhaseMode quantize_mode(double ej_ghz, double ec_ghz, double bias_ratio,
                        double er_ghz, ModeRole role);

// Dynamical qubit: series inductance from lrp_ph.
PhaseMode quantize(const PhaseQubitParams& p);

// Shared junction; el_ghz > 0 keeps the parallel-inductor energy inside the
// frequency, el_ghz = 0 is the bare-junction approximation. Callers that
// care about the difference evaluate both.
PhaseMode quantize(const SharedJunctionParams& p, ModeRole role,
                   double el_ghz = 0.0);

// Lowest k levels of the washboard Hamiltonian (GHz), oscillator basis of
// size basis_dim centered at phi0. Throws on basis exhaustion.
Eigen::VectorXd phase_mode_levels(double ej_ghz, double ec_ghz,
                                  double bias_ratio, double er_ghz,
                                  int basis_dim, int k);

struct PhaseOracleResult {
  double omega_ghz = 0.0;         // E1 - E0
  double anharmonicity_ghz = 0.0; // (E2 - E1) - (E1 - E0)
};

PhaseOracleResult oracle_diagonalize(double ej_ghz, double ec_ghz,
                                     double bias_ratio, double er_ghz,
                                     int basis_dim);

} // namespace zbsim
