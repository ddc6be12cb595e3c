#pragma once

// Decoherence-rate estimates for the flux qubit coupled to its control
// circuitry, and the resulting feasibility summary for sideband-driven
// transitions.
//
// Relaxation is treated as circuit noise seen through the qubit's transition
// matrix elements, with one inductive and one capacitive channel:
//
//   Gamma_1 = (M I_01)^2 (2 pi nu_10) Re[Y(nu_10)] / hbar^2 * hbar
//           + ((Cg/C) 2e n_01)^2 (2 pi nu_10) Re[Z(nu_10)] / hbar
//
// evaluated with M in pH, I_01 in nA, nu_10 in GHz, Re Y in siemens and
// Re Z in ohm; the returned rate is in MHz (so T = 1/rate is in us).
//
// Pure dephasing follows the 1/f estimate
//   Gamma_phi = sum_i |A_i| sqrt(alpha_i ln(omega_t / omega_c)),
// A_i the transition-frequency sensitivity (GHz per flux quantum) and
// alpha_i the dimensionless squared 1/f amplitude of channel i.
//
// Gamma_2 = Gamma_1 / 2 + Gamma_phi by construction.

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zbsim/config.hpp"

namespace zbsim::decoherence {

struct DecoherenceError : std::runtime_error {
  explicit DecoherenceError(const std::string& what)
      : std::runtime_error(what) {}
};

struct RelaxationInput {
  double omega10_ghz = 0.0; // qubit transition frequency
  double i01_na = 0.0;      // |<0|I|1>| (or |I_gg| in the diagonal variant)
  double n01 = 0.0;         // island-charge matrix element, Cooper pairs
  NoiseEnvironment env;
};

// Energy relaxation rate in MHz; both channels are proportional to the
// squared matrix element and to the real part of the circuit response.
double relaxation_rate_mhz(const RelaxationInput& in);

// 1/f dephasing in MHz from (sensitivity, squared-amplitude) channel pairs.
// Throws when the log window is empty (omega_t <= omega_c).
double dephasing_rate_mhz(
    const std::vector<std::pair<double, double>>& channels,
    double omega_t_ghz, double omega_c_ghz);

struct AxisFeasibility {
  std::string axis;
  double omega_tilde_mhz = 0.0;   // sideband rate
  double transition_time_us = 0.0; // half flop cycle, 1/(4 omega_tilde)
  double ratio_t2 = 0.0;           // T2 / transition time
};

struct FeasibilityReport {
  double gamma1_mhz = 0.0;
  double gamma_phi_mhz = 0.0;
  double gamma2_mhz = 0.0; // = gamma1/2 + gamma_phi, exact
  double t1_us = 0.0;
  double t2_us = 0.0;
  double sensitivity_ghz_per_flux = 0.0;
  std::vector<AxisFeasibility> axes;
  bool t2_above_1us = false;
  bool claim_satisfied = false; // every axis ratio_t2 > 3
};

FeasibilityReport feasibility(
    const RelaxationInput& relax, double sensitivity_ghz_per_flux,
    const std::vector<std::pair<std::string, double>>& omega_tilde_by_axis);

} // namespace zbsim::decoherence
