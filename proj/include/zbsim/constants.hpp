#pragma once

// Physical constants (SI, 2019 exact values) and the unit conventions used
// throughout: energies are stored as linear frequencies E/h in GHz, time in
// ns at the circuit level and us at the effective-dynamics level (GHz*ns and
// MHz*us are both dimensionless phases up to the 2*pi that the evolution
// layer adds explicitly). Fluxes are fractions of the flux quantum.

#include <cmath>

namespace zbsim {

inline constexpr double kPi = 3.14159265358979323846;

namespace constants {
inline constexpr double flux_quantum = 2.067833848e-15;   // Wb
inline constexpr double electron_charge = 1.602176634e-19; // C
inline constexpr double planck = 6.62607015e-34;           // J s
inline constexpr double hbar = planck / (2.0 * kPi);       // J s
} // namespace constants

// Linear frequency (GHz or MHz) <-> angular frequency. The only place a 2*pi
// may enter energy bookkeeping.
inline double to_angular(double f) { return 2.0 * kPi * f; }
inline double from_angular(double w) { return w / (2.0 * kPi); }

inline double ghz_to_mhz(double x) { return 1e3 * x; }
inline double mhz_to_ghz(double x) { return 1e-3 * x; }

// Inductance L (pH) -> (Phi0/2pi)^2/L as a linear frequency in GHz.
inline double inductive_energy_ghz(double l_ph) {
  const double phi0_over_2pi = constants::flux_quantum / (2.0 * kPi);
  const double joule = phi0_over_2pi * phi0_over_2pi / (l_ph * 1e-12);
  return joule / constants::planck / 1e9;
}

// Josephson energy E_J (GHz) -> junction inductance Phi0^2/(4 pi^2 E_J) in pH.
inline double junction_inductance_ph(double ej_ghz) {
  const double ej_joule = ej_ghz * 1e9 * constants::planck;
  const double l_h = constants::flux_quantum * constants::flux_quantum /
                     (4.0 * kPi * kPi * ej_joule);
  return l_h * 1e12;
}

} // namespace zbsim
