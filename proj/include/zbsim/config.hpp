#pragma once

// Parameter containers and configuration loading. Canonical config is a JSON
// document with nested sections (qubit1, qubit2, phase_x, shared_x, drives,
// noise, ...). A small set of flat top-level aliases (ej1_ghz, alpha1, f1,
// f2, nx, omega_x_ghz, ...) is accepted for quick one-qubit configs.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace zbsim {

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct DrivePulse {
  double amplitude = 0.0; // flux-quantum fraction n_i
  double omega_ghz = 0.0; // drive frequency
  double phase = 0.0;     // rad
  int target = 1;         // drive line index i in {1,2,3}
};

struct FluxQubitParams {
  int index = 1;          // l in {1,2}
  double ej_ghz = 300.0;
  double ec_ghz = 10.0;   // e^2/2C_J as a frequency
  double alpha = 0.6;
  double beta = 6.0;
  double f1 = 1.0 / 3.0 + 0.0075;
  double f2 = 1.0 / 3.0 - 0.015;
  double lg_ph = 33.0;    // geometric ring inductance
  double lambda_r = 0.17; // Lambda_l = L_r/L_J
  std::vector<DrivePulse> drives;

  double f3() const { return f1 + 0.5 * f2; } // derived, never stored
};

struct PhaseQubitParams {
  double ejp_ghz = 850.0;
  double ecp_ghz = 850.0e-6;
  double bias_ratio = 0.99; // sin(phi_p0) = I_pb/I_p0
  double lp_ph = 40.0;
  double lrp_ph = 40.0;

  double erp_ghz() const; // (Phi0/2pi)^2 / L_rp
  double elp_ghz() const; // (Phi0/2pi)^2 / L_p
};

struct SharedJunctionParams {
  double ej_ghz = 8000.0;
  double ec_ghz = 0.025;
  double bias_ratio = 0.0;
};

struct DriveSettings {
  double nm = 0.01; // mass-channel amplitude n_3^(1)
  double nx = 0.01;
  double ny = 0.01;
  double nz = 0.01;
  // Optional explicit frequencies/phases; 0 frequency means "solve at
  // resonance from the solved spectrum".
  std::map<std::string, double> omega_ghz; // keys m,x1,x2,y1,y2,z
  std::map<std::string, double> phase;     // same keys
};

// Direct mode-level overrides: when set, these replace the circuit-derived
// (lambda, omega) pairs. Useful for synthetic parameter studies.
struct ModeOverrides {
  std::map<std::string, double> lambda;    // keys x,y,z,X,Y,Z,O
  std::map<std::string, double> omega_ghz; // same keys
  std::map<std::string, double> el_ghz;    // mode-bus coupling per axis x,y,z
};

struct NoiseEnvironment {
  double r_ohm = 50.0;     // flat Re Z; Y = 1/R
  double m_ph = 5.0;       // mutual inductance
  double cg_ratio = 0.0;   // Cg/C
  double alpha_flux = 1e-12; // squared 1/f amplitude (1e-12 ~ 1 uPhi0 noise)
  double omega_t_ghz = 1.0;
  double omega_c_ghz = 1e-9;
  bool diagonal_current = false; // use |I_gg| instead of |<0|I|1>|
};

struct WavepacketSpec {
  std::string kind = "gaussian"; // point | gaussian
  double mean_mhz = 0.0;         // 0 = use the mapped cp
  double width_mhz = 0.0;        // 0 = mean/5
  int samples = 41;
};

struct TimeGrid {
  double t_max_us = 10.0;
  int steps = 2000;
};

struct TargetParams {
  double mc2_mhz = 0.0; // 0 = use engine-mapped values
  double cp_x_mhz = 0.0;
  double cp_y_mhz = 0.0;
  double cp_z_mhz = 0.0;
};

struct EngineOptions {
  // Charge-basis truncation per mode. The shunted sum mode is charging-poor
  // (E_Cs = E_C/(1+4*beta)), so its eigenfunctions need wide charge support:
  // 20 is the smallest truncation whose two lowest levels are stable to
  // 1e-10 relative under a +4 enlargement at the reference operating point.
  int n_max = 20;
  double secular_tol_ghz = 1e-3;
  double eps_den_ghz = 0.1;
  std::string denominators = "exact"; // exact | collapsed
  bool lr_correction = false;   // include -L_r I0^2/2 in H_q0
  bool keep_boundary = false;   // keep the "-1" boundary terms (diagnostics)
};

struct SimulationConfig {
  int dimension = 1; // spatial dimensions: 1, 2 or 3
  FluxQubitParams qubit1;
  std::optional<FluxQubitParams> qubit2;
  std::map<std::string, PhaseQubitParams> phase;   // keys x,y,z
  std::map<std::string, SharedJunctionParams> shared; // keys x,y,z,o
  DriveSettings drives;
  ModeOverrides modes;
  TargetParams target;
  TimeGrid time;
  WavepacketSpec wavepacket;
  NoiseEnvironment noise;
  EngineOptions options;

  std::vector<std::string> axes() const; // {"x"} / {"x","y"} / {"x","y","z"}
};

// Fully defaulted config for a given dimension (circuit inventory included).
SimulationConfig default_config(int dimension);

// Parse + validate. Accepts a JSON document; unknown keys are rejected so
// typos cannot silently fall back to defaults.
SimulationConfig load_config_text(const std::string& text);
SimulationConfig load_config_file(const std::string& path);

// Canonical serialization: fixed key order, every float at 17 significant
// digits. load(serialize(c)) == c field-for-field, and the FNV-1a hash of
// this string is the config hash recorded in the run manifest.
std::string serialize_config(const SimulationConfig& cfg);
uint64_t fnv1a64(const std::string& s);

// Frequency-hierarchy warnings: ">>" means ratio >= 5, "distinct" means
// relative gap >= 1%. Pure function of the mode frequency table.
std::vector<std::string> hierarchy_warnings(
    const std::map<std::string, double>& omega_by_mode,
    double two_x0_ghz, double two_z0_ghz, int dimension);

void validate(const SimulationConfig& cfg); // throws ConfigError

} // namespace zbsim
