#pragma once

// End-to-end orchestration: config -> flux-qubit solutions -> mode table ->
// engine input -> effective couplings -> Dirac parameters -> trajectories
// and decoherence summary -> artifacts + run manifest.
//
// Stage outputs are plain values so each stage stays testable on its own.
// Every artifact is deterministic for a fixed config; the only run-to-run
// variation allowed in the manifest is the wall_clock_s block.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zbsim/config.hpp"
#include "zbsim/csvio.hpp"
#include "zbsim/decoherence.hpp"
#include "zbsim/diracmap.hpp"
#include "zbsim/dynamics.hpp"
#include "zbsim/fluxqubit.hpp"
#include "zbsim/manifest.hpp"
#include "zbsim/phasequbit.hpp"
#include "zbsim/rwa.hpp"

namespace zbsim::pipeline {

struct PipelineError : std::runtime_error {
  explicit PipelineError(const std::string& what)
      : std::runtime_error(what) {}
};

// Resolved (lambda, omega) pairs for the seven mode slots of the engine
// (0..2 = per-axis momentum modes, 3..5 = per-axis dynamical junction
// modes, 6 = shared junction), plus the per-axis ring coupling energy.
struct ModeTable {
  std::array<double, rwa::kModeCount> lambda{};
  std::array<double, rwa::kModeCount> omega_ghz{};
  std::array<bool, rwa::kModeCount> present{};
  std::array<double, 3> el_ghz{};
  std::vector<std::string> sources; // "x: override", "X: quantized", ...
};

struct RunResult {
  SimulationConfig cfg;
  FluxQubitSolution q1;
  std::optional<FluxQubitSolution> q2;
  ModeTable modes;
  rwa::EngineInput engine_in;
  rwa::EffectiveModel model;
  dirac::DiracParameters mapped;   // straight from the engine channels
  dirac::DiracParameters resolved; // after explicit target overrides
  bool target_override = false;
  double sensitivity_ghz_per_flux = 0.0;
  decoherence::FeasibilityReport feas;
  std::map<std::string, double> wall_clock_s;
};

FluxQubitSolution solve_flux_stage(const FluxQubitParams& p,
                                   const EngineOptions& opt);

// Central difference of the transition frequency over f1, GHz per flux
// quantum.
double flux_sensitivity(const FluxQubitParams& p, const EngineOptions& opt,
                        double step = 1e-4);

ModeTable solve_mode_table(const SimulationConfig& cfg);

rwa::EngineInput make_engine_input(const SimulationConfig& cfg,
                                   const FluxQubitSolution& q1,
                                   const FluxQubitSolution* q2,
                                   const ModeTable& modes);

// Full run through the effective model, Dirac map, and feasibility stages.
RunResult run(const SimulationConfig& cfg);

// ---- artifacts ----

// Flux-qubit spectrum sweep. Columns: f1, e0..e3 (GHz), gap_ghz, z0..z3,
// x0..x3, i_gg_na, i_ee_na, i01_na.
csv::Table spectrum_sweep(const FluxQubitParams& base,
                          const EngineOptions& opt, double f1_lo,
                          double f1_hi, int points);

csv::Table mode_table_csv(const ModeTable& modes);
csv::Table effective_csv(const rwa::EffectiveModel& model);

struct ZitterResult {
  csv::Table table; // t_us, x, y, z (+ *_oracle with the cross-check on)
  bool closed_form_used = true;
  bool analysis_ok = false;
  std::string analysis_error;
  dynamics::TremorAnalysis analysis;
  double oracle_max_dev = 0.0; // only when the cross-check ran
  std::vector<double> momenta;
};
ZitterResult zitter_stage(const RunResult& rr, bool with_oracle);

manifest::Json dirac_json(const RunResult& rr);
manifest::Json feasibility_json(const decoherence::FeasibilityReport& rep);
manifest::Json build_manifest(const RunResult& rr, const ZitterResult& zr,
                              uint64_t seed);

// ---- sweeps ----

struct SweepSpec {
  std::string key; // f1, f2, alpha, beta, ej_ghz, ec_ghz (qubit 1)
  double start = 0.0, stop = 0.0;
  int n = 0;
};
SweepSpec parse_sweep(const std::string& text); // "KEY=START:STOP:N"

// One flux solve + sensitivity + rates per point. parallel toggles the
// OpenMP loop; results are stored by index so both paths agree bitwise.
csv::Table run_sweep(const SimulationConfig& cfg, const SweepSpec& spec,
                     bool parallel = true);

// ---- the bundled everything-run ----

// Writes spectrum.csv, modes.csv, effective.csv, dirac.json, zitter.csv,
// feasibility.json and manifest.json into out_dir; returns the file names
// in that order.
std::vector<std::string> run_all(const SimulationConfig& cfg,
                                 const std::string& out_dir, bool with_oracle,
                                 uint64_t seed);

} // namespace zbsim::pipeline
