#include "zbsim/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "zbsim/constants.hpp"

namespace zbsim::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr const char* kAxisNames[3] = {"x", "y", "z"};
constexpr const char* kUpperNames[3] = {"X", "Y", "Z"};

} // namespace

FluxQubitSolution solve_flux_stage(const FluxQubitParams& p,
                                   const EngineOptions& opt) {
  ChargeBasisGrid grid{opt.n_max, opt.n_max};
  return solve_flux_qubit(p, grid, opt.lr_correction);
}

double flux_sensitivity(const FluxQubitParams& p, const EngineOptions& opt,
                        double step) {
  ChargeBasisGrid grid{opt.n_max, opt.n_max};
  auto gap_at = [&](double f1) {
    FluxQubitParams q = p;
    q.f1 = f1;
    EigenSystem es =
        solve_physical_spectrum(build_h_q0(q, grid, opt.lr_correction), grid, 2);
    return es.values(1) - es.values(0);
  };
  return (gap_at(p.f1 + step) - gap_at(p.f1 - step)) / (2.0 * step);
}

ModeTable solve_mode_table(const SimulationConfig& cfg) {
  ModeTable t;
  auto overridden = [&](const std::string& name, double* l, double* w) {
    auto it = cfg.modes.lambda.find(name);
    auto jt = cfg.modes.omega_ghz.find(name);
    if (it == cfg.modes.lambda.end() && jt == cfg.modes.omega_ghz.end())
      return false;
    if (it == cfg.modes.lambda.end() || jt == cfg.modes.omega_ghz.end())
      throw PipelineError("mode override for '" + name +
                          "' needs both lambda and omega_ghz");
    *l = it->second;
    *w = jt->second;
    return true;
  };

  for (int k = 0; k < cfg.dimension; ++k) {
    const std::string lo = kAxisNames[k], up = kUpperNames[k];
    double l = 0.0, w = 0.0;
    if (overridden(lo, &l, &w)) {
      t.lambda[k] = l;
      t.omega_ghz[k] = w;
      t.present[k] = true;
      t.sources.push_back(lo + ": override");
    } else if (auto it = cfg.phase.find(lo); it != cfg.phase.end()) {
      PhaseMode pm = quantize(it->second);
      t.lambda[k] = pm.lambda;
      t.omega_ghz[k] = pm.omega_ghz;
      t.present[k] = true;
      t.sources.push_back(lo + ": quantized");
    } else {
      throw PipelineError("no dynamical-mode parameters for axis " + lo);
    }

    if (overridden(up, &l, &w)) {
      t.lambda[3 + k] = l;
      t.omega_ghz[3 + k] = w;
      t.present[3 + k] = true;
      t.sources.push_back(up + ": override");
    } else if (auto it = cfg.shared.find(lo); it != cfg.shared.end()) {
      PhaseMode pm = quantize(it->second, ModeRole::bus);
      t.lambda[3 + k] = pm.lambda;
      t.omega_ghz[3 + k] = pm.omega_ghz;
      t.present[3 + k] = true;
      t.sources.push_back(up + ": quantized");
    } else {
      throw PipelineError("no bus-junction parameters for axis " + lo);
    }

    auto el = cfg.modes.el_ghz.find(lo);
    t.el_ghz[k] = el != cfg.modes.el_ghz.end()
                      ? el->second
                      : inductive_energy_ghz(cfg.qubit1.lg_ph);
  }

  double l = 0.0, w = 0.0;
  if (overridden("O", &l, &w)) {
    t.lambda[rwa::kModeO] = l;
    t.omega_ghz[rwa::kModeO] = w;
    t.present[rwa::kModeO] = true;
    t.sources.push_back("O: override");
  } else if (auto it = cfg.shared.find("o"); it != cfg.shared.end()) {
    PhaseMode pm = quantize(it->second, ModeRole::common);
    t.lambda[rwa::kModeO] = pm.lambda;
    t.omega_ghz[rwa::kModeO] = pm.omega_ghz;
    t.present[rwa::kModeO] = true;
    t.sources.push_back("O: quantized");
  } else if (cfg.dimension >= 2) {
    throw PipelineError("shared junction 'o' required for dimension >= 2");
  }
  return t;
}

rwa::EngineInput make_engine_input(const SimulationConfig& cfg,
                                   const FluxQubitSolution& q1,
                                   const FluxQubitSolution* q2,
                                   const ModeTable& modes) {
  rwa::EngineInput in;
  in.dimension = cfg.dimension;
  in.zcoup[0] = q1.zc;
  in.xcoup[0] = q1.xc;
  in.splitting_ghz[0] = q1.splitting_ghz;
  if (cfg.dimension >= 2) {
    if (!q2) throw PipelineError("dimension >= 2 needs a second flux qubit");
    in.zcoup[1] = q2->zc;
    in.xcoup[1] = q2->xc;
    in.splitting_ghz[1] = q2->splitting_ghz;
  }
  in.lambda = modes.lambda;
  in.omega_ghz = modes.omega_ghz;
  in.el_ghz = modes.el_ghz;

  auto put = [&](const std::string& key, double n) {
    rwa::EngineInput::Drive d;
    d.n = n;
    if (auto it = cfg.drives.omega_ghz.find(key);
        it != cfg.drives.omega_ghz.end())
      d.omega_ghz = it->second;
    if (auto it = cfg.drives.phase.find(key); it != cfg.drives.phase.end())
      d.phase = it->second;
    in.drives[key] = d;
  };
  put("m", cfg.drives.nm);
  put("x1", cfg.drives.nx);
  if (cfg.dimension >= 2) {
    put("x2", cfg.drives.nx);
    put("y1", cfg.drives.ny);
    put("y2", cfg.drives.ny);
  }
  if (cfg.dimension >= 3) put("z", cfg.drives.nz);

  in.options = cfg.options;
  return in;
}

RunResult run(const SimulationConfig& cfg) {
  validate(cfg);
  RunResult rr;
  rr.cfg = cfg;

  auto t0 = Clock::now();
  rr.q1 = solve_flux_stage(cfg.qubit1, cfg.options);
  if (cfg.qubit2) rr.q2 = solve_flux_stage(*cfg.qubit2, cfg.options);
  rr.wall_clock_s["flux_qubit"] = seconds_since(t0);

  t0 = Clock::now();
  rr.sensitivity_ghz_per_flux = flux_sensitivity(cfg.qubit1, cfg.options);
  rr.wall_clock_s["sensitivity"] = seconds_since(t0);

  t0 = Clock::now();
  rr.modes = solve_mode_table(cfg);
  rr.engine_in = rwa::resonant_drives(make_engine_input(
      cfg, rr.q1, rr.q2 ? &*rr.q2 : nullptr, rr.modes));
  rr.wall_clock_s["modes"] = seconds_since(t0);

  t0 = Clock::now();
  rr.model = rwa::effective_hamiltonian(rr.engine_in);
  rr.wall_clock_s["effective"] = seconds_since(t0);

  t0 = Clock::now();
  rr.mapped = dirac::map_parameters(rr.model, rr.engine_in);
  rr.resolved = rr.mapped;
  const TargetParams& tg = cfg.target;
  if (tg.mc2_mhz != 0.0) {
    rr.resolved.mc2_mhz = tg.mc2_mhz;
    rr.resolved.theta = 0.0;
    rr.resolved.mass_channel_mhz = cxd(tg.mc2_mhz, 0.0);
    rr.target_override = true;
  }
  const double cps[3] = {tg.cp_x_mhz, tg.cp_y_mhz, tg.cp_z_mhz};
  for (int k = 0; k < cfg.dimension && k < 3; ++k) {
    if (cps[k] == 0.0) continue;
    if (rr.resolved.delta[k] <= 0.0)
      throw PipelineError("kinetic target on an axis without a mode width");
    // Target fixes the wavepacket-center kinetic energy: cp at |p| = 1.
    rr.resolved.omega_tilde_mhz[k] = cps[k] / (2.0 * rr.resolved.delta[k]);
    rr.resolved.c_mhz[k] = cps[k];
    rr.target_override = true;
  }
  if (cfg.dimension >= 2) {
    rr.resolved.az =
        (rr.resolved.mc2_mhz == 0.0 && rr.resolved.cp0_mhz != 0.0)
            ? std::numeric_limits<double>::quiet_NaN()
            : dirac::rapidity(rr.resolved.cp0_mhz, rr.resolved.mc2_mhz);
  }
  rr.wall_clock_s["dirac"] = seconds_since(t0);

  t0 = Clock::now();
  decoherence::RelaxationInput rel;
  rel.omega10_ghz = rr.q1.gap;
  rel.i01_na =
      cfg.noise.diagonal_current ? std::abs(rr.q1.i_gg_na) : rr.q1.i_ge_na;
  rel.n01 = std::abs(rr.q1.x[3]);
  rel.env = cfg.noise;
  std::vector<std::pair<std::string, double>> wt;
  for (int k = 0; k < cfg.dimension && k < 3; ++k)
    wt.emplace_back(kAxisNames[k], rr.resolved.omega_tilde_mhz[k]);
  rr.feas = decoherence::feasibility(rel, rr.sensitivity_ghz_per_flux, wt);
  rr.wall_clock_s["feasibility"] = seconds_since(t0);

  return rr;
}

csv::Table spectrum_sweep(const FluxQubitParams& base,
                          const EngineOptions& opt, double f1_lo,
                          double f1_hi, int points) {
  if (points < 2 || !(f1_hi > f1_lo))
    throw PipelineError("spectrum sweep needs points >= 2 and f1_hi > f1_lo");
  csv::Table t;
  t.columns = {"f1",    "e0_ghz", "e1_ghz",   "e2_ghz",   "e3_ghz",
               "gap_ghz", "z0",     "z1",       "z2",       "z3",
               "x0",      "x1",     "x2",       "x3",       "i_gg_na",
               "i_ee_na", "i01_na"};
  t.rows.resize(points);
  std::vector<std::string> errors(points);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (int i = 0; i < points; ++i) {
    try {
      FluxQubitParams p = base;
      p.f1 = f1_lo + (f1_hi - f1_lo) * i / (points - 1);
      FluxQubitSolution s = solve_flux_stage(p, opt);
      std::vector<std::string> row{csv::fmt(p.f1)};
      for (int e = 0; e < 4; ++e) row.push_back(csv::fmt(s.evals(e)));
      row.push_back(csv::fmt(s.gap));
      for (int j = 0; j < 4; ++j) row.push_back(csv::fmt(s.z[j]));
      for (int j = 0; j < 4; ++j) row.push_back(csv::fmt(s.x[j]));
      row.push_back(csv::fmt(s.i_gg_na));
      row.push_back(csv::fmt(s.i_ee_na));
      row.push_back(csv::fmt(s.i_ge_na));
      t.rows[i] = std::move(row);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw PipelineError("spectrum sweep: " + e);
  return t;
}

csv::Table mode_table_csv(const ModeTable& modes) {
  static const char* names[rwa::kModeCount] = {"x", "y", "z", "X",
                                               "Y", "Z", "O"};
  csv::Table t;
  t.columns = {"mode", "present", "lambda", "omega_ghz", "el_ghz"};
  for (int m = 0; m < rwa::kModeCount; ++m) {
    t.rows.push_back({names[m], modes.present[m] ? "1" : "0",
                      csv::fmt(modes.lambda[m]), csv::fmt(modes.omega_ghz[m]),
                      csv::fmt(m < 3 ? modes.el_ghz[m] : 0.0)});
  }
  return t;
}

csv::Table effective_csv(const rwa::EffectiveModel& model) {
  csv::Table t;
  t.columns = {"channel",        "re_mhz",          "im_mhz",
               "closed_re_mhz",  "closed_im_mhz",   "max_rel_mismatch",
               "terms_kept",     "terms_dropped",   "discarded_paths"};
  for (const auto& ch : model.channels) {
    t.rows.push_back({ch.name, csv::fmt(ch.channel_mhz.real()),
                      csv::fmt(ch.channel_mhz.imag()),
                      csv::fmt(ch.closed_form_mhz.real()),
                      csv::fmt(ch.closed_form_mhz.imag()),
                      csv::fmt(ch.max_rel_mismatch),
                      std::to_string(ch.census.kept),
                      std::to_string(ch.census.dropped),
                      std::to_string(ch.census.discarded_paths)});
  }
  return t;
}

ZitterResult zitter_stage(const RunResult& rr, bool with_oracle) {
  const dirac::DiracParameters& dp = rr.resolved;
  const int dim = dp.dimension;
  const int mdim = dim == 1 ? 2 : 4;

  // Wavepacket in dimensionless momentum units along the first axis.
  const double c = dp.c_mhz[0];
  double p_mean = 0.0, p_width = 0.0;
  const WavepacketSpec& ws = rr.cfg.wavepacket;
  if (c > 0.0) {
    // Default center: one zero-point momentum width, where the kinetic
    // energy equals c_mhz (the configured target when one is set).
    p_mean = ws.mean_mhz != 0.0 ? ws.mean_mhz / c : 1.0;
    p_width = ws.width_mhz != 0.0 ? ws.width_mhz / c : p_mean / 5.0;
  }
  ZitterResult zr;
  zr.momenta = dynamics::wavepacket_momenta(ws, p_mean, p_width);

  std::vector<double> tg(rr.cfg.time.steps + 1);
  for (int i = 0; i <= rr.cfg.time.steps; ++i)
    tg[i] = rr.cfg.time.t_max_us * i / rr.cfg.time.steps;

  Vec psi0 = Vec::Zero(mdim);
  psi0(0) = 1.0;
  auto gens = dirac::dirac_generators(mdim);
  std::vector<Mat> vops;
  for (int k = 0; k < dim && k < 3; ++k)
    vops.push_back(4.0 * kPi * dp.omega_tilde_mhz[k] * gens[k]);

  // The spectral expression needs every sampled Hamiltonian non-singular;
  // by the anticommutation structure that only fails when all coefficients
  // vanish at some sampled momentum.
  bool closed = true;
  for (double p : zr.momenta) {
    const double e2 = dp.mc2_mhz * dp.mc2_mhz + (c * p) * (c * p) +
                      (dim >= 2 ? dp.cp0_mhz * dp.cp0_mhz : 0.0);
    if (e2 <= 0.0) closed = false;
  }
  zr.closed_form_used = closed;

  auto make_closed = [&](double p) {
    Mat h = dirac::assemble_standard(dp, {p, 0.0, 0.0});
    return dynamics::zb_closed_form(h, psi0, vops, tg);
  };
  auto make_oracle = [&](double p) {
    Mat h = dirac::assemble_standard(dp, {p, 0.0, 0.0});
    return dynamics::zb_oracle(h, psi0, vops, rr.cfg.time.t_max_us,
                               rr.cfg.time.steps, 256);
  };

  dynamics::Trajectory main =
      closed ? dynamics::wavepacket_average(zr.momenta, make_closed)
             : dynamics::wavepacket_average(zr.momenta, make_oracle);

  dynamics::Trajectory check;
  if (with_oracle) {
    check = closed ? dynamics::wavepacket_average(zr.momenta, make_oracle)
                   : dynamics::wavepacket_average(zr.momenta, make_closed);
    double dev = 0.0;
    for (size_t i = 0; i < main.r.size(); ++i)
      for (int a = 0; a < 3; ++a)
        dev = std::max(dev, std::abs(main.r[i][a] - check.r[i][a]));
    zr.oracle_max_dev = dev;
  }

  zr.table.columns = {"t_us", "x", "y", "z"};
  if (with_oracle) {
    zr.table.columns.push_back("x_oracle");
    zr.table.columns.push_back("y_oracle");
    zr.table.columns.push_back("z_oracle");
  }
  for (size_t i = 0; i < tg.size(); ++i) {
    std::vector<std::string> row{csv::fmt(tg[i])};
    for (int a = 0; a < 3; ++a) row.push_back(csv::fmt(main.r[i][a]));
    if (with_oracle)
      for (int a = 0; a < 3; ++a) row.push_back(csv::fmt(check.r[i][a]));
    zr.table.rows.push_back(std::move(row));
  }

  try {
    zr.analysis = dynamics::analyze_tremor(main, 0);
    zr.analysis_ok = true;
  } catch (const dynamics::DynamicsError& e) {
    zr.analysis_ok = false;
    zr.analysis_error = e.what();
  }
  return zr;
}

manifest::Json dirac_json(const RunResult& rr) {
  auto pack = [](const dirac::DiracParameters& p) {
    manifest::Json j;
    j["dimension"] = p.dimension;
    j["mc2_mhz"] = p.mc2_mhz;
    j["theta"] = p.theta;
    j["cp0_mhz"] = p.cp0_mhz;
    j["az"] = p.az;
    j["mass_channel_mhz"] = {p.mass_channel_mhz.real(),
                             p.mass_channel_mhz.imag()};
    j["omega_tilde_mhz"] = p.omega_tilde_mhz;
    j["delta"] = p.delta;
    j["c_mhz"] = p.c_mhz;
    return j;
  };
  manifest::Json j;
  j["mapped"] = pack(rr.mapped);
  j["resolved"] = pack(rr.resolved);
  j["target_override"] = rr.target_override;
  return j;
}

manifest::Json feasibility_json(const decoherence::FeasibilityReport& rep) {
  manifest::Json j;
  j["gamma1_mhz"] = rep.gamma1_mhz;
  j["gamma_phi_mhz"] = rep.gamma_phi_mhz;
  j["gamma2_mhz"] = rep.gamma2_mhz;
  j["t1_us"] = rep.t1_us;
  j["t2_us"] = rep.t2_us;
  j["sensitivity_ghz_per_flux"] = rep.sensitivity_ghz_per_flux;
  j["t2_above_1us"] = rep.t2_above_1us;
  j["claim_satisfied"] = rep.claim_satisfied;
  j["axes"] = manifest::Json::array();
  for (const auto& a : rep.axes) {
    manifest::Json ja;
    ja["axis"] = a.axis;
    ja["omega_tilde_mhz"] = a.omega_tilde_mhz;
    ja["transition_time_us"] = a.transition_time_us;
    ja["ratio_t2"] = a.ratio_t2;
    j["axes"].push_back(ja);
  }
  return j;
}

manifest::Json build_manifest(const RunResult& rr, const ZitterResult& zr,
                              uint64_t seed) {
  manifest::Json j;
  j["tool"] = {{"name", manifest::kToolName},
               {"version", manifest::kToolVersion}};
  const std::string canon = serialize_config(rr.cfg);
  char hash[32];
  std::snprintf(hash, sizeof hash, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(canon)));
  j["config_hash"] = hash;
  j["seed"] = seed;
  j["dimension"] = rr.cfg.dimension;
  j["config"] = manifest::Json::parse(canon);

  manifest::Json d;
  auto pack_qubit = [](const FluxQubitSolution& q) {
    manifest::Json x;
    x["gap_ghz"] = q.gap;
    x["splitting_ghz"] = q.splitting_ghz;
    x["theta"] = q.theta;
    x["z"] = q.z;
    x["x"] = q.x;
    x["zc_ghz"] = q.zc;
    x["xc_ghz"] = q.xc;
    x["mu_ghz"] = q.mu;
    x["nu"] = q.nu;
    x["i_gg_na"] = q.i_gg_na;
    x["i_ee_na"] = q.i_ee_na;
    x["i01_na"] = q.i_ge_na;
    return x;
  };
  d["qubit1"] = pack_qubit(rr.q1);
  if (rr.q2) d["qubit2"] = pack_qubit(*rr.q2);

  manifest::Json modes;
  static const char* names[rwa::kModeCount] = {"x", "y", "z", "X",
                                               "Y", "Z", "O"};
  for (int m = 0; m < rwa::kModeCount; ++m) {
    if (!rr.modes.present[m]) continue;
    modes[names[m]] = {{"lambda", rr.modes.lambda[m]},
                       {"omega_ghz", rr.modes.omega_ghz[m]}};
  }
  for (int k = 0; k < rr.cfg.dimension && k < 3; ++k)
    modes[std::string("el_") + names[k] + "_ghz"] = rr.modes.el_ghz[k];
  modes["sources"] = rr.modes.sources;
  d["modes"] = modes;

  manifest::Json drv;
  for (const auto& [key, dd] : rr.engine_in.drives)
    drv[key] = {{"n", dd.n}, {"omega_ghz", dd.omega_ghz}, {"phase", dd.phase}};
  d["drives_resolved"] = drv;

  d["channels"] = manifest::Json::array();
  for (const auto& ch : rr.model.channels) {
    manifest::Json c;
    c["name"] = ch.name;
    c["re_mhz"] = ch.channel_mhz.real();
    c["im_mhz"] = ch.channel_mhz.imag();
    c["closed_re_mhz"] = ch.closed_form_mhz.real();
    c["closed_im_mhz"] = ch.closed_form_mhz.imag();
    c["max_rel_mismatch"] = ch.max_rel_mismatch;
    c["terms_kept"] = ch.census.kept;
    c["terms_dropped"] = ch.census.dropped;
    c["discarded_paths"] = ch.census.discarded_paths;
    d["channels"].push_back(c);
  }

  d["dirac"] = dirac_json(rr);
  d["sensitivity_ghz_per_flux"] = rr.sensitivity_ghz_per_flux;
  d["feasibility"] = feasibility_json(rr.feas);

  manifest::Json z;
  z["closed_form_used"] = zr.closed_form_used;
  z["momenta_count"] = zr.momenta.size();
  if (!zr.momenta.empty()) {
    z["p_min"] = zr.momenta.front();
    z["p_max"] = zr.momenta.back();
  }
  if (zr.analysis_ok) {
    z["analysis"] = {{"drift_velocity", zr.analysis.drift_velocity},
                     {"frequency_mhz", zr.analysis.frequency_mhz},
                     {"amplitude", zr.analysis.amplitude},
                     {"crossings", zr.analysis.crossings}};
  } else {
    z["analysis_error"] = zr.analysis_error;
  }
  if (zr.oracle_max_dev > 0.0) z["oracle_max_dev"] = zr.oracle_max_dev;
  d["zitter"] = z;

  j["derived"] = d;

  j["warnings"] = manifest::Json::array();
  for (const auto& line : rr.model.resonance.lines)
    if (!line.ok)
      j["warnings"].push_back("off-resonant drive " + line.name);
  for (const auto& w : rr.model.resonance.warnings) j["warnings"].push_back(w);

  j["notes"] = manifest::Json::array();
  j["notes"].push_back(
      "denominators=exact integrates with full partial-sum denominators; "
      "denominators=collapsed replaces each by its leading mode frequency "
      "and reproduces the documented closed forms exactly (the two agree to "
      "second order in mode-frequency ratios)");
  j["notes"].push_back(
      "mass channel convention: drive amplitude n acts at half weight per "
      "quadrature, |mass| = (n/2) sqrt(Z1^2 + (omega_m Z3)^2)");
  j["notes"].push_back(
      "mass-plane angle reported on the principal branch "
      "atan2(quadrature, in-phase); the diagonalizing reflection is an "
      "involution so both angle signs give the same diagonal form");
  j["notes"].push_back(
      "momentum-offset rapidity solves sinh(2 az) = -cp0/mc2; the boost is "
      "refused when mc2 = 0 with cp0 != 0");
  j["notes"].push_back(
      "initial spinor is (1,0,...) in the qubit product basis; default "
      "wavepacket is a Gaussian of equally weighted quantile samples "
      "centered where the kinetic energy equals the sideband rate, width "
      "one fifth of the center");
  if (rr.target_override)
    j["notes"].push_back(
        "explicit mass/kinetic targets override the circuit-mapped channel "
        "values for the trajectory and feasibility stages; mapped values "
        "are retained under derived.dirac.mapped");

  j["wall_clock_s"] = rr.wall_clock_s;
  return j;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec s;
  const auto eq = text.find('=');
  if (eq == std::string::npos)
    throw PipelineError("sweep spec must look like KEY=START:STOP:N");
  s.key = text.substr(0, eq);
  const std::string rest = text.substr(eq + 1);
  const auto c1 = rest.find(':');
  const auto c2 = rest.find(':', c1 == std::string::npos ? 0 : c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos)
    throw PipelineError("sweep spec must look like KEY=START:STOP:N");
  try {
    s.start = std::stod(rest.substr(0, c1));
    s.stop = std::stod(rest.substr(c1 + 1, c2 - c1 - 1));
    s.n = std::stoi(rest.substr(c2 + 1));
  } catch (const std::exception&) {
    throw PipelineError("sweep spec must look like KEY=START:STOP:N");
  }
  if (s.n < 2) throw PipelineError("sweep needs at least 2 points");
  return s;
}

csv::Table run_sweep(const SimulationConfig& cfg, const SweepSpec& spec,
                     bool parallel) {
  auto apply = [&](double v) {
    SimulationConfig c = cfg;
    if (spec.key == "f1") c.qubit1.f1 = v;
    else if (spec.key == "f2") c.qubit1.f2 = v;
    else if (spec.key == "alpha") c.qubit1.alpha = v;
    else if (spec.key == "beta") c.qubit1.beta = v;
    else if (spec.key == "ej_ghz") c.qubit1.ej_ghz = v;
    else if (spec.key == "ec_ghz") c.qubit1.ec_ghz = v;
    else throw PipelineError("unsupported sweep key: " + spec.key);
    return c;
  };
  apply(spec.start); // key validation before any work

  csv::Table t;
  t.columns = {spec.key,       "gap_ghz",
               "splitting_ghz", "z0",
               "z1",            "z2",
               "z3",            "x0",
               "x1",            "x2",
               "x3",            "i_gg_na",
               "i_ee_na",       "i01_na",
               "sensitivity_ghz_per_flux", "gamma1_mhz",
               "gamma_phi_mhz", "gamma2_mhz"};
  t.rows.resize(spec.n);
  std::vector<FluxQubitSolution> sols(spec.n);
  std::vector<double> sens(spec.n, 0.0);
  std::vector<std::string> errors(spec.n);
  auto value_at = [&](int i) {
    return spec.start + (spec.stop - spec.start) * i / (spec.n - 1);
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) if (parallel)
#endif
  for (int i = 0; i < spec.n; ++i) {
    try {
      SimulationConfig c = apply(value_at(i));
      sols[i] = solve_flux_stage(c.qubit1, c.options);
      // For any other key the frame-flux derivative needs its own solves;
      // when f1 itself is swept the grid already provides it.
      if (spec.key != "f1")
        sens[i] = flux_sensitivity(c.qubit1, c.options);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw PipelineError("sweep: " + e);

  if (spec.key == "f1") {
    const double h = (spec.stop - spec.start) / (spec.n - 1);
    for (int i = 0; i < spec.n; ++i) {
      const int lo = std::max(0, i - 1), hi = std::min(spec.n - 1, i + 1);
      sens[i] = (sols[hi].gap - sols[lo].gap) / ((hi - lo) * h);
    }
  }

  for (int i = 0; i < spec.n; ++i) {
    const FluxQubitSolution& s = sols[i];
    decoherence::RelaxationInput rel;
    rel.omega10_ghz = s.gap;
    rel.i01_na =
        cfg.noise.diagonal_current ? std::abs(s.i_gg_na) : s.i_ge_na;
    rel.n01 = std::abs(s.x[3]);
    rel.env = cfg.noise;
    const double g1 = decoherence::relaxation_rate_mhz(rel);
    const double gphi = decoherence::dephasing_rate_mhz(
        {{sens[i], cfg.noise.alpha_flux}}, cfg.noise.omega_t_ghz,
        cfg.noise.omega_c_ghz);
    std::vector<std::string> row{csv::fmt(value_at(i)),
                                 csv::fmt(s.gap),
                                 csv::fmt(s.splitting_ghz)};
    for (int jj = 0; jj < 4; ++jj) row.push_back(csv::fmt(s.z[jj]));
    for (int jj = 0; jj < 4; ++jj) row.push_back(csv::fmt(s.x[jj]));
    row.push_back(csv::fmt(s.i_gg_na));
    row.push_back(csv::fmt(s.i_ee_na));
    row.push_back(csv::fmt(s.i_ge_na));
    row.push_back(csv::fmt(sens[i]));
    row.push_back(csv::fmt(g1));
    row.push_back(csv::fmt(gphi));
    row.push_back(csv::fmt(0.5 * g1 + gphi));
    t.rows[i] = std::move(row);
  }
  return t;
}

std::vector<std::string> run_all(const SimulationConfig& cfg,
                                 const std::string& out_dir, bool with_oracle,
                                 uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  auto path = [&](const std::string& name) {
    return (fs::path(out_dir) / name).string();
  };

  RunResult rr = run(cfg);

  auto t0 = Clock::now();
  csv::Table spec = spectrum_sweep(cfg.qubit1, cfg.options,
                                   cfg.qubit1.f1 - 0.2, cfg.qubit1.f1 + 0.2,
                                   41);
  rr.wall_clock_s["spectrum_csv"] = seconds_since(t0);

  t0 = Clock::now();
  ZitterResult zr = zitter_stage(rr, with_oracle);
  rr.wall_clock_s["zitter"] = seconds_since(t0);

  csv::write_table(path("spectrum.csv"), spec);
  csv::write_table(path("modes.csv"), mode_table_csv(rr.modes));
  csv::write_table(path("effective.csv"), effective_csv(rr.model));
  manifest::write_text(path("dirac.json"), manifest::dump(dirac_json(rr)));
  csv::write_table(path("zitter.csv"), zr.table);
  manifest::write_text(path("feasibility.json"),
                       manifest::dump(feasibility_json(rr.feas)));
  manifest::write_text(path("manifest.json"),
                       manifest::dump(build_manifest(rr, zr, seed)));

  return {"spectrum.csv", "modes.csv",  "effective.csv", "dirac.json",
          "zitter.csv",   "feasibility.json", "manifest.json"};
}

} // namespace zbsim::pipeline
