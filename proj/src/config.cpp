#include "zbsim/config.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "zbsim/constants.hpp"
#include <json.hpp>

using nlohmann::json;

namespace zbsim {

double PhaseQubitParams::erp_ghz() const { return inductive_energy_ghz(lrp_ph); }
double PhaseQubitParams::elp_ghz() const { return inductive_energy_ghz(lp_ph); }

std::vector<std::string> SimulationConfig::axes() const {
  if (dimension == 1) return {"x"};
  if (dimension == 2) return {"x", "y"};
  return {"x", "y", "z"};
}

SimulationConfig default_config(int dimension) {
  if (dimension < 1 || dimension > 3)
    throw ConfigError("dimension out of range (1, 2 or 3)");
  SimulationConfig cfg;
  cfg.dimension = dimension;
  cfg.qubit1 = FluxQubitParams{};
  cfg.qubit1.index = 1;
  if (dimension >= 2) {
    cfg.qubit2 = FluxQubitParams{};
    cfg.qubit2->index = 2;
  }
  // Phase qubits per axis; Josephson energies staggered so the three
  // dynamical mode frequencies stay distinct.
  PhaseQubitParams px; px.ejp_ghz = 850.0;  px.ecp_ghz = 850.0e-6;
  PhaseQubitParams py; py.ejp_ghz = 1100.0; py.ecp_ghz = 1100.0e-6;
  PhaseQubitParams pz; pz.ejp_ghz = 1350.0; pz.ecp_ghz = 1350.0e-6;
  cfg.phase["x"] = px;
  if (dimension >= 2) cfg.phase["y"] = py;
  if (dimension >= 3) cfg.phase["z"] = pz;
  // Shared buses: E_J fixed at 8000 GHz; charging energies chosen so the
  // plasma frequencies sit at 40/45/50 GHz and the common bus at 250 GHz,
  // which satisfies the ratio-5 hierarchy against both the qubit splittings
  // and the dynamical modes.
  SharedJunctionParams sx; sx.ec_ghz = 1600.0 / 64000.0;
  SharedJunctionParams sy; sy.ec_ghz = 2025.0 / 64000.0;
  SharedJunctionParams sz; sz.ec_ghz = 2500.0 / 64000.0;
  SharedJunctionParams so; so.ec_ghz = 62500.0 / 64000.0;
  cfg.shared["x"] = sx;
  if (dimension >= 2) {
    cfg.shared["y"] = sy;
    cfg.shared["o"] = so;
  }
  if (dimension >= 3) cfg.shared["z"] = sz;
  // Reference operating point: rest energy 5 MHz, kinetic scale 0.1 MHz at
  // the packet center, so the beat comes out near 10 MHz against a
  // microsecond trajectory window.
  cfg.target.mc2_mhz = 5.0;
  cfg.target.cp_x_mhz = 0.1;
  if (dimension >= 2) cfg.target.cp_y_mhz = 0.1;
  if (dimension >= 3) cfg.target.cp_z_mhz = 0.1;
  return cfg;
}

void validate(const SimulationConfig& cfg) {
  if (cfg.dimension < 1 || cfg.dimension > 3)
    throw ConfigError("dimension out of range (1, 2 or 3)");
  auto check_qubit = [](const FluxQubitParams& q, const char* name) {
    if (!(q.ej_ghz > 0.0)) throw ConfigError(std::string(name) + ".ej_ghz must be > 0");
    if (!(q.ec_ghz > 0.0)) throw ConfigError(std::string(name) + ".ec_ghz must be > 0");
    if (!(q.ej_ghz / q.ec_ghz > 1.0))
      throw ConfigError(std::string(name) + ": ej/ec must exceed 1");
    if (!(q.alpha > 0.0 && q.alpha < 1.0))
      throw ConfigError(std::string(name) + ": alpha out of range");
    if (!(q.beta > 0.0)) throw ConfigError(std::string(name) + ": beta must be > 0");
    if (!(q.f1 >= 0.0 && q.f1 < 1.0))
      throw ConfigError(std::string(name) + ": f1 out of range [0,1)");
    if (!(q.f2 >= 0.0 && q.f2 < 1.0))
      throw ConfigError(std::string(name) + ": f2 out of range [0,1)");
    for (const auto& d : q.drives) {
      if (!(d.amplitude >= 0.0 && d.amplitude <= 0.05))
        throw ConfigError(std::string(name) + ": drive amplitude out of range [0,0.05]");
      if (!(d.omega_ghz > 0.0))
        throw ConfigError(std::string(name) + ": drive frequency must be > 0");
      if (d.target < 1 || d.target > 3)
        throw ConfigError(std::string(name) + ": drive target out of range");
    }
  };
  check_qubit(cfg.qubit1, "qubit1");
  if (cfg.dimension >= 2 && !cfg.qubit2)
    throw ConfigError("dimension >= 2 requires qubit2");
  if (cfg.qubit2) check_qubit(*cfg.qubit2, "qubit2");

  for (const auto& [axis, p] : cfg.phase) {
    if (!(std::abs(p.bias_ratio) < 1.0))
      throw ConfigError("phase_" + axis + ": bias_ratio at or beyond critical current");
    if (!(p.ejp_ghz > 0.0 && p.ecp_ghz > 0.0))
      throw ConfigError("phase_" + axis + ": energies must be > 0");
    if (!(p.lp_ph > 0.0 && p.lrp_ph > 0.0))
      throw ConfigError("phase_" + axis + ": inductances must be > 0");
  }
  // Required circuit inventory per dimension.
  auto need_phase = [&](const char* a) {
    if (!cfg.phase.count(a)) throw ConfigError(std::string("missing phase_") + a);
  };
  auto need_shared = [&](const char* a) {
    if (!cfg.shared.count(a)) throw ConfigError(std::string("missing shared_") + a);
  };
  need_phase("x");
  need_shared("x");
  if (cfg.dimension >= 2) { need_phase("y"); need_shared("y"); need_shared("o"); }
  if (cfg.dimension >= 3) { need_phase("z"); need_shared("z"); }

  // Bus hierarchy E_JP >> E_Jp (reject below ratio 5).
  for (const auto& [axis, s] : cfg.shared) {
    if (!(s.ej_ghz > 0.0 && s.ec_ghz > 0.0))
      throw ConfigError("shared_" + axis + ": energies must be > 0");
    double ej_small = cfg.qubit1.ej_ghz;
    if (axis != "o" && cfg.phase.count(axis))
      ej_small = std::max(ej_small, cfg.phase.at(axis).ejp_ghz);
    if (s.ej_ghz < 5.0 * ej_small)
      throw ConfigError("shared_" + axis + ": bus ej_ghz violates the >> hierarchy"
                        " against the qubit junctions (ratio below 5)");
  }

  auto amp_ok = [](double n, const char* name) {
    if (!(n >= 0.0 && n <= 0.05))
      throw ConfigError(std::string("drives.") + name + " out of range [0,0.05]");
  };
  amp_ok(cfg.drives.nm, "nm");
  amp_ok(cfg.drives.nx, "nx");
  amp_ok(cfg.drives.ny, "ny");
  amp_ok(cfg.drives.nz, "nz");

  if (!(cfg.noise.r_ohm > 0.0)) throw ConfigError("noise.r_ohm must be > 0");
  if (!(cfg.noise.omega_t_ghz > cfg.noise.omega_c_ghz && cfg.noise.omega_c_ghz > 0.0))
    throw ConfigError("noise: omega_t must exceed omega_c > 0");
  if (cfg.wavepacket.kind != "point" && cfg.wavepacket.kind != "gaussian")
    throw ConfigError("wavepacket.kind must be point or gaussian");
  if (cfg.wavepacket.samples < 1) throw ConfigError("wavepacket.samples must be >= 1");
  if (cfg.wavepacket.width_mhz < 0.0) throw ConfigError("wavepacket.width_mhz must be >= 0");
  if (!(cfg.time.t_max_us > 0.0) || cfg.time.steps < 2)
    throw ConfigError("time grid invalid");
  if (cfg.options.n_max < 8) throw ConfigError("options.n_max below minimum 8");
  if (!(cfg.options.secular_tol_ghz > 0.0)) throw ConfigError("options.secular_tol_ghz must be > 0");
  if (!(cfg.options.eps_den_ghz > 0.0)) throw ConfigError("options.eps_den_ghz must be > 0");
  if (cfg.options.denominators != "exact" && cfg.options.denominators != "collapsed")
    throw ConfigError("options.denominators must be exact or collapsed");
}

namespace {

const char* kDriveKeys[] = {"m", "x1", "x2", "y1", "y2", "z"};

void reject_unknown(const json& j, std::initializer_list<const char*> known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known)
      if (it.key() == k) { ok = true; break; }
    if (!ok) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

double num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number()) throw ConfigError(std::string(key) + " must be a number");
  return j.at(key).get<double>();
}

void parse_qubit(const json& j, FluxQubitParams& q, const std::string& where) {
  reject_unknown(j, {"ej_ghz", "ec_ghz", "alpha", "beta", "f1", "f2", "lg_ph", "lambda_r"}, where);
  q.ej_ghz = num(j, "ej_ghz", q.ej_ghz);
  q.ec_ghz = num(j, "ec_ghz", q.ec_ghz);
  q.alpha = num(j, "alpha", q.alpha);
  q.beta = num(j, "beta", q.beta);
  q.f1 = num(j, "f1", q.f1);
  q.f2 = num(j, "f2", q.f2);
  q.lg_ph = num(j, "lg_ph", q.lg_ph);
  q.lambda_r = num(j, "lambda_r", q.lambda_r);
}

void parse_phase(const json& j, PhaseQubitParams& p, const std::string& where) {
  reject_unknown(j, {"ejp_ghz", "ecp_ghz", "bias_ratio", "lp_ph", "lrp_ph"}, where);
  p.ejp_ghz = num(j, "ejp_ghz", p.ejp_ghz);
  p.ecp_ghz = num(j, "ecp_ghz", p.ecp_ghz);
  p.bias_ratio = num(j, "bias_ratio", p.bias_ratio);
  p.lp_ph = num(j, "lp_ph", p.lp_ph);
  p.lrp_ph = num(j, "lrp_ph", p.lrp_ph);
}

void parse_shared(const json& j, SharedJunctionParams& s, const std::string& where) {
  reject_unknown(j, {"ej_ghz", "ec_ghz", "bias_ratio"}, where);
  s.ej_ghz = num(j, "ej_ghz", s.ej_ghz);
  s.ec_ghz = num(j, "ec_ghz", s.ec_ghz);
  s.bias_ratio = num(j, "bias_ratio", s.bias_ratio);
}

} // namespace

SimulationConfig load_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("parse error: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("top level must be an object");

  int dimension = 1;
  if (j.contains("dimension")) {
    if (!j.at("dimension").is_number_integer())
      throw ConfigError("dimension must be an integer");
    dimension = j.at("dimension").get<int>();
  }
  SimulationConfig cfg = default_config(dimension);

  reject_unknown(j, {"dimension", "qubit1", "qubit2",
                     "phase_x", "phase_y", "phase_z",
                     "shared_x", "shared_y", "shared_z", "shared_o",
                     "drives", "modes", "target", "time", "wavepacket",
                     "noise", "options",
                     // flat aliases
                     "ej1_ghz", "ec1_ghz", "alpha1", "beta1", "f1", "f2",
                     "ej2_ghz", "ec2_ghz", "alpha2", "beta2",
                     "nx", "ny", "nz", "nm",
                     "omega_x_ghz", "omega_y_ghz", "omega_z_ghz"},
                 "config");

  if (j.contains("qubit1")) parse_qubit(j.at("qubit1"), cfg.qubit1, "qubit1");
  if (j.contains("qubit2")) {
    if (!cfg.qubit2) { cfg.qubit2 = FluxQubitParams{}; cfg.qubit2->index = 2; }
    parse_qubit(j.at("qubit2"), *cfg.qubit2, "qubit2");
  }
  for (std::string a : {"x", "y", "z"}) {
    std::string key = "phase_" + a;
    if (j.contains(key)) {
      if (!cfg.phase.count(a)) cfg.phase[a] = PhaseQubitParams{};
      parse_phase(j.at(key), cfg.phase[a], key);
    }
  }
  for (std::string a : {"x", "y", "z", "o"}) {
    std::string key = "shared_" + a;
    if (j.contains(key)) {
      if (!cfg.shared.count(a)) cfg.shared[a] = SharedJunctionParams{};
      parse_shared(j.at(key), cfg.shared[a], key);
    }
  }

  if (j.contains("drives")) {
    const json& d = j.at("drives");
    reject_unknown(d, {"nm", "nx", "ny", "nz",
                       "omega_m_ghz", "omega_x1_ghz", "omega_x2_ghz",
                       "omega_y1_ghz", "omega_y2_ghz", "omega_z_ghz",
                       "phi_m", "phi_x1", "phi_x2", "phi_y1", "phi_y2", "phi_z"},
                   "drives");
    cfg.drives.nm = num(d, "nm", cfg.drives.nm);
    cfg.drives.nx = num(d, "nx", cfg.drives.nx);
    cfg.drives.ny = num(d, "ny", cfg.drives.ny);
    cfg.drives.nz = num(d, "nz", cfg.drives.nz);
    for (const char* k : kDriveKeys) {
      std::string ok = std::string("omega_") + k + "_ghz";
      std::string pk = std::string("phi_") + k;
      if (d.contains(ok)) cfg.drives.omega_ghz[k] = d.at(ok).get<double>();
      if (d.contains(pk)) cfg.drives.phase[k] = d.at(pk).get<double>();
    }
  }

  if (j.contains("modes")) {
    const json& m = j.at("modes");
    const std::string all = "xyzXYZO", dyn = "xyz";
    for (auto it = m.begin(); it != m.end(); ++it) {
      const std::string& k = it.key();
      double v = it.value().get<double>();
      // lambda_<m>, omega_<m>_ghz (m in x,y,z,X,Y,Z,O), el_<a>_ghz (a in x,y,z)
      if (k.size() == 8 && k.rfind("lambda_", 0) == 0 && all.find(k[7]) != std::string::npos)
        cfg.modes.lambda[std::string(1, k[7])] = v;
      else if (k.size() == 11 && k.rfind("omega_", 0) == 0 && k.substr(7) == "_ghz" &&
               all.find(k[6]) != std::string::npos)
        cfg.modes.omega_ghz[std::string(1, k[6])] = v;
      else if (k.size() == 8 && k.rfind("el_", 0) == 0 && k.substr(4) == "_ghz" &&
               dyn.find(k[3]) != std::string::npos)
        cfg.modes.el_ghz[std::string(1, k[3])] = v;
      else
        throw ConfigError("unknown key '" + k + "' in modes");
    }
  }

  if (j.contains("target")) {
    const json& t = j.at("target");
    reject_unknown(t, {"mc2_mhz", "cp_x_mhz", "cp_y_mhz", "cp_z_mhz"}, "target");
    cfg.target.mc2_mhz = num(t, "mc2_mhz", 0.0);
    cfg.target.cp_x_mhz = num(t, "cp_x_mhz", 0.0);
    cfg.target.cp_y_mhz = num(t, "cp_y_mhz", 0.0);
    cfg.target.cp_z_mhz = num(t, "cp_z_mhz", 0.0);
  }
  if (j.contains("time")) {
    const json& t = j.at("time");
    reject_unknown(t, {"t_max_us", "steps"}, "time");
    cfg.time.t_max_us = num(t, "t_max_us", cfg.time.t_max_us);
    if (t.contains("steps")) cfg.time.steps = t.at("steps").get<int>();
  }
  if (j.contains("wavepacket")) {
    const json& w = j.at("wavepacket");
    reject_unknown(w, {"kind", "mean_mhz", "width_mhz", "samples"}, "wavepacket");
    if (w.contains("kind")) cfg.wavepacket.kind = w.at("kind").get<std::string>();
    cfg.wavepacket.mean_mhz = num(w, "mean_mhz", cfg.wavepacket.mean_mhz);
    cfg.wavepacket.width_mhz = num(w, "width_mhz", cfg.wavepacket.width_mhz);
    if (w.contains("samples")) cfg.wavepacket.samples = w.at("samples").get<int>();
  }
  if (j.contains("noise")) {
    const json& n = j.at("noise");
    reject_unknown(n, {"r_ohm", "m_ph", "cg_ratio", "alpha_flux",
                       "omega_t_ghz", "omega_c_ghz", "diagonal_current"},
                   "noise");
    cfg.noise.r_ohm = num(n, "r_ohm", cfg.noise.r_ohm);
    cfg.noise.m_ph = num(n, "m_ph", cfg.noise.m_ph);
    cfg.noise.cg_ratio = num(n, "cg_ratio", cfg.noise.cg_ratio);
    cfg.noise.alpha_flux = num(n, "alpha_flux", cfg.noise.alpha_flux);
    cfg.noise.omega_t_ghz = num(n, "omega_t_ghz", cfg.noise.omega_t_ghz);
    cfg.noise.omega_c_ghz = num(n, "omega_c_ghz", cfg.noise.omega_c_ghz);
    if (n.contains("diagonal_current"))
      cfg.noise.diagonal_current = n.at("diagonal_current").get<bool>();
  }
  if (j.contains("options")) {
    const json& o = j.at("options");
    reject_unknown(o, {"n_max", "secular_tol_ghz", "eps_den_ghz",
                       "denominators", "lr_correction", "keep_boundary"},
                   "options");
    if (o.contains("n_max")) cfg.options.n_max = o.at("n_max").get<int>();
    cfg.options.secular_tol_ghz = num(o, "secular_tol_ghz", cfg.options.secular_tol_ghz);
    cfg.options.eps_den_ghz = num(o, "eps_den_ghz", cfg.options.eps_den_ghz);
    if (o.contains("denominators"))
      cfg.options.denominators = o.at("denominators").get<std::string>();
    if (o.contains("lr_correction"))
      cfg.options.lr_correction = o.at("lr_correction").get<bool>();
    if (o.contains("keep_boundary"))
      cfg.options.keep_boundary = o.at("keep_boundary").get<bool>();
  }

  // Flat aliases last so they win over section defaults in terse configs.
  if (j.contains("ej1_ghz")) cfg.qubit1.ej_ghz = j.at("ej1_ghz").get<double>();
  if (j.contains("ec1_ghz")) cfg.qubit1.ec_ghz = j.at("ec1_ghz").get<double>();
  if (j.contains("alpha1")) cfg.qubit1.alpha = j.at("alpha1").get<double>();
  if (j.contains("beta1")) cfg.qubit1.beta = j.at("beta1").get<double>();
  if (j.contains("f1")) cfg.qubit1.f1 = j.at("f1").get<double>();
  if (j.contains("f2")) cfg.qubit1.f2 = j.at("f2").get<double>();
  if (cfg.qubit2) {
    if (j.contains("ej2_ghz")) cfg.qubit2->ej_ghz = j.at("ej2_ghz").get<double>();
    if (j.contains("ec2_ghz")) cfg.qubit2->ec_ghz = j.at("ec2_ghz").get<double>();
    if (j.contains("alpha2")) cfg.qubit2->alpha = j.at("alpha2").get<double>();
    if (j.contains("beta2")) cfg.qubit2->beta = j.at("beta2").get<double>();
  }
  if (j.contains("nx")) cfg.drives.nx = j.at("nx").get<double>();
  if (j.contains("ny")) cfg.drives.ny = j.at("ny").get<double>();
  if (j.contains("nz")) cfg.drives.nz = j.at("nz").get<double>();
  if (j.contains("nm")) cfg.drives.nm = j.at("nm").get<double>();
  for (std::string a : {"x", "y", "z"}) {
    std::string key = "omega_" + a + "_ghz";
    if (j.contains(key)) cfg.modes.omega_ghz[a] = j.at(key).get<double>();
  }

  validate(cfg);
  return cfg;
}

SimulationConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config_text(ss.str());
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

struct Emitter {
  std::string out;
  int depth = 0;
  bool first = true;

  void indent() { out.append(2 * depth, ' '); }
  void sep() {
    if (!first) out += ",\n";
    else out += "\n";
    first = false;
    indent();
  }
  void open(const char* key) {
    sep();
    if (key) { out += '"'; out += key; out += "\": {"; }
    else out += '{';
    ++depth;
    first = true;
  }
  void close() {
    --depth;
    out += "\n";
    indent();
    out += '}';
    first = false;
  }
  void kv(const char* key, double v) { sep(); out += '"'; out += key; out += "\": "; out += fmt(v); }
  void kv(const char* key, int v) { sep(); out += '"'; out += key; out += "\": "; out += std::to_string(v); }
  void kv(const char* key, bool v) { sep(); out += '"'; out += key; out += "\": "; out += v ? "true" : "false"; }
  void kv(const char* key, const std::string& v) { sep(); out += '"'; out += key; out += "\": \""; out += v; out += '"'; }
};

void emit_qubit(Emitter& e, const char* key, const FluxQubitParams& q) {
  e.open(key);
  e.kv("ej_ghz", q.ej_ghz);
  e.kv("ec_ghz", q.ec_ghz);
  e.kv("alpha", q.alpha);
  e.kv("beta", q.beta);
  e.kv("f1", q.f1);
  e.kv("f2", q.f2);
  e.kv("lg_ph", q.lg_ph);
  e.kv("lambda_r", q.lambda_r);
  e.close();
}

} // namespace

std::string serialize_config(const SimulationConfig& cfg) {
  Emitter e;
  e.out += '{';
  ++e.depth;
  e.kv("dimension", cfg.dimension);
  emit_qubit(e, "qubit1", cfg.qubit1);
  if (cfg.qubit2) emit_qubit(e, "qubit2", *cfg.qubit2);
  for (const auto& [a, p] : cfg.phase) {
    e.open(("phase_" + a).c_str());
    e.kv("ejp_ghz", p.ejp_ghz);
    e.kv("ecp_ghz", p.ecp_ghz);
    e.kv("bias_ratio", p.bias_ratio);
    e.kv("lp_ph", p.lp_ph);
    e.kv("lrp_ph", p.lrp_ph);
    e.close();
  }
  for (const auto& [a, s] : cfg.shared) {
    e.open(("shared_" + a).c_str());
    e.kv("ej_ghz", s.ej_ghz);
    e.kv("ec_ghz", s.ec_ghz);
    e.kv("bias_ratio", s.bias_ratio);
    e.close();
  }
  e.open("drives");
  e.kv("nm", cfg.drives.nm);
  e.kv("nx", cfg.drives.nx);
  e.kv("ny", cfg.drives.ny);
  e.kv("nz", cfg.drives.nz);
  for (const char* k : kDriveKeys) {
    if (cfg.drives.omega_ghz.count(k))
      e.kv((std::string("omega_") + k + "_ghz").c_str(), cfg.drives.omega_ghz.at(k));
    if (cfg.drives.phase.count(k))
      e.kv((std::string("phi_") + k).c_str(), cfg.drives.phase.at(k));
  }
  e.close();
  if (!cfg.modes.lambda.empty() || !cfg.modes.omega_ghz.empty() || !cfg.modes.el_ghz.empty()) {
    e.open("modes");
    for (const auto& [k, v] : cfg.modes.lambda) e.kv(("lambda_" + k).c_str(), v);
    for (const auto& [k, v] : cfg.modes.omega_ghz) e.kv(("omega_" + k + "_ghz").c_str(), v);
    for (const auto& [k, v] : cfg.modes.el_ghz) e.kv(("el_" + k + "_ghz").c_str(), v);
    e.close();
  }
  e.open("target");
  e.kv("mc2_mhz", cfg.target.mc2_mhz);
  e.kv("cp_x_mhz", cfg.target.cp_x_mhz);
  e.kv("cp_y_mhz", cfg.target.cp_y_mhz);
  e.kv("cp_z_mhz", cfg.target.cp_z_mhz);
  e.close();
  e.open("time");
  e.kv("t_max_us", cfg.time.t_max_us);
  e.kv("steps", cfg.time.steps);
  e.close();
  e.open("wavepacket");
  e.kv("kind", cfg.wavepacket.kind);
  e.kv("mean_mhz", cfg.wavepacket.mean_mhz);
  e.kv("width_mhz", cfg.wavepacket.width_mhz);
  e.kv("samples", cfg.wavepacket.samples);
  e.close();
  e.open("noise");
  e.kv("r_ohm", cfg.noise.r_ohm);
  e.kv("m_ph", cfg.noise.m_ph);
  e.kv("cg_ratio", cfg.noise.cg_ratio);
  e.kv("alpha_flux", cfg.noise.alpha_flux);
  e.kv("omega_t_ghz", cfg.noise.omega_t_ghz);
  e.kv("omega_c_ghz", cfg.noise.omega_c_ghz);
  e.kv("diagonal_current", cfg.noise.diagonal_current);
  e.close();
  e.open("options");
  e.kv("n_max", cfg.options.n_max);
  e.kv("secular_tol_ghz", cfg.options.secular_tol_ghz);
  e.kv("eps_den_ghz", cfg.options.eps_den_ghz);
  e.kv("denominators", cfg.options.denominators);
  e.kv("lr_correction", cfg.options.lr_correction);
  e.kv("keep_boundary", cfg.options.keep_boundary);
  e.close();
  --e.depth;
  e.out += "\n}\n";
  return e.out;
}

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::string> hierarchy_warnings(
    const std::map<std::string, double>& omega_by_mode,
    double two_x0_ghz, double two_z0_ghz, int dimension) {
  std::vector<std::string> out;
  auto get = [&](const std::string& k) -> double {
    auto it = omega_by_mode.find(k);
    return it == omega_by_mode.end() ? 0.0 : it->second;
  };
  auto warn_ratio = [&](const std::string& hi, double whi,
                        const std::string& lo, double wlo) {
    if (wlo <= 0.0 || whi <= 0.0) return;
    double r = whi / wlo;
    if (r < 5.0) {
      char buf[160];
      std::snprintf(buf, sizeof buf,
                    "hierarchy: omega_%s/omega_%s = %.3g below ratio 5",
                    hi.c_str(), lo.c_str(), r);
      out.push_back(buf);
    }
  };
  std::vector<std::string> buses = {"X"};
  if (dimension >= 2) buses.push_back("Y");
  if (dimension >= 3) buses.push_back("Z");
  if (dimension >= 2) {
    for (const auto& b : buses) warn_ratio("O", get("O"), b, get(b));
    // buses mutually distinct by at least 1%
    for (size_t i = 0; i < buses.size(); ++i)
      for (size_t j = i + 1; j < buses.size(); ++j) {
        double a = get(buses[i]), b = get(buses[j]);
        if (a <= 0.0 || b <= 0.0) continue;
        if (std::abs(a - b) < 0.01 * std::max(a, b)) {
          out.push_back("hierarchy: degenerate bus frequencies omega_" +
                        buses[i] + " ~ omega_" + buses[j]);
        }
      }
  }
  std::vector<std::pair<std::string, double>> slow = {
      {"2X0(1)", two_x0_ghz}, {"x", get("x")}};
  if (dimension >= 2) {
    slow.push_back({"2Z0(2)", two_z0_ghz});
    slow.push_back({"y", get("y")});
  }
  if (dimension >= 3) slow.push_back({"z", get("z")});
  for (const auto& b : buses)
    for (const auto& [name, w] : slow) warn_ratio(b, get(b), name, w);
  return out;
}

} // namespace zbsim
