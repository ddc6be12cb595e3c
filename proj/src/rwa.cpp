#include "zbsim/rwa.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numeric>

#include "zbsim/constants.hpp"

namespace zbsim::rwa {

namespace {

constexpr cxd kI{0.0, 1.0};

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// Qubit eigenbasis products: returns up to two (op, coeff) terms.
int qop_mul(QOp a, QOp b, std::pair<QOp, cxd> out[2]) {
  if (a == QOp::I) { out[0] = {b, 1.0}; return 1; }
  if (b == QOp::I) { out[0] = {a, 1.0}; return 1; }
  switch (a) {
    case QOp::P:
      if (b == QOp::P) return 0;
      if (b == QOp::M) { out[0] = {QOp::I, 0.5}; out[1] = {QOp::D, 0.5}; return 2; }
      out[0] = {QOp::P, -1.0}; return 1; // P D = -P
    case QOp::M:
      if (b == QOp::M) return 0;
      if (b == QOp::P) { out[0] = {QOp::I, 0.5}; out[1] = {QOp::D, -0.5}; return 2; }
      out[0] = {QOp::M, 1.0}; return 1; // M D = M
    case QOp::D:
      if (b == QOp::P) { out[0] = {QOp::P, 1.0}; return 1; }
      if (b == QOp::M) { out[0] = {QOp::M, -1.0}; return 1; }
      out[0] = {QOp::I, 1.0}; return 1; // D D = I
    default:
      return 0;
  }
}

// Normal-ordered product of two words. Per boson mode,
// a^dag^m1 a^n1 * a^dag^m2 a^n2 expands via Wick contractions into
// sum_k k! C(n1,k) C(m2,k) a^dag^(m1+m2-k) a^(n1+n2-k). Bus modes act on
// their vacuum sector, so bus terms keeping both raising and lowering
// content are dropped; that is exact while no chain carries more than two
// operators of one bus family, true for every interaction list built here.
std::vector<std::pair<cxd, Word>> word_mul(const Word& a, const Word& b) {
  std::vector<std::pair<cxd, Word>> terms;
  std::pair<QOp, cxd> t1[2], t2[2];
  const int n1 = qop_mul(a.q1, b.q1, t1);
  if (n1 == 0) return terms;
  const int n2 = qop_mul(a.q2, b.q2, t2);
  if (n2 == 0) return terms;

  for (int i = 0; i < n1; ++i) {
    for (int j = 0; j < n2; ++j) {
      std::vector<std::pair<cxd, Word>> partial;
      Word w;
      w.q1 = t1[i].first;
      w.q2 = t2[j].first;
      partial.push_back({t1[i].second * t2[j].second, w});
      for (int m = 0; m < kModeCount; ++m) {
        const int dl = a.dag[m], al = a.ann[m];
        const int dr = b.dag[m], ar = b.ann[m];
        if (dl + al + dr + ar == 0) continue;
        std::vector<std::pair<cxd, Word>> next;
        for (const auto& [amp, word] : partial) {
          const int kmax = std::min(al, dr);
          for (int k = 0; k <= kmax; ++k) {
            const int dcount = dl + dr - k;
            const int acount = al + ar - k;
            if (is_bus(m) && dcount > 0 && acount > 0) continue;
            Word w2 = word;
            w2.dag[m] = static_cast<uint8_t>(dcount);
            w2.ann[m] = static_cast<uint8_t>(acount);
            const double c = factorial(k) * binom(al, k) * binom(dr, k);
            next.push_back({amp * c, w2});
          }
        }
        partial.swap(next);
      }
      terms.insert(terms.end(), partial.begin(), partial.end());
    }
  }
  return terms;
}

std::array<int, kModeCount> word_net(const Word& w) {
  std::array<int, kModeCount> n{};
  for (int m = 0; m < kModeCount; ++m) n[m] = int(w.dag[m]) - int(w.ann[m]);
  return n;
}

struct DriveRef {
  const EngineInput::Drive* d;
  std::string key;
};

DriveRef need_drive(const EngineInput& in, const std::string& key,
                    const std::string& ctx) {
  auto it = in.drives.find(key);
  if (it == in.drives.end()) {
    throw EngineError("missing drive for " + ctx + ": " + key);
  }
  return {&it->second, key};
}

void push_term(Interaction& inter, cxd amp, double freq, double drive_freq,
               const Word& w) {
  inter.monomials.push_back(Monomial{amp, freq, drive_freq, w});
}

Word bare_word(QOp q1, QOp q2) {
  Word w;
  w.q1 = q1;
  w.q2 = q2;
  return w;
}

// Monomials of  coupling * qop * (lambda a^dag e^{+i w t} + H.c.) appended
// for both boson signs.
void add_qop_boson(Interaction& inter, cxd amp, QOp q1, QOp q2,
                   double qfreq, int mode, double lambda, double omega) {
  for (int s : {+1, -1}) {
    Word w = bare_word(q1, q2);
    if (s > 0) w.dag[mode] = 1; else w.ann[mode] = 1;
    push_term(inter, amp * lambda, qfreq + s * omega, 0.0, w);
  }
}

} // namespace

int mode_index(char c) {
  switch (c) {
    case 'x': return 0;
    case 'y': return 1;
    case 'z': return 2;
    case 'X': return 3;
    case 'Y': return 4;
    case 'Z': return 5;
    case 'O': return 6;
    default: throw EngineError(std::string("unknown mode label: ") + c);
  }
}

char mode_char(int idx) {
  static const char tab[kModeCount + 1] = "xyzXYZO";
  if (idx < 0 || idx >= kModeCount) throw EngineError("mode index out of range");
  return tab[idx];
}

bool Word::operator<(const Word& o) const {
  if (q1 != o.q1) return q1 < o.q1;
  if (q2 != o.q2) return q2 < o.q2;
  if (dag != o.dag) return dag < o.dag;
  return ann < o.ann;
}

Word Word::conjugate() const {
  Word w;
  auto flip = [](QOp q) {
    if (q == QOp::P) return QOp::M;
    if (q == QOp::M) return QOp::P;
    return q;
  };
  w.q1 = flip(q1);
  w.q2 = flip(q2);
  w.dag = ann;
  w.ann = dag;
  return w;
}

std::string Word::str() const {
  static const char* q1n[] = {"", "P1", "M1", "D1"};
  static const char* q2n[] = {"", "P2", "M2", "D2"};
  std::string s;
  auto app = [&s](const std::string& part) {
    if (part.empty()) return;
    if (!s.empty()) s += '.';
    s += part;
  };
  app(q1n[int(q1)]);
  app(q2n[int(q2)]);
  for (int m = 0; m < kModeCount; ++m) {
    for (int i = 0; i < dag[m]; ++i) app(std::string(1, mode_char(m)) + "+");
    for (int i = 0; i < ann[m]; ++i) app(std::string(1, mode_char(m)) + "-");
  }
  if (s.empty()) s = "1";
  return s;
}

EngineInput resonant_drives(EngineInput in) {
  auto fill = [&in](const std::string& key, double omega, double phase) {
    auto it = in.drives.find(key);
    if (it == in.drives.end()) return;
    if (it->second.omega_ghz != 0.0) return;
    it->second.omega_ghz = omega;
    it->second.phase = phase;
  };
  const double s1 = 2.0 * in.splitting_ghz[0];
  const double s2 = 2.0 * in.splitting_ghz[1];
  fill("m", s1, 0.0);
  if (in.dimension == 1) {
    fill("x1", in.omega_ghz[0], 0.5 * kPi);
    return in;
  }
  fill("x1", s2 + in.omega_ghz[0], -0.5 * kPi);
  fill("x2", s2 - in.omega_ghz[0], +0.5 * kPi);
  fill("y1", s2 + in.omega_ghz[1], 0.0);
  fill("y2", s2 - in.omega_ghz[1], kPi);
  if (in.dimension >= 3) fill("z", in.omega_ghz[2], -0.5 * kPi);
  return in;
}

ResonanceReport validate_resonance(const EngineInput& in, double tol_ghz) {
  ResonanceReport rep;
  const double s1 = 2.0 * in.splitting_ghz[0];
  const double s2 = 2.0 * in.splitting_ghz[1];
  auto check = [&](const std::string& key, double target) {
    ResonanceReport::Line line;
    auto it = in.drives.find(key);
    if (it == in.drives.end()) {
      line.name = key + " (missing)";
      line.residual_ghz = target;
      line.ok = false;
    } else {
      line.name = key;
      line.residual_ghz = it->second.omega_ghz - target;
      line.ok = std::abs(line.residual_ghz) <= tol_ghz;
    }
    rep.lines.push_back(line);
  };
  check("m", s1);
  if (in.dimension == 1) {
    check("x1", in.omega_ghz[0]);
  } else {
    check("x1", s2 + in.omega_ghz[0]);
    check("x2", s2 - in.omega_ghz[0]);
    check("y1", s2 + in.omega_ghz[1]);
    check("y2", s2 - in.omega_ghz[1]);
    if (in.dimension >= 3) check("z", in.omega_ghz[2]);
  }

  char buf[160];
  auto warn = [&rep, &buf](const char* fmt, double a, double b) {
    std::snprintf(buf, sizeof buf, fmt, a, b);
    rep.warnings.push_back(buf);
  };
  std::vector<int> buses;
  if (in.dimension >= 1) buses.push_back(3);
  if (in.dimension >= 2) buses.push_back(4);
  if (in.dimension >= 3) buses.push_back(5);
  double qscale = std::max(s1, s2);
  for (int ax = 0; ax < std::min(in.dimension, 3); ++ax) {
    qscale = std::max(qscale, in.omega_ghz[ax]);
  }
  for (int b : buses) {
    if (in.omega_ghz[b] < 3.0 * qscale) {
      warn("bus %c at %.3f GHz is not well above the qubit/dynamical scale",
           double(mode_char(b)), in.omega_ghz[b]);
    }
    if (in.dimension >= 2 && in.omega_ghz[kModeO] < 3.0 * in.omega_ghz[b]) {
      warn("common junction at %.3f GHz is not well above bus at %.3f GHz",
           in.omega_ghz[kModeO], in.omega_ghz[b]);
    }
  }
  for (size_t i = 0; i + 1 < buses.size(); ++i) {
    for (size_t j = i + 1; j < buses.size(); ++j) {
      const double d = std::abs(in.omega_ghz[buses[i]] - in.omega_ghz[buses[j]]);
      if (d < 1.0) {
        warn("bus splittings %.3f and %.3f GHz are nearly degenerate",
             in.omega_ghz[buses[i]], in.omega_ghz[buses[j]]);
      }
    }
  }
  if (in.dimension >= 2) {
    for (int ax = 0; ax < std::min(in.dimension, 3); ++ax) {
      if (s2 - in.omega_ghz[ax] <= 0.0 && ax < 2) {
        warn("qubit-2 gap %.3f GHz below dynamical frequency %.3f GHz",
             s2, in.omega_ghz[ax]);
      }
    }
  }
  rep.all_ok = std::all_of(rep.lines.begin(), rep.lines.end(),
                           [](const auto& l) { return l.ok; });
  return rep;
}

std::array<Interaction, 3> build_axis_interactions(const EngineInput& in,
                                                   int axis) {
  if (axis < 0 || axis >= 3) throw EngineError("axis index out of range");
  if (axis >= in.dimension) {
    throw EngineError(std::string("axis ") + mode_char(axis) +
                      " not available at this dimension");
  }
  std::array<Interaction, 3> set;
  set[0].name = "I1";
  set[1].name = "I2";
  set[2].name = "I3";
  const double s1 = 2.0 * in.splitting_ghz[0];
  const double s2 = 2.0 * in.splitting_ghz[1];
  const int dyn = axis;
  const int bus = 3 + axis;
  const double lam_d = in.lambda[dyn], om_d = in.omega_ghz[dyn];
  const double lam_b = in.lambda[bus], om_b = in.omega_ghz[bus];
  const double lam_o = in.lambda[kModeO], om_o = in.omega_ghz[kModeO];
  const double x2_1 = in.xcoup[0][2];

  if (in.dimension == 1) {
    // Single qubit: quadratic coupling to its bus times one drive tone,
    // plus the static ring exchange between bus and dynamical mode.
    const auto dr = need_drive(in, "x1", "axis x");
    for (int sb : {+1, -1}) {
      for (int sd : {+1, -1}) {
        Word w = bare_word(QOp::D, QOp::I);
        if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
        const cxd amp = x2_1 * lam_b * 0.5 * dr.d->n *
                        std::exp(kI * (sd * dr.d->phase));
        push_term(set[0], amp, sb * om_b + sd * dr.d->omega_ghz,
                  sd * dr.d->omega_ghz, w);
      }
    }
    for (int sd : {+1, -1}) {
      for (int sb : {+1, -1}) {
        Word w;
        if (sd > 0) w.dag[dyn] = 1; else w.ann[dyn] = 1;
        if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
        push_term(set[1], -in.el_ghz[axis] * lam_d * lam_b,
                  sd * om_d + sb * om_b, 0.0, w);
      }
    }
    return set;
  }

  // Ring exchange (identical structure on every axis).
  for (int sd : {+1, -1}) {
    for (int sb : {+1, -1}) {
      Word w;
      if (sd > 0) w.dag[dyn] = 1; else w.ann[dyn] = 1;
      if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
      push_term(set[2], -in.el_ghz[axis] * lam_d * lam_b,
                sd * om_d + sb * om_b, 0.0, w);
    }
  }

  if (axis == 0) {
    // Qubit 1: static transverse word times bus-X and common-junction quanta.
    for (int sb : {+1, -1}) {
      for (int so : {+1, -1}) {
        Word w = bare_word(QOp::D, QOp::I);
        if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
        if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
        push_term(set[0], -x2_1 * lam_b * lam_o, sb * om_b + so * om_o, 0.0, w);
      }
    }
    // Qubit 2: rotating raising/lowering, common junction, two drive tones.
    const auto d1 = need_drive(in, "x1", "axis x");
    const auto d2 = need_drive(in, "x2", "axis x");
    for (const auto& dr : {d1, d2}) {
      for (int q : {+1, -1}) {
        for (int so : {+1, -1}) {
          for (int sd : {+1, -1}) {
            Word w = bare_word(QOp::I, q > 0 ? QOp::P : QOp::M);
            if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
            const cxd amp = in.xcoup[1][2] * lam_o * 0.5 * dr.d->n *
                            std::exp(kI * (sd * dr.d->phase));
            push_term(set[1], amp,
                      q * s2 + so * om_o + sd * dr.d->omega_ghz,
                      sd * dr.d->omega_ghz, w);
          }
        }
      }
    }
  } else if (axis == 1) {
    // Qubit 1 carries the drive tones on this axis.
    const auto d1 = need_drive(in, "y1", "axis y");
    const auto d2 = need_drive(in, "y2", "axis y");
    for (const auto& dr : {d1, d2}) {
      for (int so : {+1, -1}) {
        for (int sd : {+1, -1}) {
          Word w = bare_word(QOp::D, QOp::I);
          if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
          const cxd amp = -x2_1 * lam_o * 0.5 * dr.d->n *
                          std::exp(kI * (sd * dr.d->phase));
          push_term(set[0], amp, so * om_o + sd * dr.d->omega_ghz,
                    sd * dr.d->omega_ghz, w);
        }
      }
    }
    for (int q : {+1, -1}) {
      for (int sb : {+1, -1}) {
        for (int so : {+1, -1}) {
          Word w = bare_word(QOp::I, q > 0 ? QOp::P : QOp::M);
          if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
          if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
          push_term(set[1], in.xcoup[1][2] * lam_b * lam_o,
                    q * s2 + sb * om_b + so * om_o, 0.0, w);
        }
      }
    }
  } else {
    for (int sb : {+1, -1}) {
      for (int so : {+1, -1}) {
        Word w = bare_word(QOp::D, QOp::I);
        if (sb > 0) w.dag[bus] = 1; else w.ann[bus] = 1;
        if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
        push_term(set[0], -x2_1 * lam_b * lam_o, sb * om_b + so * om_o, 0.0, w);
      }
    }
    // Qubit 2: static longitudinal word, common junction, one drive tone.
    const auto dr = need_drive(in, "z", "axis z");
    for (int so : {+1, -1}) {
      for (int sd : {+1, -1}) {
        Word w = bare_word(QOp::I, QOp::D);
        if (so > 0) w.dag[kModeO] = 1; else w.ann[kModeO] = 1;
        const cxd amp = in.zcoup[1][2] * lam_o * 0.5 * dr.d->n *
                        std::exp(kI * (sd * dr.d->phase));
        push_term(set[1], amp, so * om_o + sd * dr.d->omega_ghz,
                  sd * dr.d->omega_ghz, w);
      }
    }
  }
  (void)s1;
  return set;
}

Interaction build_mass_lines(const EngineInput& in) {
  Interaction inter;
  inter.name = "H1";
  const auto dr = need_drive(in, "m", "mass channel");
  const double s1 = 2.0 * in.splitting_ghz[0];
  const double om = dr.d->omega_ghz;
  for (int sd : {+1, -1}) {
    const cxd tone = 0.5 * dr.d->n * std::exp(kI * (sd * dr.d->phase));
    const cxd dtone = tone * om * std::exp(kI * (sd * (-0.5 * kPi)));
    // Longitudinal couplings excite the rotating eigenoperators;
    // transverse couplings multiply the static diagonal word.
    push_term(inter, in.zcoup[0][1] * tone, +s1 + sd * om, sd * om,
              bare_word(QOp::P, QOp::I));
    push_term(inter, in.zcoup[0][1] * tone, -s1 + sd * om, sd * om,
              bare_word(QOp::M, QOp::I));
    push_term(inter, in.xcoup[0][1] * tone, sd * om, sd * om,
              bare_word(QOp::D, QOp::I));
    push_term(inter, in.zcoup[0][3] * dtone, +s1 + sd * om, sd * om,
              bare_word(QOp::P, QOp::I));
    push_term(inter, in.zcoup[0][3] * dtone, -s1 + sd * om, sd * om,
              bare_word(QOp::M, QOp::I));
    push_term(inter, in.xcoup[0][3] * dtone, sd * om, sd * om,
              bare_word(QOp::D, QOp::I));
  }
  return inter;
}

std::array<Interaction, 2> build_cp0_pair(const EngineInput& in) {
  if (in.dimension < 2) {
    throw EngineError("momentum-offset channel needs two qubits");
  }
  std::array<Interaction, 2> pair;
  pair[0].name = "L1";
  pair[1].name = "L2";
  const double lam_o = in.lambda[kModeO];
  const double om_o = in.omega_ghz[kModeO];
  // Qubit 1 couples to the common junction with a sign opposite to qubit 2.
  add_qop_boson(pair[0], -in.zcoup[0][1], QOp::P, QOp::I,
                +2.0 * in.splitting_ghz[0], kModeO, lam_o, om_o);
  add_qop_boson(pair[0], -in.zcoup[0][1], QOp::M, QOp::I,
                -2.0 * in.splitting_ghz[0], kModeO, lam_o, om_o);
  add_qop_boson(pair[0], -in.xcoup[0][1], QOp::D, QOp::I, 0.0, kModeO, lam_o,
                om_o);
  add_qop_boson(pair[1], +in.zcoup[1][1], QOp::I, QOp::D, 0.0, kModeO, lam_o,
                om_o);
  add_qop_boson(pair[1], +in.xcoup[1][1], QOp::I, QOp::P,
                +2.0 * in.splitting_ghz[1], kModeO, lam_o, om_o);
  add_qop_boson(pair[1], +in.xcoup[1][1], QOp::I, QOp::M,
                -2.0 * in.splitting_ghz[1], kModeO, lam_o, om_o);
  return pair;
}

namespace {

struct Collapse {
  double value;
  int family; // -1 when no bus content
};

Collapse collapse_partial(double exact, const std::array<int, kModeCount>& net,
                          const std::vector<int>& bus_order,
                          const std::array<double, kModeCount>& omega) {
  for (int b : bus_order) {
    if (net[b] != 0) return {net[b] * omega[b], b};
  }
  return {exact, -1};
}

struct Path {
  cxd factor{1.0, 0.0};
  double f = 0.0;
  double drive_f = 0.0;
  std::array<int, kModeCount> net{};
  std::vector<double> partials;
  std::vector<double> dens;
  int o_dens = 0;
};

} // namespace

std::vector<IntegratedTerm> ordered_integral(
    const std::vector<const Interaction*>& factors,
    const IntegralOptions& opt, int* discarded_paths) {
  if (factors.empty() || factors.size() > 3) {
    throw EngineError("ordered_integral expects 1 to 3 factors");
  }
  const int k = int(factors.size());
  std::string ordering = factors[0]->name;
  for (int j = 1; j < k; ++j) ordering += "*" + factors[j]->name;

  std::vector<int> bus_order = {3, 4, 5, 6};
  std::sort(bus_order.begin(), bus_order.end(), [&opt](int a, int b) {
    return opt.omega_ghz[a] > opt.omega_ghz[b];
  });

  std::vector<IntegratedTerm> out;
  std::vector<int> idx(k, 0);
  while (true) {
    const Monomial* mono[3] = {nullptr, nullptr, nullptr};
    for (int j = 0; j < k; ++j) mono[j] = &factors[j]->monomials[idx[j]];

    // Operator product, latest factor leftmost.
    std::vector<std::pair<cxd, Word>> words = {{mono[0]->amp, mono[0]->word}};
    for (int j = 1; j < k && !words.empty(); ++j) {
      std::vector<std::pair<cxd, Word>> next;
      for (const auto& [amp, w] : words) {
        for (const auto& [c, w2] : word_mul(w, mono[j]->word)) {
          next.push_back({amp * mono[j]->amp * c, w2});
        }
      }
      words.swap(next);
    }

    if (!words.empty()) {
      // Innermost factor starts the phase accumulation; each enclosing
      // integral divides by the accumulated partial sum.
      std::vector<Path> paths(1);
      paths[0].f = mono[k - 1]->freq_ghz;
      paths[0].drive_f = mono[k - 1]->drive_freq_ghz;
      paths[0].net = word_net(mono[k - 1]->word);
      for (int j = k - 2; j >= 0; --j) {
        std::vector<Path> next;
        for (const Path& p : paths) {
          const double exact = p.f;
          Collapse c{exact, -1};
          if (opt.collapsed) {
            c = collapse_partial(exact, p.net, bus_order, opt.omega_ghz);
          }
          if (std::abs(exact) < opt.eps_den_ghz ||
              std::abs(c.value) < opt.eps_den_ghz) {
            char buf[200];
            std::snprintf(buf, sizeof buf,
                          "small denominator in %s: partial sum over the "
                          "innermost %d factor(s) is %.6g GHz (guard %.3g)",
                          ordering.c_str(), k - 1 - j, exact, opt.eps_den_ghz);
            throw EngineError(buf);
          }
          const auto fnet = word_net(mono[j]->word);
          Path run = p;
          run.factor *= cxd(-1.0 / c.value, 0.0);
          run.f += mono[j]->freq_ghz;
          run.drive_f += mono[j]->drive_freq_ghz;
          for (int m = 0; m < kModeCount; ++m) run.net[m] += fnet[m];
          run.partials.push_back(exact);
          run.dens.push_back(c.value);
          if (c.family == kModeO) run.o_dens++;
          next.push_back(std::move(run));
          if (opt.keep_boundary) {
            Path bnd = p;
            bnd.factor *= cxd(+1.0 / c.value, 0.0);
            bnd.f = mono[j]->freq_ghz;
            bnd.drive_f = mono[j]->drive_freq_ghz;
            bnd.net = fnet;
            bnd.partials.push_back(exact);
            bnd.dens.push_back(c.value);
            if (c.family == kModeO) bnd.o_dens++;
            next.push_back(std::move(bnd));
          }
        }
        paths.swap(next);
      }
      for (const Path& p : paths) {
        if (opt.collapsed && k == 3 && p.o_dens == 2) {
          if (discarded_paths) ++*discarded_paths;
          continue;
        }
        for (const auto& [amp, w] : words) {
          IntegratedTerm term;
          term.mono = Monomial{amp * p.factor, p.f, p.drive_f, w};
          term.prov = Provenance{ordering, p.partials, p.dens};
          out.push_back(std::move(term));
        }
      }
    }

    int j = k - 1;
    while (j >= 0 && ++idx[j] == int(factors[j]->monomials.size())) {
      idx[j] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

std::vector<EffectiveCoupling> collect_secular(
    const std::vector<IntegratedTerm>& terms, double tol_ghz,
    TermCensus* census) {
  std::map<Word, EffectiveCoupling> merged;
  for (const auto& t : terms) {
    if (census) {
      const double key = std::round(t.mono.freq_ghz * 1e6) / 1e6;
      census->freq_histogram[key]++;
    }
    if (std::abs(t.mono.freq_ghz) > tol_ghz) {
      if (census) census->dropped++;
      continue;
    }
    if (census) census->kept++;
    auto [it, fresh] = merged.try_emplace(t.mono.word);
    if (fresh) it->second.word = t.mono.word;
    it->second.coeff_mhz += t.mono.amp * 1e3;
    it->second.sources.push_back(t.prov);
  }
  std::vector<EffectiveCoupling> out;
  out.reserve(merged.size());
  for (auto& [w, c] : merged) out.push_back(std::move(c));
  return out;
}

bool hermitian_closed(const std::vector<EffectiveCoupling>& cs,
                      double tol_mhz) {
  std::map<Word, cxd> table;
  for (const auto& c : cs) table[c.word] += c.coeff_mhz;
  for (const auto& [w, amp] : table) {
    const Word cw = w.conjugate();
    auto it = table.find(cw);
    const cxd partner = (it == table.end()) ? cxd{0.0, 0.0} : it->second;
    if (std::abs(partner - std::conj(amp)) > tol_mhz) return false;
  }
  return true;
}

cxd closed_form_channel_mhz(const EngineInput& in, const std::string& name) {
  const auto drive_n = [&in](const std::string& key) {
    auto it = in.drives.find(key);
    return it == in.drives.end() ? 0.0 : it->second.n;
  };
  if (name == "mass") {
    const auto dr = need_drive(in, "m", "mass channel");
    const double om = dr.d->omega_ghz;
    const cxd c = 0.5 * dr.d->n * (in.zcoup[0][1] + kI * om * in.zcoup[0][3]) *
                  std::exp(-kI * dr.d->phase);
    return c * 1e3;
  }
  if (name == "cp_0") {
    return 2.0 * in.xcoup[0][1] * in.zcoup[1][1] *
           in.lambda[kModeO] * in.lambda[kModeO] / in.omega_ghz[kModeO] * 1e3;
  }
  const int axis = (name == "cp_x") ? 0 : (name == "cp_y") ? 1
                   : (name == "cp_z") ? 2 : -1;
  if (axis < 0) throw EngineError("unknown channel: " + name);
  const int bus = 3 + axis;
  const double lb2 = in.lambda[bus] * in.lambda[bus];
  if (in.dimension == 1) {
    // Two-factor closed form: X2 E_L lambda_x n / E_JX with
    // 1/E_J = 2 lambda^2 / omega for the shared junction.
    return in.xcoup[0][2] * in.el_ghz[0] * in.lambda[0] * drive_n("x1") *
           lb2 / in.omega_ghz[bus] * 1e3;
  }
  const double lo2 = in.lambda[kModeO] * in.lambda[kModeO];
  const double q2c = (axis == 2) ? in.zcoup[1][2] : in.xcoup[1][2];
  const std::string dkey = (axis == 2) ? "z" : (axis == 1 ? "y1" : "x1");
  return 2.0 * in.xcoup[0][2] * q2c * in.el_ghz[axis] * in.lambda[axis] *
         drive_n(dkey) * lb2 * lo2 / (in.omega_ghz[bus] * in.omega_ghz[kModeO]) *
         1e3;
}

std::vector<std::pair<Word, cxd>> channel_pattern(const EngineInput& in,
                                                  const std::string& name) {
  std::vector<std::pair<Word, cxd>> pat;
  auto word = [](QOp q1, QOp q2, int mode, int updown) {
    Word w = bare_word(q1, q2);
    if (mode >= 0) {
      if (updown > 0) w.dag[mode] = 1; else w.ann[mode] = 1;
    }
    return w;
  };
  if (name == "mass") {
    pat.push_back({word(QOp::P, QOp::I, -1, 0), 1.0});
    return pat;
  }
  if (name == "cp_0") {
    pat.push_back({word(QOp::D, QOp::D, -1, 0), 1.0});
    return pat;
  }
  if (name == "cp_x") {
    if (in.dimension == 1) {
      pat.push_back({word(QOp::D, QOp::I, 0, +1), -kI});
      pat.push_back({word(QOp::D, QOp::I, 0, -1), +kI});
      return pat;
    }
    pat.push_back({word(QOp::D, QOp::P, 0, +1), +kI});
    pat.push_back({word(QOp::D, QOp::P, 0, -1), -kI});
    pat.push_back({word(QOp::D, QOp::M, 0, +1), +kI});
    pat.push_back({word(QOp::D, QOp::M, 0, -1), -kI});
    return pat;
  }
  if (name == "cp_y") {
    pat.push_back({word(QOp::D, QOp::P, 1, +1), +1.0});
    pat.push_back({word(QOp::D, QOp::P, 1, -1), -1.0});
    pat.push_back({word(QOp::D, QOp::M, 1, +1), -1.0});
    pat.push_back({word(QOp::D, QOp::M, 1, -1), +1.0});
    return pat;
  }
  if (name == "cp_z") {
    pat.push_back({word(QOp::D, QOp::D, 2, +1), +kI});
    pat.push_back({word(QOp::D, QOp::D, 2, -1), -kI});
    return pat;
  }
  throw EngineError("unknown channel: " + name);
}

namespace {

Channel make_channel(const EngineInput& in, const std::string& name,
                     const std::vector<IntegratedTerm>& terms) {
  Channel ch;
  ch.name = name;
  ch.couplings =
      collect_secular(terms, in.options.secular_tol_ghz, &ch.census);
  ch.closed_form_mhz = closed_form_channel_mhz(in, name);
  const auto pattern = channel_pattern(in, name);

  std::map<Word, cxd> table;
  for (const auto& c : ch.couplings) table[c.word] += c.coeff_mhz;

  cxd num{0.0, 0.0};
  double den = 0.0;
  for (const auto& [w, p] : pattern) {
    auto it = table.find(w);
    const cxd e = (it == table.end()) ? cxd{0.0, 0.0} : it->second;
    num += e * std::conj(p);
    den += std::norm(p);
  }
  ch.channel_mhz = (den > 0.0) ? num / den : cxd{0.0, 0.0};

  const double scale = std::abs(ch.closed_form_mhz);
  double worst = 0.0;
  std::map<Word, bool> expected;
  for (const auto& [w, p] : pattern) {
    expected[w] = true;
    expected[w.conjugate()] = true;
    auto it = table.find(w);
    const cxd e = (it == table.end()) ? cxd{0.0, 0.0} : it->second;
    const cxd miss = e - ch.closed_form_mhz * p;
    if (scale > 0.0) worst = std::max(worst, std::abs(miss) / scale);
  }
  for (const auto& [w, e] : table) {
    if (!expected.count(w) && scale > 0.0) {
      worst = std::max(worst, std::abs(e) / scale);
    }
  }
  ch.max_rel_mismatch = worst;
  return ch;
}

} // namespace

EffectiveModel effective_hamiltonian(const EngineInput& input) {
  const EngineInput in = resonant_drives(input);
  EffectiveModel model;
  model.resonance = validate_resonance(in);

  IntegralOptions opt;
  opt.eps_den_ghz = in.options.eps_den_ghz;
  opt.collapsed = (in.options.denominators == "collapsed");
  opt.keep_boundary = in.options.keep_boundary;
  opt.omega_ghz = in.omega_ghz;

  {
    const Interaction mass = build_mass_lines(in);
    const auto terms = ordered_integral({&mass}, opt);
    model.channels.push_back(make_channel(in, "mass", terms));
  }
  if (in.dimension >= 2) {
    const auto pair = build_cp0_pair(in);
    std::vector<IntegratedTerm> terms =
        ordered_integral({&pair[0], &pair[1]}, opt);
    const auto rev = ordered_integral({&pair[1], &pair[0]}, opt);
    terms.insert(terms.end(), rev.begin(), rev.end());
    model.channels.push_back(make_channel(in, "cp_0", terms));
  }
  int discarded = 0;
  static const char* names[3] = {"cp_x", "cp_y", "cp_z"};
  for (int axis = 0; axis < std::min(in.dimension, 3); ++axis) {
    const auto set = build_axis_interactions(in, axis);
    std::vector<IntegratedTerm> terms;
    discarded = 0;
    if (in.dimension == 1) {
      for (const auto& perm : {std::array<int, 2>{0, 1}, {1, 0}}) {
        const auto part =
            ordered_integral({&set[perm[0]], &set[perm[1]]}, opt, &discarded);
        terms.insert(terms.end(), part.begin(), part.end());
      }
    } else {
      static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
      for (const auto& perm : perms) {
        const auto part = ordered_integral(
            {&set[perm[0]], &set[perm[1]], &set[perm[2]]}, opt, &discarded);
        terms.insert(terms.end(), part.begin(), part.end());
      }
    }
    Channel ch = make_channel(in, names[axis], terms);
    ch.census.discarded_paths = discarded;
    model.channels.push_back(std::move(ch));
  }
  return model;
}

namespace {

struct SpaceLayout {
  int nqubits;
  std::vector<BosonSlot> slots;
  int dim;

  SpaceLayout(int nq, const std::vector<BosonSlot>& s) : nqubits(nq), slots(s) {
    dim = 1;
    for (int q = 0; q < nqubits; ++q) dim *= 2;
    for (const auto& slot : slots) {
      if (slot.dim < 1) throw EngineError("boson slot dimension must be >= 1");
      dim *= slot.dim;
    }
  }
};

// Applies a word to basis column `col`; returns false when annihilated.
bool apply_word(const Word& w, const SpaceLayout& lay, int col, int& row,
                cxd& coeff) {
  std::vector<int> occ(lay.slots.size());
  int rest = col;
  for (int s = int(lay.slots.size()) - 1; s >= 0; --s) {
    occ[s] = rest % lay.slots[s].dim;
    rest /= lay.slots[s].dim;
  }
  int q2 = 0, q1 = 0;
  if (lay.nqubits >= 2) {
    q2 = rest % 2;
    rest /= 2;
  }
  q1 = rest % 2;

  coeff = 1.0;
  auto apply_q = [&coeff](QOp op, int& q) {
    switch (op) {
      case QOp::I: return true;
      case QOp::D: coeff *= (q == 0 ? 1.0 : -1.0); return true;
      case QOp::P:
        if (q != 1) return false;
        q = 0;
        return true;
      case QOp::M:
        if (q != 0) return false;
        q = 1;
        return true;
    }
    return false;
  };
  if (!apply_q(w.q1, q1)) return false;
  if (lay.nqubits >= 2) {
    if (!apply_q(w.q2, q2)) return false;
  } else if (w.q2 != QOp::I) {
    throw EngineError("qubit-2 operator on a single-qubit space");
  }

  std::array<bool, kModeCount> have{};
  for (size_t s = 0; s < lay.slots.size(); ++s) have[lay.slots[s].mode] = true;
  for (int m = 0; m < kModeCount; ++m) {
    if ((w.dag[m] || w.ann[m]) && !have[m]) {
      throw EngineError(std::string("word uses mode ") + mode_char(m) +
                        " with no boson slot provided");
    }
  }
  for (size_t s = 0; s < lay.slots.size(); ++s) {
    const int m = lay.slots[s].mode;
    int n = occ[s];
    for (int i = 0; i < w.ann[m]; ++i) {
      if (n == 0) return false;
      coeff *= std::sqrt(double(n));
      --n;
    }
    for (int i = 0; i < w.dag[m]; ++i) {
      if (n + 1 >= lay.slots[s].dim) return false;
      coeff *= std::sqrt(double(n + 1));
      ++n;
    }
    occ[s] = n;
  }

  row = q1;
  if (lay.nqubits >= 2) row = row * 2 + q2;
  for (size_t s = 0; s < lay.slots.size(); ++s) {
    row = row * lay.slots[s].dim + occ[s];
  }
  return true;
}

} // namespace

Mat assemble_matrix(const std::vector<EffectiveCoupling>& cs, int nqubits,
                    const std::vector<BosonSlot>& slots) {
  if (nqubits < 1 || nqubits > 2) throw EngineError("nqubits must be 1 or 2");
  SpaceLayout lay(nqubits, slots);
  Mat h = Mat::Zero(lay.dim, lay.dim);
  for (const auto& c : cs) {
    for (int col = 0; col < lay.dim; ++col) {
      int row = 0;
      cxd coeff;
      if (!apply_word(c.word, lay, col, row, coeff)) continue;
      h(row, col) += c.coeff_mhz * 1e-3 * coeff; // back to GHz
    }
  }
  return h;
}

Mat assemble_time_dependent(const std::vector<const Interaction*>& parts,
                            double t_ns, int nqubits,
                            const std::vector<BosonSlot>& slots) {
  if (nqubits < 1 || nqubits > 2) throw EngineError("nqubits must be 1 or 2");
  SpaceLayout lay(nqubits, slots);
  Mat h = Mat::Zero(lay.dim, lay.dim);
  for (const Interaction* inter : parts) {
    for (const auto& m : inter->monomials) {
      const cxd phase = std::exp(kI * (2.0 * kPi * m.freq_ghz * t_ns));
      for (int col = 0; col < lay.dim; ++col) {
        int row = 0;
        cxd coeff;
        if (!apply_word(m.word, lay, col, row, coeff)) continue;
        h(row, col) += m.amp * phase * coeff;
      }
    }
  }
  return h;
}

} // namespace zbsim::rwa
