// Rotating-frame term-collection engine: drive tables, monomial bookkeeping,
// ordered integrals, secular collection, and agreement with the hand-derived
// closed forms.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "zbsim/rwa.hpp"

using namespace zbsim;
using namespace zbsim::rwa;

namespace {

constexpr double kPi = 3.14159265358979323846;

// A random engine input shaped like a validated configuration: both tones of
// each axis pair share one amplitude, bus frequencies sit far above the
// dynamical modes, and drive frequencies/phases are left for the resonance
// table to fill.
EngineInput draw(unsigned seed, int dim) {
  std::mt19937 rng(seed);
  auto u = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  EngineInput in;
  in.dimension = dim;
  for (int l = 0; l < 2; ++l)
    for (int i = 0; i < 4; ++i) {
      in.zcoup[l][i] = u(-0.3, 0.3);
      in.xcoup[l][i] = u(-0.3, 0.3);
    }
  in.xcoup[0][0] = u(0.08, 0.15);
  in.zcoup[1][0] = u(0.03, 0.07);
  in.splitting_ghz = {in.xcoup[0][0], in.zcoup[1][0]};
  in.omega_ghz = {u(0.15, 0.25), u(0.28, 0.38), u(0.42, 0.55),
                  u(35.0, 42.0), u(44.0, 50.0), u(52.0, 60.0), 250.0};
  in.lambda = {u(0.02, 0.06), u(0.02, 0.06), u(0.02, 0.06),
               u(0.04, 0.06), u(0.04, 0.06), u(0.04, 0.06), 0.012};
  in.el_ghz = {u(3000.0, 5000.0), u(3000.0, 5000.0), u(3000.0, 5000.0)};
  in.drives["m"] = {u(0.005, 0.025), 0.0, 0.0};
  const double nx = u(0.005, 0.025);
  const double ny = u(0.005, 0.025);
  in.drives["x1"] = {nx, 0.0, 0.0};
  if (dim >= 2) {
    in.drives["x2"] = {nx, 0.0, 0.0};
    in.drives["y1"] = {ny, 0.0, 0.0};
    in.drives["y2"] = {ny, 0.0, 0.0};
  }
  if (dim >= 3) in.drives["z"] = {u(0.005, 0.025), 0.0, 0.0};
  in.options.denominators = "collapsed";
  return in;
}

double expected_freq(const Monomial& m, const EngineInput& in) {
  auto qf = [&](QOp op, double s) {
    if (op == QOp::P) return 2.0 * s;
    if (op == QOp::M) return -2.0 * s;
    return 0.0;
  };
  double f = qf(m.word.q1, in.splitting_ghz[0]) +
             qf(m.word.q2, in.splitting_ghz[1]) + m.drive_freq_ghz;
  for (int k = 0; k < kModeCount; ++k)
    f += in.omega_ghz[k] * (double(m.word.dag[k]) - double(m.word.ann[k]));
  return f;
}

// Every interaction the engine can build for this input, flattened.
std::vector<Interaction> all_interactions(const EngineInput& in) {
  std::vector<Interaction> parts;
  parts.push_back(build_mass_lines(in));
  if (in.dimension >= 2) {
    auto pair = build_cp0_pair(in);
    parts.push_back(pair[0]);
    parts.push_back(pair[1]);
  }
  for (int axis = 0; axis < std::min(in.dimension, 3); ++axis) {
    auto set = build_axis_interactions(in, axis);
    for (auto& i : set)
      if (!i.monomials.empty()) parts.push_back(i);
  }
  return parts;
}

const Channel& channel(const EffectiveModel& m, const std::string& name) {
  for (const auto& ch : m.channels)
    if (ch.name == name) return ch;
  REQUIRE_MESSAGE(false, "channel not present: " << name);
  static Channel dummy;
  return dummy;
}

double hermiticity_defect(const Mat& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

} // namespace

TEST_CASE("mode bookkeeping and word algebra") {
  const std::string letters = "xyzXYZO";
  for (int i = 0; i < kModeCount; ++i) {
    CHECK(mode_char(i) == letters[size_t(i)]);
    CHECK(mode_index(letters[size_t(i)]) == i);
    CHECK(is_bus(i) == (i >= 3));
  }

  Word w;
  w.q1 = QOp::P;
  w.q2 = QOp::D;
  w.dag[0] = 2;
  w.ann[4] = 1;
  const Word c = w.conjugate();
  CHECK(c.q1 == QOp::M);       // raising and lowering swap
  CHECK(c.q2 == QOp::D);       // diagonal ops are self-conjugate
  CHECK(c.dag[4] == 1);        // creation/annihilation swap per mode
  CHECK(c.ann[0] == 2);
  CHECK(c.dag[0] == 0);
  CHECK(c.conjugate() == w);   // involution

  CHECK(w.str() != c.str());
  CHECK_FALSE(w == c);
  const bool lt = w < c, gt = c < w;
  CHECK(lt != gt); // strict order on distinct words
}

TEST_CASE("resonance table fills zero-frequency drives") {
  SUBCASE("three-dimensional scheme") {
    EngineInput in = draw(101, 3);
    const double s2 = in.splitting_ghz[1];
    const EngineInput r = resonant_drives(in);
    CHECK(r.drives.at("m").omega_ghz == 2.0 * in.splitting_ghz[0]);
    CHECK(r.drives.at("m").phase == 0.0);
    CHECK(r.drives.at("x1").omega_ghz ==
          doctest::Approx(2.0 * s2 + in.omega_ghz[0]).epsilon(1e-15));
    CHECK(r.drives.at("x1").phase == -0.5 * kPi);
    CHECK(r.drives.at("x2").omega_ghz ==
          doctest::Approx(2.0 * s2 - in.omega_ghz[0]).epsilon(1e-15));
    CHECK(r.drives.at("x2").phase == 0.5 * kPi);
    CHECK(r.drives.at("y1").omega_ghz ==
          doctest::Approx(2.0 * s2 + in.omega_ghz[1]).epsilon(1e-15));
    CHECK(r.drives.at("y1").phase == 0.0);
    CHECK(r.drives.at("y2").omega_ghz ==
          doctest::Approx(2.0 * s2 - in.omega_ghz[1]).epsilon(1e-15));
    CHECK(r.drives.at("y2").phase == kPi);
    CHECK(r.drives.at("z").omega_ghz == in.omega_ghz[2]);
    CHECK(r.drives.at("z").phase == -0.5 * kPi);
  }
  SUBCASE("one-dimensional scheme drives the x mode directly") {
    EngineInput in = draw(102, 1);
    const EngineInput r = resonant_drives(in);
    CHECK(r.drives.at("x1").omega_ghz == in.omega_ghz[0]);
    CHECK(r.drives.at("x1").phase == 0.5 * kPi);
    CHECK(r.drives.at("m").omega_ghz == 2.0 * in.splitting_ghz[0]);
  }
  SUBCASE("explicit nonzero entries are preserved") {
    EngineInput in = draw(103, 3);
    in.drives["m"].omega_ghz = 0.123;
    in.drives["m"].phase = 0.7;
    const EngineInput r = resonant_drives(in);
    CHECK(r.drives.at("m").omega_ghz == 0.123);
    CHECK(r.drives.at("m").phase == 0.7);
    CHECK(r.drives.at("x1").omega_ghz != 0.0); // others still filled
  }
}

TEST_CASE("resonance validation flags detuned tones") {
  EngineInput in = resonant_drives(draw(104, 3));
  const ResonanceReport ok = validate_resonance(in);
  CHECK(ok.all_ok);
  CHECK(ok.lines.size() == 6);
  for (const auto& line : ok.lines) CHECK(line.ok);

  in.drives["x1"].omega_ghz += 1e-3; // 1 MHz off resonance
  const ResonanceReport bad = validate_resonance(in);
  CHECK_FALSE(bad.all_ok);
  int flagged = 0;
  for (const auto& line : bad.lines) {
    if (line.name == "x1") {
      CHECK_FALSE(line.ok);
      CHECK(line.residual_ghz == doctest::Approx(1e-3).epsilon(1e-9));
      ++flagged;
    } else {
      CHECK(line.ok);
    }
  }
  CHECK(flagged == 1);

  CHECK(validate_resonance(in, 2e-3).all_ok); // inside a looser tolerance
}

TEST_CASE("monomial frequencies are the signed sums of their parts") {
  for (int dim : {1, 3}) {
    const EngineInput in = resonant_drives(draw(200 + dim, dim));
    for (const auto& part : all_interactions(in)) {
      CAPTURE(part.name);
      CHECK(!part.monomials.empty());
      for (const auto& m : part.monomials) {
        const double want = expected_freq(m, in);
        CHECK(std::abs(m.freq_ghz - want) <=
              1e-12 * (1.0 + std::abs(m.freq_ghz)));
      }
    }
  }
}

TEST_CASE("interaction monomial sets close under conjugation") {
  for (int dim : {1, 3}) {
    const EngineInput in = resonant_drives(draw(300 + dim, dim));
    for (const auto& part : all_interactions(in)) {
      CAPTURE(part.name);
      for (const auto& m : part.monomials) {
        bool found = false;
        for (const auto& n : part.monomials) {
          if (n.word == m.word.conjugate() &&
              std::abs(n.freq_ghz + m.freq_ghz) < 1e-12 &&
              std::abs(n.amp - std::conj(m.amp)) <
                  1e-14 * (1.0 + std::abs(m.amp))) {
            found = true;
            break;
          }
        }
        CHECK_MESSAGE(found, "no conjugate partner for " << m.word.str());
      }
    }
  }
}

TEST_CASE("interaction-picture assembly is Hermitian at arbitrary times") {
  const EngineInput in = resonant_drives(draw(400, 1));
  const auto parts = all_interactions(in);
  std::vector<const Interaction*> ptrs;
  std::set<int> modes;
  for (const auto& p : parts) {
    ptrs.push_back(&p);
    for (const auto& m : p.monomials)
      for (int k = 0; k < kModeCount; ++k)
        if (m.word.dag[k] || m.word.ann[k]) modes.insert(k);
  }
  std::vector<BosonSlot> slots;
  for (int k : modes) slots.push_back({k, is_bus(k) ? 2 : 3});

  for (double t : {0.0, 0.137, 2.5}) {
    const Mat h = assemble_time_dependent(ptrs, t, 1, slots);
    CHECK(h.cwiseAbs().maxCoeff() > 0.0);
    CHECK(hermiticity_defect(h) < 1e-14);
  }
}

TEST_CASE("collapsed-mode engine reproduces the hand closed forms") {
  struct CensusRow {
    int kept, dropped, discarded;
  };
  const std::map<std::string, CensusRow> want1 = {{"mass", {4, 8, 0}},
                                                  {"cp_x", {4, 20, 0}}};
  const std::map<std::string, CensusRow> want3 = {{"mass", {4, 8, 0}},
                                                  {"cp_0", {2, 52, 0}},
                                                  {"cp_x", {16, 368, 480}},
                                                  {"cp_y", {16, 368, 480}},
                                                  {"cp_z", {8, 88, 120}}};

  auto run_draw = [&](unsigned seed, int dim) {
    CAPTURE(seed);
    CAPTURE(dim);
    const EngineInput in = draw(seed, dim);
    const EffectiveModel model = effective_hamiltonian(in);
    CHECK(model.resonance.all_ok);

    const auto& want = (dim == 1) ? want1 : want3;
    CHECK(model.channels.size() == want.size());
    for (const auto& ch : model.channels) {
      CAPTURE(ch.name);
      REQUIRE(want.count(ch.name) == 1);
      const CensusRow row = want.at(ch.name);
      CHECK(ch.census.kept == row.kept);
      CHECK(ch.census.dropped == row.dropped);
      CHECK(ch.census.discarded_paths == row.discarded);
      CHECK(ch.max_rel_mismatch <= 1e-12);
      CHECK(std::abs(ch.channel_mhz) > 0.0);
      CHECK(hermitian_closed(ch.couplings));

      // The secular couplings assemble into a Hermitian matrix once the bus
      // modes have been eliminated.
      const std::vector<BosonSlot> slots = {{0, 2}, {1, 2}, {2, 2}};
      const Mat h =
          assemble_matrix(ch.couplings, dim == 1 ? 1 : 2, slots);
      CHECK(hermiticity_defect(h) < 1e-12);
    }
  };

  for (unsigned seed : {1u, 2u, 3u, 4u, 5u, 6u}) run_draw(seed, 3);
  for (unsigned seed : {11u, 12u}) run_draw(seed, 1);

  SUBCASE("two-dimensional inputs omit the z channel") {
    EngineInput in = draw(21, 2);
    const EffectiveModel model = effective_hamiltonian(in);
    std::set<std::string> names;
    for (const auto& ch : model.channels) names.insert(ch.name);
    CHECK(names == std::set<std::string>{"mass", "cp_0", "cp_x", "cp_y"});
  }
}

TEST_CASE("exact denominators differ from collapsed ones at second order") {
  EngineInput in = draw(1, 3);
  in.options.denominators = "exact";
  const EffectiveModel model = effective_hamiltonian(in);

  // The mass channel is first order (no denominators), so the conventions
  // coincide there; the three-factor momentum channels pick up relative
  // shifts of order (mode frequency / bus frequency).
  CHECK(channel(model, "mass").max_rel_mismatch <= 1e-12);
  double worst = 0.0;
  for (const char* name : {"cp_x", "cp_y", "cp_z"}) {
    const Channel& ch = channel(model, name);
    CHECK(ch.census.discarded_paths == 0); // no path dropping in exact mode
    worst = std::max(worst, ch.max_rel_mismatch);
  }
  CHECK(worst > 1e-6);
  CHECK(channel(model, "cp_x").census.kept >= 16);
}

TEST_CASE("channel strength is exactly linear in its drive amplitude") {
  const EngineInput base = draw(7, 3);
  const EffectiveModel m0 = effective_hamiltonian(base);

  EngineInput dm = base;
  dm.drives["m"].n *= 2.0;
  const EffectiveModel m1 = effective_hamiltonian(dm);
  CHECK(std::abs(channel(m1, "mass").channel_mhz -
                 2.0 * channel(m0, "mass").channel_mhz) <=
        1e-15 * std::abs(channel(m0, "mass").channel_mhz));
  CHECK(channel(m1, "cp_z").channel_mhz == channel(m0, "cp_z").channel_mhz);

  EngineInput dx = base;
  dx.drives["x1"].n *= 2.0;
  dx.drives["x2"].n *= 2.0;
  const EffectiveModel m2 = effective_hamiltonian(dx);
  CHECK(std::abs(channel(m2, "cp_x").channel_mhz -
                 2.0 * channel(m0, "cp_x").channel_mhz) <=
        1e-15 * std::abs(channel(m0, "cp_x").channel_mhz));
  CHECK(channel(m2, "cp_y").channel_mhz == channel(m0, "cp_y").channel_mhz);
  CHECK(channel(m2, "cp_0").channel_mhz == channel(m0, "cp_0").channel_mhz);

  EngineInput dz = base;
  dz.drives["z"].n *= 2.0;
  const EffectiveModel m3 = effective_hamiltonian(dz);
  CHECK(std::abs(channel(m3, "cp_z").channel_mhz -
                 2.0 * channel(m0, "cp_z").channel_mhz) <=
        1e-15 * std::abs(channel(m0, "cp_z").channel_mhz));
}

TEST_CASE("zero drive amplitude yields a null channel") {
  EngineInput in = draw(8, 3);
  in.drives["m"].n = 0.0;
  in.drives["x1"].n = 0.0;
  in.drives["x2"].n = 0.0;
  const EffectiveModel model = effective_hamiltonian(in);
  CHECK(std::abs(channel(model, "mass").channel_mhz) == 0.0);
  CHECK(std::abs(channel(model, "cp_x").channel_mhz) == 0.0);
  CHECK(std::abs(channel(model, "cp_y").channel_mhz) > 0.0);
}

TEST_CASE("a strongly detuned tone leaves no secular terms") {
  EngineInput in = resonant_drives(draw(9, 1));
  in.drives["x1"].omega_ghz += 0.05; // 50 MHz off resonance
  const EffectiveModel model = effective_hamiltonian(in);

  const Channel& cpx = channel(model, "cp_x");
  CHECK(cpx.census.kept == 0);
  CHECK(std::abs(cpx.channel_mhz) == 0.0);
  CHECK(channel(model, "mass").census.kept == 4); // mass line unaffected

  CHECK_FALSE(model.resonance.all_ok);
  for (const auto& line : model.resonance.lines)
    if (line.name == "x1") CHECK_FALSE(line.ok);
}

TEST_CASE("missing drives are reported by name") {
  EngineInput in = draw(10, 3);
  in.drives.erase("z");
  CHECK_THROWS_WITH_AS(build_axis_interactions(in, 2),
                       doctest::Contains("missing drive"), EngineError);
  CHECK_THROWS_AS(effective_hamiltonian(in), EngineError);
}

TEST_CASE("ordered integrals refuse small secular denominators") {
  Interaction outer{"a", {Monomial{cxd{1.0, 0.0}, -5.05, 0.0, Word{}}}};
  Interaction inner{"b", {Monomial{cxd{1.0, 0.0}, 0.05, 0.0, Word{}}}};
  IntegralOptions opt; // default guard 0.1 GHz

  CHECK_THROWS_WITH_AS(ordered_integral({&outer, &inner}, opt),
                       doctest::Contains("small denominator"), EngineError);

  // Far from the guard the same shape integrates fine, and boundary terms
  // appear only on request.
  Interaction outer2{"a", {Monomial{cxd{1.0, 0.0}, -5.0, 0.0, Word{}}}};
  Interaction inner2{"b", {Monomial{cxd{1.0, 0.0}, 5.0, 0.0, Word{}}}};
  const auto plain = ordered_integral({&outer2, &inner2}, opt);
  CHECK(!plain.empty());
  for (const auto& t : plain) CHECK(t.prov.denominators_ghz.size() == 1);
  IntegralOptions keep = opt;
  keep.keep_boundary = true;
  const auto with_boundary = ordered_integral({&outer2, &inner2}, keep);
  CHECK(with_boundary.size() > plain.size());

  CHECK_THROWS_WITH_AS(ordered_integral({}, opt),
                       doctest::Contains("1 to 3"), EngineError);
  const std::vector<const Interaction*> four = {&outer2, &inner2, &outer2,
                                                &inner2};
  CHECK_THROWS_WITH_AS(ordered_integral(four, opt),
                       doctest::Contains("1 to 3"), EngineError);
}

TEST_CASE("engine output is deterministic") {
  const EngineInput in = draw(5, 3);
  const EffectiveModel a = effective_hamiltonian(in);
  const EffectiveModel b = effective_hamiltonian(in);
  REQUIRE(a.channels.size() == b.channels.size());
  for (size_t i = 0; i < a.channels.size(); ++i) {
    const Channel& ca = a.channels[i];
    const Channel& cb = b.channels[i];
    CHECK(ca.name == cb.name);
    CHECK(ca.channel_mhz == cb.channel_mhz);
    CHECK(ca.max_rel_mismatch == cb.max_rel_mismatch);
    CHECK(ca.census.kept == cb.census.kept);
    CHECK(ca.census.dropped == cb.census.dropped);
    CHECK(ca.census.freq_histogram == cb.census.freq_histogram);
    REQUIRE(ca.couplings.size() == cb.couplings.size());
    for (size_t j = 0; j < ca.couplings.size(); ++j) {
      CHECK(ca.couplings[j].word == cb.couplings[j].word);
      CHECK(ca.couplings[j].coeff_mhz == cb.couplings[j].coeff_mhz);
    }
  }
}

TEST_CASE("unknown channel names are refused") {
  const EngineInput in = draw(6, 3);
  CHECK_THROWS_WITH_AS(closed_form_channel_mhz(in, "bogus"),
                       doctest::Contains("unknown channel"), EngineError);
  CHECK_THROWS_WITH_AS(channel_pattern(in, "bogus"),
                       doctest::Contains("unknown channel"), EngineError);
}

TEST_CASE("dense assembly guards its operator space") {
  EffectiveCoupling c;
  c.coeff_mhz = cxd{1.0, 0.0};
  c.word.q2 = QOp::P;
  const std::vector<EffectiveCoupling> cs = {c};

  CHECK_THROWS_WITH_AS(assemble_matrix(cs, 1, {}),
                       doctest::Contains("qubit-2"), EngineError);
  CHECK_THROWS_WITH_AS(assemble_matrix(cs, 3, {}),
                       doctest::Contains("nqubits"), EngineError);
  CHECK_THROWS_WITH_AS(assemble_matrix(cs, 2, {{0, 0}}),
                       doctest::Contains(">= 1"), EngineError);
}
