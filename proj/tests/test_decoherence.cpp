// Relaxation/dephasing rate estimates and the sideband feasibility summary.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "zbsim/decoherence.hpp"

using namespace zbsim;
using namespace zbsim::decoherence;

namespace {

RelaxationInput flux_only() {
  RelaxationInput in;
  in.omega10_ghz = 0.21;
  in.i01_na = 358.55;
  in.n01 = 0.0;
  in.env.m_ph = 5.0;
  in.env.r_ohm = 50.0;
  in.env.cg_ratio = 0.0;
  return in;
}

RelaxationInput charge_only() {
  RelaxationInput in;
  in.omega10_ghz = 5.0;
  in.i01_na = 0.0;
  in.n01 = 0.6;
  in.env.m_ph = 0.0;
  in.env.r_ohm = 50.0;
  in.env.cg_ratio = 0.01;
  return in;
}

} // namespace

TEST_CASE("relaxation rates are pinned against hand-computed references") {
  // Inductive channel: (2 pi)^2 nu (M I)^2 ReY 1e-39 / h, evaluated by hand
  // for nu = 0.21 GHz, M = 5 pH, I = 358.55 nA, ReY = 1/50 S.
  CHECK(relaxation_rate_mhz(flux_only()) ==
        doctest::Approx(8.042525749240259e-01).epsilon(1e-12));
  // Capacitive channel: (2 pi)^2 nu (2e (Cg/C) n01)^2 ReZ 1e3 / h for
  // nu = 5 GHz, Cg/C = 0.01, n01 = 0.6, ReZ = 50 ohm.
  CHECK(relaxation_rate_mhz(charge_only()) ==
        doctest::Approx(5.505883217071655e-02).epsilon(1e-12));

  // The channels add independently.
  RelaxationInput both = flux_only();
  both.env.cg_ratio = 0.01;
  both.n01 = 0.6;
  RelaxationInput charge_same_nu = both;
  charge_same_nu.env.m_ph = 0.0;
  const double sum =
      relaxation_rate_mhz(flux_only()) + relaxation_rate_mhz(charge_same_nu);
  CHECK(relaxation_rate_mhz(both) == doctest::Approx(sum).epsilon(1e-14));
}

TEST_CASE("relaxation scaling laws are exact") {
  const RelaxationInput base = flux_only();
  const double g = relaxation_rate_mhz(base);
  CHECK(g > 0.0);

  SUBCASE("no coupling, no decay") {
    RelaxationInput off = base;
    off.env.m_ph = 0.0;
    off.env.cg_ratio = 0.0;
    CHECK(relaxation_rate_mhz(off) == 0.0);
  }
  SUBCASE("quadrupled mutual inductance scales the rate by sixteen") {
    RelaxationInput in = base;
    in.env.m_ph *= 4.0;
    CHECK(relaxation_rate_mhz(in) == 16.0 * g);
  }
  SUBCASE("rate is linear in the admittance") {
    RelaxationInput in = base;
    in.env.r_ohm *= 2.0; // ReY = 1/R halves
    CHECK(relaxation_rate_mhz(in) == 0.5 * g);
  }
  SUBCASE("rate is linear in the transition frequency") {
    RelaxationInput in = base;
    in.omega10_ghz *= 2.0;
    CHECK(relaxation_rate_mhz(in) == 2.0 * g);
  }
  SUBCASE("squared matrix element") {
    RelaxationInput in = base;
    in.i01_na *= 2.0;
    CHECK(relaxation_rate_mhz(in) == 4.0 * g);
  }
  SUBCASE("charge channel is linear in ReZ and quadratic in Cg/C") {
    const RelaxationInput cbase = charge_only();
    const double c = relaxation_rate_mhz(cbase);
    RelaxationInput in = cbase;
    in.env.r_ohm *= 2.0;
    CHECK(relaxation_rate_mhz(in) == 2.0 * c);
    in = cbase;
    in.env.cg_ratio *= 2.0;
    CHECK(relaxation_rate_mhz(in) == 4.0 * c);
    in = cbase;
    in.n01 *= 2.0;
    CHECK(relaxation_rate_mhz(in) == 4.0 * c);
  }
  SUBCASE("negative frequency is refused") {
    RelaxationInput in = base;
    in.omega10_ghz = -1.0;
    CHECK_THROWS_AS(relaxation_rate_mhz(in), DecoherenceError);
  }
}

TEST_CASE("1/f dephasing follows the square-root log window") {
  // A = 0.5 GHz per flux quantum, alpha = 1e-12, window 1 GHz down to 1 Hz.
  const double rate = dephasing_rate_mhz({{0.5, 1e-12}}, 1.0, 1e-9);
  CHECK(rate == doctest::Approx(2.276140694077719e-03).epsilon(1e-12));

  SUBCASE("quadrupled squared amplitude doubles the rate") {
    CHECK(dephasing_rate_mhz({{0.5, 4e-12}}, 1.0, 1e-9) == 2.0 * rate);
  }
  SUBCASE("linear in the sensitivity magnitude, sign ignored") {
    CHECK(dephasing_rate_mhz({{1.0, 1e-12}}, 1.0, 1e-9) == 2.0 * rate);
    CHECK(dephasing_rate_mhz({{-0.5, 1e-12}}, 1.0, 1e-9) == rate);
  }
  SUBCASE("channels add") {
    const double two =
        dephasing_rate_mhz({{0.5, 1e-12}, {0.25, 9e-12}}, 1.0, 1e-9);
    const double second = dephasing_rate_mhz({{0.25, 9e-12}}, 1.0, 1e-9);
    CHECK(two == doctest::Approx(rate + second).epsilon(1e-15));
  }
  SUBCASE("zero sensitivity dephases nothing") {
    CHECK(dephasing_rate_mhz({{0.0, 1e-12}}, 1.0, 1e-9) == 0.0);
    CHECK(dephasing_rate_mhz({}, 1.0, 1e-9) == 0.0);
  }
  SUBCASE("empty or inverted log windows are refused") {
    CHECK_THROWS_WITH_AS(dephasing_rate_mhz({{0.5, 1e-12}}, 1e-9, 1e-9),
                         doctest::Contains("omega_t > omega_c"),
                         DecoherenceError);
    CHECK_THROWS_AS(dephasing_rate_mhz({{0.5, 1e-12}}, 0.5, 1.0),
                    DecoherenceError);
    CHECK_THROWS_AS(dephasing_rate_mhz({{0.5, 1e-12}}, 1.0, 0.0),
                    DecoherenceError);
    CHECK_THROWS_AS(dephasing_rate_mhz({{0.5, -1e-12}}, 1.0, 1e-9),
                    DecoherenceError);
  }
}

TEST_CASE("the feasibility report combines the rates exactly") {
  RelaxationInput relax = flux_only();
  relax.env.alpha_flux = 1e-12;
  relax.env.omega_t_ghz = 1.0;
  relax.env.omega_c_ghz = 1e-9;
  const double sens = 0.5;

  const FeasibilityReport rep =
      feasibility(relax, sens, {{"x", 0.1}, {"y", 0.05}, {"z", 1.0}});

  const double g1 = relaxation_rate_mhz(relax);
  const double gphi = dephasing_rate_mhz({{sens, relax.env.alpha_flux}},
                                         relax.env.omega_t_ghz,
                                         relax.env.omega_c_ghz);
  CHECK(rep.gamma1_mhz == g1);
  CHECK(rep.gamma_phi_mhz == gphi);
  CHECK(rep.gamma2_mhz == 0.5 * g1 + gphi); // exact by construction
  CHECK(rep.t1_us == 1.0 / g1);
  CHECK(rep.t2_us == 1.0 / rep.gamma2_mhz);
  CHECK(rep.sensitivity_ghz_per_flux == sens);

  REQUIRE(rep.axes.size() == 3);
  CHECK(rep.axes[0].axis == "x");
  // A 0.1 MHz sideband rate means a 2.5 us half flop.
  CHECK(rep.axes[0].transition_time_us == 2.5);
  CHECK(rep.axes[1].transition_time_us == 5.0);
  CHECK(rep.axes[2].transition_time_us == 0.25);
  for (const auto& ax : rep.axes)
    CHECK(ax.ratio_t2 == rep.t2_us / ax.transition_time_us);

  // T2 here is ~2.4 us: the 2.5/5.0 us transitions fail the >3x margin.
  CHECK(rep.t2_above_1us);
  CHECK_FALSE(rep.claim_satisfied);

  // With fast sidebands on every axis the claim holds.
  const FeasibilityReport fast =
      feasibility(relax, sens, {{"x", 2.0}, {"y", 2.0}, {"z", 2.0}});
  CHECK(fast.claim_satisfied);
  for (const auto& ax : fast.axes) CHECK(ax.ratio_t2 > 3.0);

  // No axes, no claim.
  CHECK_FALSE(feasibility(relax, sens, {}).claim_satisfied);
}

TEST_CASE("silent environments give infinite lifetimes") {
  RelaxationInput relax;
  relax.omega10_ghz = 1.0;
  relax.i01_na = 0.0;
  relax.n01 = 0.0;
  relax.env.m_ph = 0.0;
  relax.env.cg_ratio = 0.0;

  const FeasibilityReport rep = feasibility(relax, 0.0, {{"x", 0.1}});
  CHECK(rep.gamma1_mhz == 0.0);
  CHECK(rep.gamma_phi_mhz == 0.0);
  CHECK(rep.gamma2_mhz == 0.0);
  CHECK(std::isinf(rep.t1_us));
  CHECK(std::isinf(rep.t2_us));
  CHECK(rep.t2_above_1us);
  CHECK(rep.claim_satisfied);

  // A zero sideband rate can never flop: infinite transition time.
  const FeasibilityReport stuck = feasibility(relax, 0.0, {{"x", 0.0}});
  CHECK(std::isinf(stuck.axes[0].transition_time_us));
  CHECK_FALSE(stuck.claim_satisfied);
}
