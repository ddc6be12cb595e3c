// Standard-form translation layer: Pauli/Dirac generator algebra, the mass
// reflection, the momentum-offset boost, and parameter extraction from the
// effective model.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <complex>
#include <random>

#include "zbsim/diracmap.hpp"
#include "zbsim/rwa.hpp"

using namespace zbsim;
using namespace zbsim::dirac;

namespace {

Mat kron2(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

// Random engine input shaped like a validated configuration (both tones of
// an axis pair share one amplitude); used to feed map_parameters with real
// engine output.
rwa::EngineInput draw(unsigned seed, int dim) {
  std::mt19937 rng(seed);
  auto u = [&](double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng);
  };
  rwa::EngineInput in;
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

} // namespace

TEST_CASE("Pauli matrices have the standard algebra") {
  for (int k = 0; k < 4; ++k) {
    const Mat s = pauli(k);
    CHECK(max_abs(s - s.adjoint()) == 0.0);                 // Hermitian
    CHECK(max_abs(s * s - Mat::Identity(2, 2)) == 0.0);     // involutive
    if (k > 0) CHECK(std::abs(s.trace()) == 0.0);
  }
  const cxd i{0.0, 1.0};
  CHECK(max_abs(pauli(1) * pauli(2) - i * pauli(3)) == 0.0);
  CHECK(max_abs(pauli(2) * pauli(3) - i * pauli(1)) == 0.0);
  CHECK(max_abs(pauli(3) * pauli(1) - i * pauli(2)) == 0.0);
  CHECK_THROWS_AS(pauli(4), DiracError);
  CHECK_THROWS_AS(pauli(-1), DiracError);
}

TEST_CASE("Dirac generators satisfy the Clifford algebra") {
  SUBCASE("four-dimensional form") {
    const auto g = dirac_generators(4);
    for (int a = 0; a < 4; ++a) {
      CHECK(max_abs(g[a] - g[a].adjoint()) <= 1e-14);
      CHECK(max_abs(g[a] * g[a] - Mat::Identity(4, 4)) <= 1e-14);
      for (int b = a + 1; b < 4; ++b)
        CHECK(max_abs(g[a] * g[b] + g[b] * g[a]) <= 1e-14);
    }
    // Qubit-1-major ordering: the mass generator is sigma_z (x) identity.
    CHECK(max_abs(g[3] - kron2(pauli(3), pauli(0))) == 0.0);
    CHECK(g[3](0, 0) == cxd{1.0, 0.0});
    CHECK(g[3](1, 1) == cxd{1.0, 0.0});
    CHECK(g[3](2, 2) == cxd{-1.0, 0.0});
    CHECK(max_abs(g[2] - kron2(pauli(1), pauli(3))) == 0.0);
  }
  SUBCASE("two-dimensional form") {
    const auto g = dirac_generators(2);
    CHECK(max_abs(g[0] - pauli(1)) == 0.0);
    CHECK(max_abs(g[3] - pauli(3)) == 0.0);
    CHECK(max_abs(g[0] * g[3] + g[3] * g[0]) <= 1e-14);
    CHECK(max_abs(g[1]) == 0.0);
    CHECK(max_abs(g[2]) == 0.0);
  }
  CHECK_THROWS_AS(dirac_generators(3), DiracError);
}

TEST_CASE("the mass reflection rotates the quadrature away exactly") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int trial = 0; trial < 12; ++trial) {
    const cxd c{u(rng), u(rng)};
    if (std::abs(c) < 1e-3) continue;
    CAPTURE(trial);

    const Mat h = mass_block(c);
    CHECK(max_abs(h - h.adjoint()) == 0.0);
    const auto es = eigh(h);
    CHECK(es.values(0) == doctest::Approx(-std::abs(c)).epsilon(1e-14));
    CHECK(es.values(1) == doctest::Approx(std::abs(c)).epsilon(1e-14));

    const double theta = mass_angle(c);
    CHECK(theta == std::atan2(c.imag(), c.real()));

    const Mat d = d_matrix(theta);
    CHECK(max_abs(d - d.adjoint()) <= 1e-15);                  // Hermitian
    CHECK(max_abs(d * d - Mat::Identity(2, 2)) <= 1e-15);      // involutive
    CHECK(max_abs(d * d.adjoint() - Mat::Identity(2, 2)) <= 1e-15); // unitary

    const Mat rotated = diagonal_transform(h, theta);
    const double y_left = std::abs((pauli(2) * rotated).trace()) / 2.0;
    const double z_part = ((pauli(3) * rotated).trace() / 2.0).real();
    CHECK(y_left <= 1e-12 * std::abs(c));
    CHECK(z_part == doctest::Approx(std::abs(c)).epsilon(1e-13));
  }
  CHECK_THROWS_AS(diagonal_transform(Mat::Identity(4, 4), 0.1), DiracError);
}

TEST_CASE("rapidity inverts the momentum offset ratio") {
  CHECK(rapidity(0.0, 5.0) == 0.0);
  CHECK(rapidity(0.0, 0.0) == 0.0); // no offset, no boost needed

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double mc2 = 1.0 + std::abs(u(rng));
    const double cp0 = u(rng) * mc2; // |cp0/mc2| <= 2
    const double az = rapidity(cp0, mc2);
    CHECK(std::sinh(2.0 * az) ==
          doctest::Approx(-cp0 / mc2).epsilon(1e-12));
  }

  CHECK_THROWS_WITH_AS(rapidity(0.3, 0.0), doctest::Contains("zero rest"),
                       DiracError);
}

TEST_CASE("the boost removes the static offset and preserves the spectrum") {
  CHECK_THROWS_AS(boost_matrix(std::nan("")), DiracError);
  CHECK_THROWS_AS(lorentz_boost(Mat::Identity(2, 2), 0.1), DiracError);

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 10; ++trial) {
    CAPTURE(trial);
    const double mc2 = 1.0 + 4.0 * std::abs(u(rng)) / 2.0;
    const double cp0 = u(rng) * mc2;
    const double az = rapidity(cp0, mc2);

    const Mat s = boost_matrix(az);
    CHECK(max_abs(Mat(s.imag().cast<cxd>())) == 0.0); // real transform
    CHECK(max_abs(s * boost_matrix(-az) -
                  std::cosh(2.0 * az) * Mat::Identity(4, 4)) <= 1e-14);

    const auto gen = dirac_generators(4);
    const Mat h = mc2 * gen[3] + cp0 * gen[2];
    const Mat boosted = lorentz_boost(h, az);
    const double scale = max_abs(h);

    CHECK(max_abs(boosted - boosted.adjoint()) <= 1e-12 * scale);
    const GeneratorDecomposition dec = decompose_standard(boosted);
    CHECK(std::abs(dec.cp_mhz[2]) <= 1e-10 * scale); // offset cancelled
    CHECK(dec.mc2_mhz ==
          doctest::Approx(std::sqrt(mc2 * mc2 + cp0 * cp0)).epsilon(1e-12));
    CHECK(dec.residual_mhz <= 1e-10 * scale);

    const auto before = eigh(h);
    const auto after = eigh(boosted);
    for (int k = 0; k < 4; ++k)
      CHECK(std::abs(before.values(k) - after.values(k)) <= 1e-10 * scale);
  }
}

TEST_CASE("assemble and decompose are inverse on the generator span") {
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int dim : {1, 2, 3}) {
    for (int trial = 0; trial < 6; ++trial) {
      CAPTURE(dim);
      CAPTURE(trial);
      DiracParameters p;
      p.dimension = dim;
      p.mc2_mhz = 1.0 + std::abs(u(rng));
      for (int k = 0; k < 3; ++k) p.c_mhz[k] = 0.5 + std::abs(u(rng));
      if (dim >= 2) p.cp0_mhz = 0.4 * u(rng);
      const std::array<double, 3> mom = {u(rng), u(rng), u(rng)};

      const Mat h = assemble_standard(p, mom);
      CHECK(h.rows() == (dim == 1 ? 2 : 4));
      const GeneratorDecomposition dec = decompose_standard(h);
      const double scale = max_abs(h);

      CHECK(dec.mc2_mhz == doctest::Approx(p.mc2_mhz).epsilon(1e-13));
      CHECK(std::abs(dec.identity_mhz) <= 1e-13 * scale);
      CHECK(dec.residual_mhz <= 1e-12 * scale);
      for (int k = 0; k < 3; ++k) {
        double want = (k < dim) ? p.c_mhz[k] * mom[k] : 0.0;
        if (dim >= 2 && k == 2) want += p.cp0_mhz; // offset shares sigma_x x sigma_z
        CHECK(dec.cp_mhz[k] == doctest::Approx(want).epsilon(1e-12).scale(1.0));
      }
    }
  }
}

TEST_CASE("standard-form spectra are symmetric energy pairs") {
  auto energies = [](double mc2, std::array<double, 3> cp, double cp0,
                     int dim) {
    DiracParameters p;
    p.dimension = dim;
    p.mc2_mhz = mc2;
    p.cp0_mhz = cp0;
    for (int k = 0; k < 3; ++k) p.c_mhz[k] = 1.0;
    return eigh(assemble_standard(p, cp)).values;
  };

  // Pure rest energy: doubly degenerate +-mc2.
  auto e1 = energies(5.0, {0.0, 0.0, 0.0}, 0.0, 3);
  CHECK(e1(0) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(e1(1) == doctest::Approx(-5.0).epsilon(1e-14));
  CHECK(e1(2) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(e1(3) == doctest::Approx(5.0).epsilon(1e-14));

  // 3-4-5 triangle in one kinetic axis.
  auto e2 = energies(3.0, {4.0, 0.0, 0.0}, 0.0, 3);
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(e2(k)) == doctest::Approx(5.0).epsilon(1e-13));

  // Isotropic momentum: E = sqrt(1 + 3) = 2, each sign twice.
  auto e3 = energies(1.0, {1.0, 1.0, 1.0}, 0.0, 3);
  for (int k = 0; k < 4; ++k)
    CHECK(std::abs(e3(k)) == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e3.sum() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  // Two-by-two form.
  DiracParameters p1;
  p1.dimension = 1;
  p1.mc2_mhz = 3.0;
  p1.c_mhz = {1.0, 0.0, 0.0};
  auto e4 = eigh(assemble_standard(p1, {4.0, 0.0, 0.0})).values;
  CHECK(e4(0) == doctest::Approx(-5.0).epsilon(1e-13));
  CHECK(e4(1) == doctest::Approx(5.0).epsilon(1e-13));
}

TEST_CASE("map_parameters mirrors the engine channels") {
  for (int dim : {1, 3}) {
    CAPTURE(dim);
    const rwa::EngineInput in = draw(500 + unsigned(dim), dim);
    const rwa::EffectiveModel model = rwa::effective_hamiltonian(in);
    const DiracParameters p = map_parameters(model, in);

    CHECK(p.dimension == dim);
    const rwa::Channel* mass = nullptr;
    for (const auto& ch : model.channels)
      if (ch.name == "mass") mass = &ch;
    REQUIRE(mass != nullptr);
    CHECK(p.mass_channel_mhz == mass->channel_mhz);
    CHECK(p.mc2_mhz == std::abs(mass->channel_mhz));
    CHECK(p.theta == std::atan2(mass->channel_mhz.imag(),
                                mass->channel_mhz.real()));

    static const char* kAxis[3] = {"cp_x", "cp_y", "cp_z"};
    for (int k = 0; k < dim; ++k) {
      const rwa::Channel* ch = nullptr;
      for (const auto& c : model.channels)
        if (c.name == kAxis[k]) ch = &c;
      REQUIRE(ch != nullptr);
      CHECK(p.omega_tilde_mhz[k] == std::abs(ch->channel_mhz));
      CHECK(p.delta[k] == in.lambda[k]);
      CHECK(p.c_mhz[k] == 2.0 * p.delta[k] * p.omega_tilde_mhz[k]);
    }

    if (dim >= 2) {
      CHECK(std::isfinite(p.az));
      CHECK(std::sinh(2.0 * p.az) ==
            doctest::Approx(-p.cp0_mhz / p.mc2_mhz).epsilon(1e-12));
    } else {
      CHECK(p.cp0_mhz == 0.0);
      CHECK(p.az == 0.0);
    }
  }
}

TEST_CASE("missing channels are reported by name") {
  const rwa::EngineInput in = draw(600, 3);
  const rwa::EffectiveModel full = rwa::effective_hamiltonian(in);

  auto without = [&](const std::string& name) {
    rwa::EffectiveModel m = full;
    std::erase_if(m.channels,
                  [&](const rwa::Channel& c) { return c.name == name; });
    return m;
  };

  CHECK_THROWS_WITH_AS(map_parameters(without("mass"), in),
                       doctest::Contains("mass"), DiracError);
  CHECK_THROWS_WITH_AS(map_parameters(without("cp_y"), in),
                       doctest::Contains("cp_y"), DiracError);
  CHECK_THROWS_WITH_AS(map_parameters(without("cp_0"), in),
                       doctest::Contains("cp_0"), DiracError);
}

TEST_CASE("a surviving offset with zero rest energy disables the boost") {
  rwa::EngineInput in;
  in.dimension = 2;
  in.lambda = {0.03, 0.03, 0.03, 0.05, 0.05, 0.05, 0.012};

  rwa::EffectiveModel model;
  auto push = [&](const std::string& name, cxd value) {
    rwa::Channel ch;
    ch.name = name;
    ch.channel_mhz = value;
    model.channels.push_back(ch);
  };
  push("mass", cxd{0.0, 0.0});
  push("cp_0", cxd{0.7, 0.0});
  push("cp_x", cxd{1.0, 0.0});
  push("cp_y", cxd{1.0, 0.0});

  const DiracParameters p = map_parameters(model, in);
  CHECK(p.mc2_mhz == 0.0);
  CHECK(p.cp0_mhz == 0.7);
  CHECK(std::isnan(p.az)); // boost refused, flagged rather than thrown
  CHECK_THROWS_AS(boost_matrix(p.az), DiracError);
}
