// Configuration, CSV, manifest and constants: serialization round trips,
// validation errors, hashing, numeric formatting, and tolerance-aware
// comparison utilities.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "zbsim/config.hpp"
#include "zbsim/constants.hpp"
#include "zbsim/csvio.hpp"
#include "zbsim/manifest.hpp"

namespace fs = std::filesystem;
using namespace zbsim;

namespace {

fs::path temp_dir(const char* tag) {
  fs::path d = fs::temp_directory_path() / (std::string("zbsim_core_") + tag);
  fs::create_directories(d);
  return d;
}

} // namespace

TEST_CASE("default configs validate for all dimensions") {
  for (int d = 1; d <= 3; ++d) {
    SimulationConfig cfg = default_config(d);
    CHECK(cfg.dimension == d);
    CHECK_NOTHROW(validate(cfg));
    CHECK(cfg.axes().size() == static_cast<size_t>(d));
  }
  CHECK_THROWS_AS(default_config(0), ConfigError);
  CHECK_THROWS_AS(default_config(4), ConfigError);
}

TEST_CASE("serialize/load round trip is a fixed point") {
  for (int d = 1; d <= 3; ++d) {
    SimulationConfig cfg = default_config(d);
    std::string text = serialize_config(cfg);
    SimulationConfig back = load_config_text(text);
    std::string text2 = serialize_config(back);
    CHECK(text == text2);
    CHECK(fnv1a64(text) == fnv1a64(text2));
  }
}

TEST_CASE("round trip preserves non-default fields bit for bit") {
  SimulationConfig cfg = default_config(2);
  cfg.qubit1.f1 = 1.0 / 3.0 + 0.00123456789012345;
  cfg.qubit1.ej_ghz = 299.87654321012345;
  cfg.drives.nx = 0.0123456789012345;
  cfg.options.eps_den_ghz = 0.0987654321;
  cfg.options.denominators = "collapsed";
  cfg.modes.lambda["x"] = 0.05123456789;
  cfg.modes.omega_ghz["x"] = 5.987654321;
  cfg.target.mc2_mhz = 4.321;
  SimulationConfig back = load_config_text(serialize_config(cfg));
  CHECK(back.qubit1.f1 == cfg.qubit1.f1);
  CHECK(back.qubit1.ej_ghz == cfg.qubit1.ej_ghz);
  CHECK(back.drives.nx == cfg.drives.nx);
  CHECK(back.options.eps_den_ghz == cfg.options.eps_den_ghz);
  CHECK(back.options.denominators == cfg.options.denominators);
  CHECK(back.modes.lambda.at("x") == cfg.modes.lambda.at("x"));
  CHECK(back.modes.omega_ghz.at("x") == cfg.modes.omega_ghz.at("x"));
  CHECK(back.target.mc2_mhz == cfg.target.mc2_mhz);
  CHECK(back.dimension == 2);
  REQUIRE(back.qubit2.has_value());
}

TEST_CASE("config hash is sensitive to any field change") {
  SimulationConfig a = default_config(1);
  SimulationConfig b = a;
  b.qubit1.f1 += 1e-9;
  CHECK(fnv1a64(serialize_config(a)) != fnv1a64(serialize_config(b)));
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("unknown keys are rejected, not silently dropped") {
  CHECK_THROWS_WITH_AS(load_config_text("{\"dimensoin\": 1}"),
                       doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_WITH_AS(
      load_config_text("{\"qubit1\": {\"ej_gzh\": 100.0}}"),
      doctest::Contains("unknown key"), ConfigError);
  CHECK_THROWS_AS(load_config_text("not json at all"), ConfigError);
  CHECK_THROWS_AS(load_config_text("[1,2,3]"), ConfigError);
}

TEST_CASE("validation rejects out-of-domain parameters") {
  SimulationConfig cfg = default_config(1);

  SUBCASE("flux out of range") {
    cfg.qubit1.f1 = 1.5;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("f1 out of range"),
                         ConfigError);
  }
  SUBCASE("alpha out of range") {
    cfg.qubit1.alpha = 0.0;
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("phase bias at critical current") {
    cfg.phase.at("x").bias_ratio = 1.0;
    CHECK_THROWS_WITH_AS(
        validate(cfg),
        doctest::Contains("bias_ratio at or beyond critical current"),
        ConfigError);
  }
  SUBCASE("drive amplitude window") {
    cfg.drives.nx = 0.2;
    CHECK_THROWS_WITH_AS(validate(cfg), doctest::Contains("out of range"),
                         ConfigError);
  }
  SUBCASE("noise log window") {
    cfg.noise.omega_c_ghz = 2.0; // above omega_t
    CHECK_THROWS_WITH_AS(validate(cfg),
                         doctest::Contains("omega_t must exceed omega_c"),
                         ConfigError);
  }
  SUBCASE("truncation floor") {
    cfg.options.n_max = 4;
    CHECK_THROWS_WITH_AS(validate(cfg),
                         doctest::Contains("n_max below minimum"),
                         ConfigError);
  }
  SUBCASE("denominator convention") {
    cfg.options.denominators = "sloppy";
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("wavepacket kind") {
    cfg.wavepacket.kind = "lorentzian";
    CHECK_THROWS_AS(validate(cfg), ConfigError);
  }
  SUBCASE("missing qubit2 in 2d") {
    SimulationConfig c2 = default_config(2);
    c2.qubit2.reset();
    CHECK_THROWS_WITH_AS(validate(c2), doctest::Contains("requires qubit2"),
                         ConfigError);
  }
}

TEST_CASE("load_config_file reports unopenable paths") {
  CHECK_THROWS_WITH_AS(load_config_file("/nonexistent/zbsim.json"),
                       doctest::Contains("cannot open config file"),
                       ConfigError);
}

TEST_CASE("f3 is derived from f1 and f2") {
  FluxQubitParams p;
  p.f1 = 0.31;
  p.f2 = 0.4;
  CHECK(p.f3() == doctest::Approx(0.51).epsilon(1e-15));
}

TEST_CASE("hierarchy warnings flag ratio and degeneracy violations") {
  std::map<std::string, double> good = {{"x", 0.3}, {"X", 40.0}};
  CHECK(hierarchy_warnings(good, 0.1, 0.0, 1).empty());

  // 3d table with a degenerate bus pair and a weak O/bus ratio.
  std::map<std::string, double> bad = {{"x", 0.3}, {"y", 0.35}, {"z", 0.4},
                                       {"X", 40.0}, {"Y", 40.1}, {"Z", 50.0},
                                       {"O", 60.0}};
  auto w = hierarchy_warnings(bad, 0.1, 0.1, 3);
  bool saw_ratio = false, saw_degenerate = false;
  for (const auto& s : w) {
    if (s.find("below ratio 5") != std::string::npos) saw_ratio = true;
    if (s.find("degenerate bus frequencies") != std::string::npos)
      saw_degenerate = true;
  }
  CHECK(saw_ratio);
  CHECK(saw_degenerate);
}

TEST_CASE("csv formatting keeps 17 significant digits") {
  CHECK(csv::fmt(1.0) == "1.0000000000000000e+00");
  CHECK(csv::fmt(-0.1) == "-1.0000000000000001e-01");
  double x = 0.1 + 0.2;
  CHECK(std::stod(csv::fmt(x)) == x); // bit-exact round trip through text
}

TEST_CASE("csv write/read round trip is bit exact") {
  fs::path dir = temp_dir("csv");
  fs::path p = dir / "t.csv";
  csv::Table t;
  t.columns = {"a", "b", "label"};
  t.rows = {{csv::fmt(1.0 / 3.0), csv::fmt(-2.5e-17), "row0"},
            {csv::fmt(6.02214076e23), csv::fmt(0.0), "row1"}};
  csv::write_table(p.string(), t);
  csv::Table back = csv::read_table(p.string());
  REQUIRE(back.columns == t.columns);
  REQUIRE(back.rows == t.rows);
  CHECK(csv::compare_tables(t, back, 0.0).empty());
  fs::remove_all(dir);
}

TEST_CASE("csv comparison applies relative tolerance to numeric cells") {
  csv::Table a, b;
  a.columns = b.columns = {"v", "s"};
  a.rows = {{csv::fmt(100.0), "tag"}};
  b.rows = {{csv::fmt(100.0 * (1.0 + 5e-10)), "tag"}};
  CHECK(csv::compare_tables(a, b, 1e-9).empty());

  b.rows = {{csv::fmt(100.0 * (1.0 + 5e-8)), "tag"}};
  auto diffs = csv::compare_tables(a, b, 1e-9);
  REQUIRE(diffs.size() == 1);
  CHECK(diffs[0].find("col v") != std::string::npos);

  // Non-numeric cells must match exactly.
  b.rows = {{csv::fmt(100.0), "Tag"}};
  CHECK(csv::compare_tables(a, b, 1e-9).size() == 1);

  // Shape mismatches are reported rather than crashing.
  csv::Table c = a;
  c.rows.push_back({csv::fmt(1.0), "x"});
  CHECK_FALSE(csv::compare_tables(a, c, 1e-9).empty());
  csv::Table d = a;
  d.columns = {"v", "other"};
  CHECK_FALSE(csv::compare_tables(a, d, 1e-9).empty());
}

TEST_CASE("csv read rejects ragged rows") {
  fs::path dir = temp_dir("ragged");
  fs::path p = dir / "bad.csv";
  {
    std::ofstream out(p);
    out << "a,b\n1.0,2.0\n3.0\n";
  }
  CHECK_THROWS_AS(csv::read_table(p.string()), csv::CsvError);
  CHECK_THROWS_AS(csv::read_table((dir / "missing.csv").string()),
                  csv::CsvError);
  fs::remove_all(dir);
}

TEST_CASE("manifest comparison ignores only the timing block") {
  manifest::Json a;
  a["tool"] = "zbsim";
  a["derived"]["gap_ghz"] = 0.2108;
  a["wall_clock_s"]["total"] = 1.25;

  manifest::Json b = a;
  b["wall_clock_s"]["total"] = 99.0;
  std::string why;
  CHECK(manifest::equal_modulo_timing(manifest::dump(a), manifest::dump(b),
                                      &why));

  b["derived"]["gap_ghz"] = 0.2109;
  CHECK_FALSE(manifest::equal_modulo_timing(manifest::dump(a),
                                            manifest::dump(b), &why));
  CHECK_FALSE(why.empty());
}

TEST_CASE("manifest text io round trips and errors cleanly") {
  fs::path dir = temp_dir("manifest");
  fs::path p = dir / "m.json";
  manifest::Json j;
  j["a"] = 1;
  j["b"]["c"] = "text";
  std::string text = manifest::dump(j);
  CHECK(text.back() == '\n');
  manifest::write_text(p.string(), text);
  CHECK(manifest::read_text(p.string()) == text);
  CHECK_THROWS_AS(manifest::read_text((dir / "absent.json").string()),
                  manifest::IoError);
  fs::remove_all(dir);
}

TEST_CASE("angular conversion and inductance identities") {
  double f = 5.3482545287562990;
  CHECK(from_angular(to_angular(f)) == doctest::Approx(f).epsilon(1e-15));
  CHECK(to_angular(1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-16));

  // L -> E_L -> L closes: both maps are (Phi0/2pi)^2 / value.
  double l_ph = 33.0;
  double el = inductive_energy_ghz(l_ph);
  CHECK(junction_inductance_ph(el) == doctest::Approx(l_ph).epsilon(1e-12));
  // 40 pH is a few-thousand-GHz inductive energy at these constants.
  CHECK(inductive_energy_ghz(40.0) == doctest::Approx(4086.5378).epsilon(1e-6));
}
