// Command-line front end: each subcommand runs one pipeline stage and writes
// its artifact(s) into --out; `all` produces the full set plus a manifest.
// Error reporting contract:
//   config-error: <msg>   exit 2   (bad flags, bad config file, bad sweep)
//   io-error: <msg>       exit 1   (unreadable/unwritable files)
//   run-error: <msg>      exit 1   (anything thrown while computing)
//   golden-mismatch lines exit 3   (--golden comparison failed)
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "zbsim/pipeline.hpp"

namespace fs = std::filesystem;
using namespace zbsim;

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir = "out";
  std::string sweep_spec;
  std::string golden_dir;
  bool oracle = false;
  std::uint64_t seed = 0;
};

int golden_compare(const std::vector<std::string>& files,
                   const std::string& out_dir,
                   const std::string& golden_dir) {
  std::vector<std::string> mismatches;
  for (const auto& name : files) {
    const std::string got = (fs::path(out_dir) / name).string();
    const std::string want = (fs::path(golden_dir) / name).string();
    if (name.size() > 4 && name.substr(name.size() - 4) == ".csv") {
      auto diffs = csv::compare_tables(csv::read_table(want),
                                       csv::read_table(got), 1e-9);
      for (const auto& d : diffs) mismatches.push_back(name + ": " + d);
    } else if (name == "manifest.json") {
      std::string why;
      if (!manifest::equal_modulo_timing(manifest::read_text(want),
                                         manifest::read_text(got), &why))
        mismatches.push_back(name + ": " + why);
    } else {
      auto ja = manifest::Json::parse(manifest::read_text(want));
      auto jb = manifest::Json::parse(manifest::read_text(got));
      if (ja != jb) mismatches.push_back(name + ": json content differs");
    }
  }
  if (!mismatches.empty()) {
    for (const auto& m : mismatches)
      std::cerr << "golden-mismatch: " << m << "\n";
    return 3;
  }
  std::cout << "golden: match (" << files.size() << " files)\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flux-qubit circuit reduction, sideband-driven wave-equation "
               "emulation, trembling-motion trajectories, and decoherence "
               "feasibility."};
  app.set_version_flag("--version", std::string(manifest::kToolName) + " " +
                                        manifest::kToolVersion);
  CliOptions o;
  app.add_option("--config", o.config_path,
                 "JSON configuration file (defaults to the built-in 1+1D "
                 "setup)");
  app.add_option("--out", o.out_dir, "output directory")
      ->capture_default_str();
  app.add_flag("--oracle", o.oracle,
               "cross-check trajectories against the direct velocity "
               "integrator (extra columns in zitter.csv)");
  app.add_option("--sweep", o.sweep_spec,
                 "parameter sweep as KEY=START:STOP:N (keys: f1, f2, alpha, "
                 "beta, ej_ghz, ec_ghz)");
  app.add_option("--seed", o.seed, "seed recorded in the manifest")
      ->capture_default_str();
  app.add_option("--golden", o.golden_dir,
                 "directory with reference artifacts to compare against");
  app.require_subcommand(1);

  auto add = [&](const char* n, const char* d) {
    CLI::App* s = app.add_subcommand(n, d);
    s->fallthrough();
    return s;
  };
  CLI::App* c_spectrum =
      add("spectrum", "two-level reduction across the frame flux");
  CLI::App* c_quantize =
      add("quantize", "oscillator reduction of every junction mode");
  CLI::App* c_effective =
      add("effective", "time-averaged sideband channel amplitudes");
  CLI::App* c_dirac = add("dirac", "mapped wave-equation parameters");
  CLI::App* c_zitter =
      add("zitter", "wavepacket trajectory with beat analysis");
  CLI::App* c_decohere =
      add("decohere", "relaxation and dephasing feasibility report");
  CLI::App* c_sweep = add("sweep", "parameter sweep (requires --sweep)");
  CLI::App* c_all = add("all", "every artifact plus the run manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "config-error: " << e.what() << "\n";
    return 2;
  }

  SimulationConfig cfg;
  pipeline::SweepSpec sw;
  try {
    if (o.config_path.empty()) {
      cfg = default_config(1);
    } else {
      if (!fs::exists(o.config_path)) {
        std::cerr << "io-error: cannot open config file: " << o.config_path
                  << "\n";
        return 1;
      }
      cfg = load_config_file(o.config_path);
    }
    validate(cfg);
    if (c_sweep->parsed()) {
      if (o.sweep_spec.empty())
        throw ConfigError("sweep requires --sweep KEY=START:STOP:N");
      sw = pipeline::parse_sweep(o.sweep_spec);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config-error: " << e.what() << "\n";
    return 2;
  } catch (const pipeline::PipelineError& e) {
    std::cerr << "config-error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "config-error: " << e.what() << "\n";
    return 2;
  }

  std::vector<std::string> files;
  try {
    fs::create_directories(o.out_dir);
    auto path = [&](const std::string& name) {
      return (fs::path(o.out_dir) / name).string();
    };

    if (c_all->parsed()) {
      files = pipeline::run_all(cfg, o.out_dir, o.oracle, o.seed);
    } else if (c_spectrum->parsed()) {
      csv::Table t =
          pipeline::spectrum_sweep(cfg.qubit1, cfg.options,
                                   cfg.qubit1.f1 - 0.2, cfg.qubit1.f1 + 0.2,
                                   41);
      csv::write_table(path("spectrum.csv"), t);
      files = {"spectrum.csv"};
    } else if (c_quantize->parsed()) {
      csv::write_table(path("modes.csv"),
                       pipeline::mode_table_csv(pipeline::solve_mode_table(cfg)));
      files = {"modes.csv"};
    } else if (c_effective->parsed()) {
      pipeline::RunResult rr = pipeline::run(cfg);
      csv::write_table(path("effective.csv"), pipeline::effective_csv(rr.model));
      files = {"effective.csv"};
    } else if (c_dirac->parsed()) {
      pipeline::RunResult rr = pipeline::run(cfg);
      manifest::write_text(path("dirac.json"),
                           manifest::dump(pipeline::dirac_json(rr)));
      files = {"dirac.json"};
    } else if (c_zitter->parsed()) {
      pipeline::RunResult rr = pipeline::run(cfg);
      pipeline::ZitterResult zr = pipeline::zitter_stage(rr, o.oracle);
      csv::write_table(path("zitter.csv"), zr.table);
      files = {"zitter.csv"};
      if (zr.analysis_ok) {
        std::cout << "beat: " << zr.analysis.frequency_mhz
                  << " MHz, amplitude " << zr.analysis.amplitude
                  << ", drift " << zr.analysis.drift_velocity
                  << " widths/us\n";
      } else {
        std::cout << "beat analysis unavailable: " << zr.analysis_error
                  << "\n";
      }
      if (o.oracle)
        std::cout << "oracle max deviation: " << zr.oracle_max_dev << "\n";
    } else if (c_decohere->parsed()) {
      pipeline::RunResult rr = pipeline::run(cfg);
      manifest::write_text(path("feasibility.json"),
                           manifest::dump(pipeline::feasibility_json(rr.feas)));
      files = {"feasibility.json"};
    } else if (c_sweep->parsed()) {
      csv::write_table(path("sweep.csv"), pipeline::run_sweep(cfg, sw, true));
      files = {"sweep.csv"};
    }

    for (const auto& f : files) std::cout << "wrote " << path(f) << "\n";
  } catch (const csv::CsvError& e) {
    std::cerr << "io-error: " << e.what() << "\n";
    return 1;
  } catch (const manifest::IoError& e) {
    std::cerr << "io-error: " << e.what() << "\n";
    return 1;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "io-error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "run-error: " << e.what() << "\n";
    return 1;
  }

  if (!o.golden_dir.empty()) {
    try {
      return golden_compare(files, o.out_dir, o.golden_dir);
    } catch (const std::exception& e) {
      std::cerr << "io-error: " << e.what() << "\n";
      return 1;
    }
  }
  return 0;
}
