// Serial-vs-OpenMP timing for the two data-parallel kernels: the flux sweep
// (independent eigensolves per bias point) and the wavepacket average
// (independent trajectories per momentum sample). Both parallel paths must
// reproduce the serial output bit for bit; this binary verifies that while
// it times them.
//
// Usage: bench_parallel [sweep_points] [momentum_samples]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "zbsim/constants.hpp"
#include "zbsim/pipeline.hpp"

using namespace zbsim;
using Clock = std::chrono::steady_clock;

static double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
  const int sweep_points = argc > 1 ? std::atoi(argv[1]) : 33;
  const int momentum_samples = argc > 2 ? std::atoi(argv[2]) : 101;
#ifdef _OPENMP
  std::printf("openmp: %d thread(s)\n", omp_get_max_threads());
#else
  std::printf("openmp: disabled at build time\n");
#endif

  // --- flux sweep ---------------------------------------------------------
  SimulationConfig cfg = default_config(1);
  pipeline::SweepSpec spec;
  spec.key = "f1";
  spec.start = cfg.qubit1.f1 - 0.02;
  spec.stop = cfg.qubit1.f1 + 0.02;
  spec.n = sweep_points;

  auto t0 = Clock::now();
  csv::Table serial_tbl = pipeline::run_sweep(cfg, spec, false);
  const double t_serial_sweep = elapsed(t0);

  t0 = Clock::now();
  csv::Table parallel_tbl = pipeline::run_sweep(cfg, spec, true);
  const double t_parallel_sweep = elapsed(t0);

  bool sweep_identical = serial_tbl.columns == parallel_tbl.columns &&
                         serial_tbl.rows == parallel_tbl.rows;
  std::printf("sweep %d pts: serial %.3f s, parallel %.3f s, speedup %.2fx, "
              "outputs %s\n",
              sweep_points, t_serial_sweep, t_parallel_sweep,
              t_serial_sweep / t_parallel_sweep,
              sweep_identical ? "identical" : "DIFFER");

  // --- wavepacket average --------------------------------------------------
  dirac::DiracParameters dp;
  dp.dimension = 1;
  dp.mc2_mhz = 5.0;
  dp.delta[0] = 0.025;
  dp.omega_tilde_mhz[0] = 2.0;
  dp.c_mhz[0] = 2.0 * dp.delta[0] * dp.omega_tilde_mhz[0];

  WavepacketSpec ws;
  ws.samples = momentum_samples;
  std::vector<double> momenta = dynamics::wavepacket_momenta(ws, 1.0, 0.2);

  std::vector<double> tg(4001);
  for (size_t i = 0; i < tg.size(); ++i) tg[i] = 10.0 * i / (tg.size() - 1);

  Vec psi0 = Vec::Zero(2);
  psi0(0) = 1.0;
  auto gens = dirac::dirac_generators(2);
  std::vector<Mat> vops{Mat(4.0 * kPi * dp.omega_tilde_mhz[0] * gens[0])};
  auto make = [&](double p) {
    Mat h = dirac::assemble_standard(dp, {p, 0.0, 0.0});
    return dynamics::zb_closed_form(h, psi0, vops, tg);
  };

  t0 = Clock::now();
  dynamics::Trajectory serial_tr =
      dynamics::wavepacket_average_serial(momenta, make);
  const double t_serial_wp = elapsed(t0);

  t0 = Clock::now();
  dynamics::Trajectory parallel_tr = dynamics::wavepacket_average(momenta, make);
  const double t_parallel_wp = elapsed(t0);

  bool wp_identical = serial_tr.r == parallel_tr.r;
  std::printf("wavepacket %d momenta x %zu steps: serial %.3f s, parallel "
              "%.3f s, speedup %.2fx, outputs %s\n",
              momentum_samples, tg.size() - 1, t_serial_wp, t_parallel_wp,
              t_serial_wp / t_parallel_wp,
              wp_identical ? "bit-identical" : "DIFFER");

  return (sweep_identical && wp_identical) ? 0 : 1;
}
