#pragma once

// Trembling-motion (zitterbewegung) trajectory tools for small dense Dirac
// Hamiltonians.
//
// Conventions: H in MHz, time in microseconds, U(t) = exp(-2*pi*i*H*t), so a
// level pair at +/-E beats at frequency 2E MHz. Positions are measured in
// zero-point widths of the axis mode; a velocity operator is the full
// Heisenberg derivative of the position observable, e.g. 4*pi*omega_tilde *
// alpha_axis for the standard kinetic term (units: widths per microsecond).
//
// Two independent evaluations are provided and kept deliberately separate:
//  * zb_closed_form: the exact spectral expression, splitting the velocity
//    operator into a secular (energy-diagonal) drift plus oscillating
//    off-diagonal beats integrated in closed form;
//  * zb_oracle: direct numerical integration of the velocity expectation
//    over a fine time grid (composite Simpson, 4th order), with a
//    step-halving (Richardson) disagreement estimate and a norm check.

#include <functional>
#include <stdexcept>
#include <vector>

#include "zbsim/config.hpp"
#include "zbsim/linalg.hpp"

namespace zbsim::dynamics {

struct DynamicsError : std::runtime_error {
  explicit DynamicsError(const std::string& what) : std::runtime_error(what) {}
};

struct Trajectory {
  std::vector<double> t_us;
  std::vector<std::array<double, 3>> r; // per-axis position, width units
  int axes = 1;
  double max_imag = 0.0;       // closed form: largest imaginary residue seen
  double richardson = 0.0;     // oracle: step-halving disagreement at t_max
  bool step_warning = false;   // oracle: richardson > 1e-8
  double norm_drift = 0.0;     // oracle: max deviation of ||psi(t)|| from 1
};

// Exact spectral evaluation of x_k(t) = integral of <psi|V_k(t')|psi> dt'
// with r(0) = 0. Throws DynamicsError when H is singular (smallest |E| <
// 1e-12 * largest |E|, or H = 0): the drift/beat split divides by level
// energies there. Velocity operators must be Hermitian.
Trajectory zb_closed_form(const Mat& h_mhz, const Vec& psi0,
                          const std::vector<Mat>& velocity_ops,
                          const std::vector<double>& t_us);

// Velocity-integration oracle on a uniform output grid of nt+1 points over
// [0, t_max]. steps_per_period fine steps per fastest beat period (>= 4;
// spectral propagation is exact, the error is purely quadrature).
Trajectory zb_oracle(const Mat& h_mhz, const Vec& psi0,
                     const std::vector<Mat>& velocity_ops, double t_max_us,
                     int nt, int steps_per_period = 64);

// Inverse error function (Newton refinement of a series seed; |y| < 1).
double erfinv(double y);

// Deterministic momentum samples for a wavepacket: equally weighted Gaussian
// quantiles p_j = mean + width*sqrt(2)*erfinv(2(j-1/2)/N - 1), j = 1..N, or
// the single point {mean} for kind "point" / zero width.
std::vector<double> wavepacket_momenta(const WavepacketSpec& spec,
                                       double mean, double width);

// Equal-weight average of per-momentum trajectories on a shared time grid.
// The parallel version runs make(p) across OpenMP threads but always reduces
// in momentum order, so its output is bit-identical to the serial version.
Trajectory wavepacket_average(const std::vector<double>& momenta,
                              const std::function<Trajectory(double)>& make);
Trajectory wavepacket_average_serial(
    const std::vector<double>& momenta,
    const std::function<Trajectory(double)>& make);

struct TremorAnalysis {
  double drift_velocity = 0.0; // width units per microsecond
  double frequency_mhz = 0.0;  // refined beat frequency
  double amplitude = 0.0;      // peak detrended excursion, width units
  int crossings = 0;           // zero crossings of the detrended signal
};

// Least-squares line removal, zero-crossing frequency estimate refined by a
// single-tone projection, and envelope amplitude. Throws DynamicsError when
// the trace covers fewer than five beat periods (10 crossings).
TremorAnalysis analyze_tremor(const Trajectory& tr, int axis);

} // namespace zbsim::dynamics
