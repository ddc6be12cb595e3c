#pragma once

// Translation layer between the effective two-qubit/boson model produced by
// the rotating-frame engine and a standard-form Dirac Hamiltonian
//
//   H = mc^2 (sigma_z x I) + sum_k c_k p_k (sigma_x x sigma_k)
//       + cp0 (sigma_x x sigma_z)
//
// on the ordered basis {|1g>,|1e>} x {|2g>,|2e>} (qubit 1 major). In one
// spatial dimension the analogue is the 2x2 form H = mc^2 sigma_z + c p
// sigma_x. Units follow the rest of the library: energies as frequencies
// (MHz here, since effective couplings are MHz-scale), momenta dimensionless
// in oscillator quadrature units where [x, p] = i and positions are measured
// in zero-point widths.
//
// The module also provides the two unitary-free similarity transforms used
// on these Hamiltonians:
//  * diagonal_transform: the involutive reflection D(theta) that rotates a
//    mass block  Re(C) sigma_z + Im(C) sigma_y  into |C| sigma_z;
//  * lorentz_boost: the real hyperbolic transform that cancels the static
//    momentum-offset generator sigma_x x sigma_z against the mass term,
//    preserving the spectrum.

#include <array>
#include <stdexcept>
#include <string>

#include "zbsim/linalg.hpp"
#include "zbsim/rwa.hpp"

namespace zbsim::dirac {

struct DiracError : std::runtime_error {
  explicit DiracError(const std::string& what) : std::runtime_error(what) {}
};

// Mapped Dirac parameters, all energies in MHz.
struct DiracParameters {
  int dimension = 1;
  double mc2_mhz = 0.0;   // rest energy = |mass channel|
  double theta = 0.0;     // mass-plane angle, atan2(quadrature, in-phase)
  double cp0_mhz = 0.0;   // static momentum offset (dimension >= 2 only)
  double az = 0.0;        // boost rapidity cancelling cp0; NaN when the
                          // offset survives a vanishing mass (boost refused)
  cxd mass_channel_mhz{}; // raw complex mass-channel coefficient
  std::array<double, 3> omega_tilde_mhz{}; // sideband rate per axis
  std::array<double, 3> delta{};           // zero-point width per axis mode
  std::array<double, 3> c_mhz{};           // kinetic coefficient 2*delta*wt
};

// Pauli matrices (0 = identity, 1..3 = x, y, z).
Mat pauli(int k);

// Extract Dirac parameters from the engine output. Requires the mass and
// cp_<axis> channels for every axis of in.dimension, and cp_0 when
// dimension >= 2; throws DiracError when a channel is missing.
DiracParameters map_parameters(const rwa::EffectiveModel& model,
                               const rwa::EngineInput& in);

// 2x2 mass block Re(C) sigma_z + Im(C) sigma_y.
Mat mass_block(cxd mass_channel_mhz);

// Angle of the mass block in the (sigma_z, sigma_y) plane, principal value.
double mass_angle(cxd mass_channel_mhz);

// D(theta) = cos(theta/2) sigma_z + sin(theta/2) sigma_y: Hermitian,
// unitary, involutive reflection.
Mat d_matrix(double theta);

// D h D. For h = mass_block(C) and theta = mass_angle(C) the result is
// |C| sigma_z (the sigma_y quadrature is rotated away exactly).
Mat diagonal_transform(const Mat& h2, double theta);

// Rapidity az with sinh(2 az) = -cp0/mc2; zero when cp0 = 0. Throws
// DiracError when mc2 = 0 with cp0 != 0 (no finite boost exists).
double rapidity(double cp0_mhz, double mc2_mhz);

// Real 4x4 boost S(az) = cosh(az) I + sinh(az) (beta alpha_z). Note
// S(az) S(-az) = cosh(2 az) I: the inverse is S(-az)/cosh(2 az).
Mat boost_matrix(double az);

// Similarity transform S^{-1} h S of a 4x4 Hamiltonian. With az from
// rapidity(cp0, mc2) this removes the sigma_x x sigma_z generator from
// mc2 (sigma_z x I) + cp0 (sigma_x x sigma_z) and rescales the mass to
// sqrt(mc2^2 + cp0^2). Eigenvalues are exactly preserved; the result stays
// Hermitian because S is real with S^T proportional to S^{-1}.
Mat lorentz_boost(const Mat& h4, double az);

// Standard-form generators: {alpha_x, alpha_y, alpha_z, beta}. For
// matrix_dim = 4 these are sigma_x x sigma_k and sigma_z x I; for
// matrix_dim = 2 they are {sigma_x, 0, 0, sigma_z} (one kinetic axis).
std::array<Mat, 4> dirac_generators(int matrix_dim);

// Trace projections of a 2x2/4x4 Hamiltonian onto the generators. For the
// 4x4 form cp_mhz[2] carries the total sigma_x x sigma_z coefficient
// (kinetic z part plus static offset). residual_mhz is the Frobenius norm
// of whatever the generator span does not capture.
struct GeneratorDecomposition {
  double mc2_mhz = 0.0;
  std::array<double, 3> cp_mhz{};
  double identity_mhz = 0.0;
  double residual_mhz = 0.0;
};
GeneratorDecomposition decompose_standard(const Mat& h);

// Standard-form Hamiltonian at dimensionless momentum p (entries beyond
// params.dimension are ignored). 2x2 for dimension 1, 4x4 otherwise; the
// static offset cp0 enters from dimension 2 up.
Mat assemble_standard(const DiracParameters& params,
                      const std::array<double, 3>& p);

} // namespace zbsim::dirac
