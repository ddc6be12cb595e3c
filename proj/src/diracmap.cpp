#include "zbsim/diracmap.hpp"

#include <cmath>
#include <limits>

#include "zbsim/constants.hpp"

namespace zbsim::dirac {

namespace {

constexpr cxd kI{0.0, 1.0};

Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

const rwa::Channel* find_channel(const rwa::EffectiveModel& model,
                                 const std::string& name) {
  for (const auto& ch : model.channels)
    if (ch.name == name) return &ch;
  return nullptr;
}

} // namespace

Mat pauli(int k) {
  Mat m = Mat::Zero(2, 2);
  switch (k) {
    case 0: m(0, 0) = 1.0; m(1, 1) = 1.0; break;
    case 1: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
    case 2: m(0, 1) = -kI; m(1, 0) = kI; break;
    case 3: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    default: throw DiracError("pauli index out of range");
  }
  return m;
}

Mat mass_block(cxd c) {
  return c.real() * pauli(3) + c.imag() * pauli(2);
}

double mass_angle(cxd c) { return std::atan2(c.imag(), c.real()); }

Mat d_matrix(double theta) {
  return std::cos(0.5 * theta) * pauli(3) + std::sin(0.5 * theta) * pauli(2);
}

Mat diagonal_transform(const Mat& h2, double theta) {
  if (h2.rows() != 2 || h2.cols() != 2)
    throw DiracError("diagonal_transform expects a 2x2 block");
  const Mat d = d_matrix(theta);
  return d * h2 * d; // D is involutive: D^{-1} = D
}

double rapidity(double cp0_mhz, double mc2_mhz) {
  if (cp0_mhz == 0.0) return 0.0;
  if (mc2_mhz == 0.0)
    throw DiracError(
        "rapidity undefined: momentum offset with zero rest energy");
  const double r = cp0_mhz / mc2_mhz;
  return 0.5 * std::atanh(-r / std::sqrt(1.0 + r * r));
}

Mat boost_matrix(double az) {
  if (!std::isfinite(az)) throw DiracError("non-finite rapidity");
  // beta * alpha_z = (sigma_z sigma_x) x sigma_z = (i sigma_y) x sigma_z,
  // a real antisymmetric square root of -I.
  const Mat n = kron(kI * pauli(2), pauli(3));
  return std::cosh(az) * Mat::Identity(4, 4) + std::sinh(az) * n;
}

Mat lorentz_boost(const Mat& h4, double az) {
  if (h4.rows() != 4 || h4.cols() != 4)
    throw DiracError("lorentz_boost expects a 4x4 Hamiltonian");
  const Mat s = boost_matrix(az);
  // (cosh + sinh N)(cosh - sinh N) = cosh^2 - sinh^2 N^2 = cosh(2 az) I.
  const Mat s_inv = boost_matrix(-az) / std::cosh(2.0 * az);
  return s_inv * h4 * s;
}

std::array<Mat, 4> dirac_generators(int matrix_dim) {
  if (matrix_dim == 2) {
    return {pauli(1), Mat::Zero(2, 2), Mat::Zero(2, 2), pauli(3)};
  }
  if (matrix_dim == 4) {
    return {kron(pauli(1), pauli(1)), kron(pauli(1), pauli(2)),
            kron(pauli(1), pauli(3)), kron(pauli(3), pauli(0))};
  }
  throw DiracError("dirac_generators: matrix dimension must be 2 or 4");
}

GeneratorDecomposition decompose_standard(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  if ((n != 2 && n != 4) || h.cols() != n)
    throw DiracError("decompose_standard expects a 2x2 or 4x4 matrix");
  const auto gen = dirac_generators(n);
  GeneratorDecomposition out;
  Mat rest = h;
  auto project = [&](const Mat& g) {
    if (g.squaredNorm() == 0.0) return 0.0;
    const double coef = ((g.adjoint() * h).trace() / double(n)).real();
    rest -= coef * g;
    return coef;
  };
  for (int k = 0; k < 3; ++k) out.cp_mhz[k] = project(gen[k]);
  out.mc2_mhz = project(gen[3]);
  out.identity_mhz = (h.trace() / double(n)).real();
  rest -= out.identity_mhz * Mat::Identity(n, n);
  out.residual_mhz = rest.norm();
  return out;
}

Mat assemble_standard(const DiracParameters& p,
                      const std::array<double, 3>& mom) {
  if (p.dimension == 1) {
    return p.mc2_mhz * pauli(3) + p.c_mhz[0] * mom[0] * pauli(1);
  }
  const auto gen = dirac_generators(4);
  Mat h = p.mc2_mhz * gen[3];
  for (int k = 0; k < p.dimension && k < 3; ++k)
    h += p.c_mhz[k] * mom[k] * gen[k];
  h += p.cp0_mhz * gen[2];
  return h;
}

DiracParameters map_parameters(const rwa::EffectiveModel& model,
                               const rwa::EngineInput& in) {
  DiracParameters out;
  out.dimension = in.dimension;

  const rwa::Channel* mass = find_channel(model, "mass");
  if (!mass) throw DiracError("missing mass channel");
  out.mass_channel_mhz = mass->channel_mhz;
  out.mc2_mhz = std::abs(mass->channel_mhz);
  out.theta = mass_angle(mass->channel_mhz);

  static const char* kAxis[3] = {"cp_x", "cp_y", "cp_z"};
  for (int k = 0; k < in.dimension; ++k) {
    const rwa::Channel* ch = find_channel(model, kAxis[k]);
    if (!ch)
      throw DiracError(std::string("missing axis coupling channel ") +
                       kAxis[k]);
    out.omega_tilde_mhz[k] = std::abs(ch->channel_mhz);
    out.delta[k] = in.lambda[k];
    out.c_mhz[k] = 2.0 * out.delta[k] * out.omega_tilde_mhz[k];
  }

  if (in.dimension >= 2) {
    const rwa::Channel* cp0 = find_channel(model, "cp_0");
    if (!cp0) throw DiracError("missing momentum-offset channel cp_0");
    out.cp0_mhz = cp0->channel_mhz.real();
    if (out.mc2_mhz == 0.0 && out.cp0_mhz != 0.0) {
      out.az = std::numeric_limits<double>::quiet_NaN();
    } else {
      out.az = rapidity(out.cp0_mhz, out.mc2_mhz);
    }
  }
  return out;
}

} // namespace zbsim::dirac
