#include "zbsim/phasequbit.hpp"

#include <cmath>
#include <stdexcept>

#include "zbsim/constants.hpp"

namespace zbsim {

PhaseMode quantize_mode(double ej_ghz, double ec_ghz, double bias_ratio,
                        double er_ghz, ModeRole role) {
  if (std::abs(bias_ratio) >= 1.0)
    throw ConfigError("bias_ratio at or beyond critical current");
  PhaseMode m;
  m.role = role;
  m.phi0 = std::asin(bias_ratio);
  m.er_ghz = er_ghz;
  const double stiff = ej_ghz * std::cos(m.phi0) + er_ghz;
  if (stiff <= 0.0)
    throw ConfigError("junction mode has non-positive stiffness");
  m.omega_ghz = std::sqrt(8.0 * ec_ghz * stiff);
  m.lambda = std::pow(2.0 * ec_ghz / stiff, 0.25);
  return m;
}

PhaseMode quantize(const PhaseQubitParams& p) {
  return quantize_mode(p.ejp_ghz, p.ecp_ghz, p.bias_ratio, p.erp_ghz(),
                       ModeRole::dynamical);
}

PhaseMode quantize(const SharedJunctionParams& p, ModeRole role,
                   double el_ghz) {
  return quantize_mode(p.ej_ghz, p.ec_ghz, p.bias_ratio, el_ghz, role);
}

Eigen::VectorXd phase_mode_levels(double ej_ghz, double ec_ghz,
                                  double bias_ratio, double er_ghz,
                                  int basis_dim, int k) {
  if (basis_dim < 30) throw std::invalid_argument("basis_dim below 30");
  PhaseMode m = quantize_mode(ej_ghz, ec_ghz, bias_ratio, er_ghz,
                              ModeRole::dynamical);
  const int n = basis_dim;
  const double lam = m.lambda;

  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n); // a + a^dag
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n); // a^dag - a
  for (int i = 1; i < n; ++i) {
    const double s = std::sqrt(double(i));
    q(i - 1, i) = s;
    q(i, i - 1) = s;
    d(i, i - 1) = s;
    d(i - 1, i) = -s;
  }
  // 4 E_C N^2 with N = i (a^dag - a)/(2 lambda)
  Eigen::MatrixXd kin = -(ec_ghz / (lam * lam)) * (d * d);

  // Potential is a pure function of phi = phi0 + lambda (a + a^dag):
  // evaluate through the spectral decomposition of q.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> qes(q);
  Eigen::VectorXd pot_diag(n);
  for (int i = 0; i < n; ++i) {
    const double phi = m.phi0 + lam * qes.eigenvalues()(i);
    pot_diag(i) = -ej_ghz * (std::cos(phi) + bias_ratio * phi) +
                  0.5 * er_ghz * (phi - m.phi0) * (phi - m.phi0);
  }
  Eigen::MatrixXd h = kin + qes.eigenvectors() * pot_diag.asDiagonal() *
                                qes.eigenvectors().transpose();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> hes(h);
  // Basis-exhaustion check: the low states must not lean on the top of the
  // oscillator ladder.
  const int tail = std::min(5, n / 8);
  for (int j = 0; j < std::min(k, 3); ++j) {
    double w = hes.eigenvectors().col(j).tail(tail).squaredNorm();
    if (w > 1e-14)
      throw std::runtime_error(
          "phase-mode oracle did not converge; increase basis_dim");
  }
  return hes.eigenvalues().head(k);
}

PhaseOracleResult oracle_diagonalize(double ej_ghz, double ec_ghz,
                                     double bias_ratio, double er_ghz,
                                     int basis_dim) {
  Eigen::VectorXd e =
      phase_mode_levels(ej_ghz, ec_ghz, bias_ratio, er_ghz, basis_dim, 3);
  PhaseOracleResult r;
  r.omega_ghz = e(1) - e(0);
  r.anharmonicity_ghz = (e(2) - e(1)) - (e(1) - e(0));
  return r;
}

} // namespace zbsim
