#include "zbsim/decoherence.hpp"

#include <cmath>
#include <limits>

#include "zbsim/constants.hpp"

namespace zbsim::decoherence {

namespace {
constexpr double kPlanck = constants::planck;
constexpr double kElectronCharge = constants::electron_charge;
} // namespace

double relaxation_rate_mhz(const RelaxationInput& in) {
  if (in.omega10_ghz < 0.0)
    throw DecoherenceError("negative transition frequency");
  const double four_pi2 = 4.0 * kPi * kPi;
  // Inductive channel: (M I)^2 in (pH nA)^2 = 1e-42 (Wb)^2; times 2*pi*nu
  // (1e9/s) over hbar^2/hbar = h/(2 pi)... collected into SI and then MHz:
  //   rate[MHz] = (2 pi)^2 nu[GHz] (M[pH] I[nA])^2 ReY[S] * 1e-39 / h[J s].
  const double flux = four_pi2 * in.omega10_ghz *
                      std::pow(in.env.m_ph * in.i01_na, 2) *
                      (1.0 / in.env.r_ohm) * (1e-39 / kPlanck);
  // Capacitive channel: charge 2e n01 in coulomb; same collection gives
  //   rate[MHz] = (2 pi)^2 nu[GHz] ((Cg/C) 2e n01)^2 ReZ[ohm] * 1e3 / h.
  const double q = 2.0 * kElectronCharge * in.env.cg_ratio * in.n01;
  const double charge =
      four_pi2 * in.omega10_ghz * q * q * in.env.r_ohm * (1e3 / kPlanck);
  return flux + charge;
}

double dephasing_rate_mhz(
    const std::vector<std::pair<double, double>>& channels,
    double omega_t_ghz, double omega_c_ghz) {
  if (!(omega_t_ghz > omega_c_ghz) || omega_c_ghz <= 0.0)
    throw DecoherenceError(
        "dephasing log window requires omega_t > omega_c > 0");
  const double lg = std::log(omega_t_ghz / omega_c_ghz);
  double rate_ghz = 0.0;
  for (const auto& [a, alpha] : channels) {
    if (alpha < 0.0) throw DecoherenceError("negative 1/f amplitude");
    rate_ghz += std::abs(a) * std::sqrt(alpha * lg);
  }
  return rate_ghz * 1e3;
}

FeasibilityReport feasibility(
    const RelaxationInput& relax, double sensitivity_ghz_per_flux,
    const std::vector<std::pair<std::string, double>>& omega_tilde_by_axis) {
  FeasibilityReport out;
  out.gamma1_mhz = relaxation_rate_mhz(relax);
  out.gamma_phi_mhz = dephasing_rate_mhz(
      {{sensitivity_ghz_per_flux, relax.env.alpha_flux}},
      relax.env.omega_t_ghz, relax.env.omega_c_ghz);
  out.gamma2_mhz = 0.5 * out.gamma1_mhz + out.gamma_phi_mhz;
  out.t1_us = out.gamma1_mhz > 0.0 ? 1.0 / out.gamma1_mhz
                                   : std::numeric_limits<double>::infinity();
  out.t2_us = out.gamma2_mhz > 0.0 ? 1.0 / out.gamma2_mhz
                                   : std::numeric_limits<double>::infinity();
  out.sensitivity_ghz_per_flux = sensitivity_ghz_per_flux;
  out.t2_above_1us = out.t2_us > 1.0;
  out.claim_satisfied = !omega_tilde_by_axis.empty();
  for (const auto& [axis, wt] : omega_tilde_by_axis) {
    AxisFeasibility af;
    af.axis = axis;
    af.omega_tilde_mhz = wt;
    af.transition_time_us =
        wt > 0.0 ? 1.0 / (4.0 * wt) : std::numeric_limits<double>::infinity();
    af.ratio_t2 = out.t2_us / af.transition_time_us;
    out.claim_satisfied = out.claim_satisfied && af.ratio_t2 > 3.0;
    out.axes.push_back(af);
  }
  return out;
}

} // namespace zbsim::decoherence
