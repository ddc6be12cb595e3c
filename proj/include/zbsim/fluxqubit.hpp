#pragma once

// Static flux-qubit Hamiltonian in the two-mode charge basis
//
//   H_q0 = 2 E_Ca N_a^2 + 2 E_Cs N_s^2 - 2 E_J cos(phi_s) cos(phi_a)
//          - 2 alpha E_J cos(pi f2) cos(2 phi_s + 2 pi f3)
//
// with E_Ca = E_C, E_Cs = E_C/(1+4 beta) and f3 = f1 + f2/2. States are
// |N_a, N_s> with |N| <= n_max; e^{i phi} raises the paired number operator
// by one, so the trigonometric potentials are banded shift operators:
//   cos(phi_s)cos(phi_a)        -> four (N_a +-1, N_s +-1) shifts, -E_J/2 each
//   cos(2 phi_s + 2 pi f3)      -> N_s +-2 shifts with phase e^{+-2 pi i f3}
//   sin/cos(2 phi_a + 2 pi f3)  -> N_a +-2 shifts (drive-coupling elements)
// An optional -L_r I0^2/2 self-inductance correction can be folded in.
//
// phi_a and phi_s are half-difference/half-sum of the two junction phases,
// so integer island charges correspond to the sublattice where N_a and N_s
// share parity. Every Hamiltonian term shifts N_a + N_s by an even amount,
// hence the two parity sectors decouple exactly; the complementary
// sublattice is an artifact of the product grid and its near-degenerate
// shadow states carry no matrix elements to the physical ones. Eigenstate
// selection therefore restricts to the same-parity sector.

#include <array>

#include "zbsim/config.hpp"
#include "zbsim/linalg.hpp"

namespace zbsim {

struct ChargeBasisGrid {
  int n_max_a = 20;
  int n_max_s = 20;

  int dim_a() const { return 2 * n_max_a + 1; }
  int dim_s() const { return 2 * n_max_s + 1; }
  int dim() const { return dim_a() * dim_s(); }
  int idx(int na, int ns) const {
    return (na + n_max_a) * dim_s() + (ns + n_max_s);
  }
  // Integer island charges live where N_a and N_s share parity.
  static bool same_charge_parity(int na, int ns) {
    return ((na + ns) & 1) == 0;
  }
};

struct FluxQubitSolution {
  FluxQubitParams params;
  ChargeBasisGrid grid;
  Eigen::VectorXd evals; // lowest four, GHz
  Vec ground, excited;
  double gap = 0.0;

  // Pauli decomposition elements in the {|g>,|e>} eigenpair, indexed 0..3:
  // 0 = H_q0 itself, 1 = sin(2 phi_a + 2 pi f3), 2 = cos(2 phi_a + 2 pi f3),
  // 3 = N_a. z_i are the diagonal halves, x_i the off-diagonal elements.
  std::array<double, 4> z{};
  std::array<double, 4> x{};

  double theta = 0.0; // arccos(z0/sqrt(z0^2+x0^2))
  std::array<double, 4> zr{}, xr{};
  double mu = 0.0, nu = 0.0;
  std::array<double, 4> zc{}, xc{}; // coupling magnitudes Z_i, X_i (GHz; i=0 unscaled)
  double splitting_ghz = 0.0;       // X_0^(1) or Z_0^(2) = gap/2

  double i_gg_na = 0.0, i_ee_na = 0.0; // circulating current expectations
  double i_ge_na = 0.0;                // |<g| I |e>| transition element
};

SparseHam build_h_q0(const FluxQubitParams& p, const ChargeBasisGrid& grid,
                     bool lr_correction = false);

// k lowest eigenpairs with the deterministic gauge (wrapper over linalg).
EigenSystem solve_spectrum(const SparseHam& h, int k);

// k lowest eigenpairs of the same-parity charge sector, embedded back into
// the full grid. h must be built on grid.
EigenSystem solve_physical_spectrum(const SparseHam& h,
                                    const ChargeBasisGrid& grid, int k);

// Full pipeline: diagonalize, matrix elements, rotated couplings, currents.
FluxQubitSolution solve_flux_qubit(const FluxQubitParams& p,
                                   const ChargeBasisGrid& grid,
                                   bool lr_correction = false,
                                   bool current_lr_term = false);

// Charge-basis operators used by the solution assembly (exposed for tests).
SparseHam op_sin_2phi_a(const FluxQubitParams& p, const ChargeBasisGrid& grid);
SparseHam op_cos_2phi_a(const FluxQubitParams& p, const ChargeBasisGrid& grid);
SparseHam op_n_a(const ChargeBasisGrid& grid);
// Circulating current operator in nA; optionally with the Lambda*sin(phi1)cos(phi1) term.
SparseHam op_current_na(const FluxQubitParams& p, const ChargeBasisGrid& grid,
                        bool lr_term = false);

} // namespace zbsim
