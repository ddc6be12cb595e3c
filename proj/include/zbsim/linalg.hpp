#pragma once

// Dense Hermitian eigensolve (LAPACK zheevd) plus a Lanczos solver for the
// lowest few eigenpairs of large sparse Hermitian matrices. The charge-basis
// Hamiltonians are banded with <= 7 entries per row, so Lanczos with full
// reorthogonalization gets the two lowest states to machine precision in a
// few hundred matvecs; the dense path stays available as the oracle.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace zbsim {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  Mat vectors;             // columns
};

struct LinalgError : std::runtime_error {
  explicit LinalgError(const std::string& what) : std::runtime_error(what) {}
};

// Full dense Hermitian eigendecomposition (ascending).
EigenSystem eigh(const Mat& h);

// Compressed sparse row Hermitian matrix.
struct SparseHam {
  int dim = 0;
  std::vector<int> row_ptr;
  std::vector<int> col;
  std::vector<cxd> val;

  static SparseHam from_triplets(int dim,
                                 std::vector<std::tuple<int, int, cxd>> trips);
  void matvec(const cxd* x, cxd* y) const;
  Mat to_dense() const;
  double inf_norm() const;
};

struct LanczosResult {
  Eigen::VectorXd values;
  Mat vectors;
  std::vector<double> residuals; // ||H v - lambda v|| per pair
  bool converged = false;
  int iterations = 0;
};

// k lowest eigenpairs. Deterministic start vector; full reorthogonalization.
LanczosResult lanczos_lowest(const SparseHam& h, int k, int max_iter = 600,
                             double tol = 1e-13);

// Lowest-k eigenpairs with the gauge used everywhere downstream: each
// vector's largest-magnitude component is rotated to be real positive
// (ties broken by lowest index). Falls back to the dense solver when
// Lanczos fails to converge.
EigenSystem solve_lowest(const SparseHam& h, int k);

void gauge_fix_largest_real(Vec& v);

} // namespace zbsim
