#include "zbsim/linalg.hpp"

#include <algorithm>
#include <cmath>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace zbsim {

EigenSystem eigh(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n) throw LinalgError("eigh: matrix not square");
  EigenSystem out;
  out.vectors = h; // zheevd overwrites with eigenvectors (column-major, as Eigen)
  out.values.resize(n);
  int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                            reinterpret_cast<lapack_complex_double*>(out.vectors.data()),
                            n, out.values.data());
  if (info != 0)
    throw LinalgError("eigh: zheevd failed, info=" + std::to_string(info) +
                      ", dim=" + std::to_string(n));
  return out;
}

SparseHam SparseHam::from_triplets(int dim,
                                   std::vector<std::tuple<int, int, cxd>> trips) {
  std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    return std::get<1>(a) < std::get<1>(b);
  });
  SparseHam h;
  h.dim = dim;
  h.row_ptr.assign(dim + 1, 0);
  for (size_t i = 0; i < trips.size();) {
    size_t j = i + 1;
    cxd sum = std::get<2>(trips[i]);
    while (j < trips.size() && std::get<0>(trips[j]) == std::get<0>(trips[i]) &&
           std::get<1>(trips[j]) == std::get<1>(trips[i])) {
      sum += std::get<2>(trips[j]);
      ++j;
    }
    if (sum != cxd(0.0, 0.0)) {
      h.col.push_back(std::get<1>(trips[i]));
      h.val.push_back(sum);
      ++h.row_ptr[std::get<0>(trips[i]) + 1];
    }
    i = j;
  }
  for (int r = 0; r < dim; ++r) h.row_ptr[r + 1] += h.row_ptr[r];
  return h;
}

void SparseHam::matvec(const cxd* x, cxd* y) const {
  for (int r = 0; r < dim; ++r) {
    cxd acc(0.0, 0.0);
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) acc += val[k] * x[col[k]];
    y[r] = acc;
  }
}

Mat SparseHam::to_dense() const {
  Mat m = Mat::Zero(dim, dim);
  for (int r = 0; r < dim; ++r)
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) m(r, col[k]) += val[k];
  return m;
}

double SparseHam::inf_norm() const {
  double best = 0.0;
  for (int r = 0; r < dim; ++r) {
    double s = 0.0;
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) s += std::abs(val[k]);
    best = std::max(best, s);
  }
  return best;
}

LanczosResult lanczos_lowest(const SparseHam& h, int k, int max_iter, double tol) {
  const int n = h.dim;
  LanczosResult out;
  if (k <= 0 || k > n) throw LinalgError("lanczos: bad k");
  const int m_cap = std::min(n, max_iter);

  // Deterministic start: all-ones with a fixed incommensurate ripple so the
  // vector is not accidentally orthogonal to a parity sector.
  Vec v0(n);
  for (int i = 0; i < n; ++i) v0(i) = 1.0 + 0.37 * std::sin(0.7 * i + 0.3);
  v0.normalize();

  std::vector<Vec> basis;
  basis.reserve(m_cap);
  basis.push_back(v0);
  std::vector<double> a, b; // tridiagonal diag / offdiag
  Vec w(n);

  const double scale = h.inf_norm();
  const double res_tol = tol * std::max(scale, 1.0);

  auto ritz_check = [&](int m) -> bool {
    if (m < k + 2) return false;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = a[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = b[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    // residual bound |b_m * s_{m,j}| for the k lowest Ritz pairs
    for (int j = 0; j < k; ++j) {
      double bound = std::abs(b.back() * es.eigenvectors()(m - 1, j));
      if (bound > res_tol) return false;
    }
    return true;
  };

  int m = 0;
  for (; m < m_cap; ++m) {
    h.matvec(basis[m].data(), w.data());
    if (m > 0) w -= b[m - 1] * basis[m - 1];
    double alpha = std::real(basis[m].dot(w));
    a.push_back(alpha);
    w -= alpha * basis[m];
    // full reorthogonalization, two passes
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : basis) w -= q.dot(w) * q;
    double beta = w.norm();
    if (beta < res_tol) { ++m; break; } // invariant subspace found
    b.push_back(beta);
    if ((m + 1) % 16 == 0 && ritz_check(m + 1)) { ++m; break; }
    if (m + 1 < m_cap) basis.push_back(w / beta);
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = a[i];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = b[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const int kk = std::min(k, m);
  out.values.resize(kk);
  out.vectors.resize(n, kk);
  out.residuals.resize(kk);
  out.iterations = m;
  for (int j = 0; j < kk; ++j) {
    out.values(j) = es.eigenvalues()(j);
    Vec y = Vec::Zero(n);
    for (int i = 0; i < m && i < static_cast<int>(basis.size()); ++i)
      y += es.eigenvectors()(i, j) * basis[i];
    y.normalize();
    out.vectors.col(j) = y;
    h.matvec(y.data(), w.data());
    out.residuals[j] = (w - out.values(j) * y).norm();
  }
  out.converged = kk == k;
  for (int j = 0; j < kk; ++j)
    if (out.residuals[j] > 10.0 * res_tol) out.converged = false;
  return out;
}

void gauge_fix_largest_real(Vec& v) {
  int best = 0;
  double mag = std::abs(v(0));
  for (int i = 1; i < v.size(); ++i) {
    double m = std::abs(v(i));
    if (m > mag) { mag = m; best = i; }
  }
  if (mag == 0.0) return;
  cxd phase = std::conj(v(best)) / mag;
  v *= phase;
}

EigenSystem solve_lowest(const SparseHam& h, int k) {
  EigenSystem out;
  // Below ~700 rows the dense solver beats Lanczos outright.
  if (h.dim <= 700) {
    EigenSystem full = eigh(h.to_dense());
    out.values = full.values.head(k);
    out.vectors = full.vectors.leftCols(k);
    for (int j = 0; j < out.vectors.cols(); ++j) {
      Vec v = out.vectors.col(j);
      gauge_fix_largest_real(v);
      out.vectors.col(j) = v;
    }
    return out;
  }
  LanczosResult lr = lanczos_lowest(h, k);
  if (lr.converged) {
    out.values = lr.values;
    out.vectors = lr.vectors;
  } else {
    EigenSystem full = eigh(h.to_dense());
    out.values = full.values.head(k);
    out.vectors = full.vectors.leftCols(k);
  }
  for (int j = 0; j < out.vectors.cols(); ++j) {
    Vec v = out.vectors.col(j);
    gauge_fix_largest_real(v);
    out.vectors.col(j) = v;
  }
  return out;
}

} // namespace zbsim
