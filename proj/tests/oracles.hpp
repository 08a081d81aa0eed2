#pragma once

// Independent reference implementations used only by tests.

#include "gshrink/core.hpp"

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <vector>

namespace gshrink::oracle {

// Lag-0 covariance of a stable VAR from the companion-form Lyapunov equation
// (I - F (x) F) vec(G) = vec(Q), Q = blockdiag(Sigma, 0, ...).
inline RMatrix lyapunov_covariance(const std::vector<RMatrix>& phi, const RMatrix& sigma) {
  const Eigen::Index p = sigma.rows();
  const Eigen::Index k = static_cast<Eigen::Index>(phi.size());
  const Eigen::Index d = p * k;
  RMatrix f = RMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < k; ++i) f.block(0, i * p, p, p) = phi[static_cast<std::size_t>(i)];
  if (k > 1) f.block(p, 0, d - p, d - p).setIdentity();
  RMatrix q = RMatrix::Zero(d, d);
  q.topLeftCorner(p, p) = sigma;
  const RMatrix lhs = RMatrix::Identity(d * d, d * d) - Eigen::kroneckerProduct(f, f).eval();
  const Eigen::VectorXd vq = Eigen::Map<const Eigen::VectorXd>(q.data(), d * d);
  const Eigen::VectorXd vg = lhs.fullPivLu().solve(vq);
  const RMatrix g = Eigen::Map<const RMatrix>(vg.data(), d, d);
  return g.topLeftCorner(p, p);
}

// Textbook single-trial OLS: rows y_t' = [x_{t-1}' ... x_{t-K}'] B, solved by
// Householder QR on the stacked design. Returns {Phi_1..Phi_K, Sigma} with
// divisor (T - K) - P K.
struct OlsFit {
  std::vector<RMatrix> phi;
  RMatrix sigma;
};

inline OlsFit single_trial_ols(const RMatrix& x, std::size_t order) {
  const Eigen::Index p = x.rows(), t_len = x.cols(), k = static_cast<Eigen::Index>(order);
  const Eigen::Index rows = t_len - k;
  RMatrix design(rows, p * k), y(rows, p);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Index t = r + k;
    y.row(r) = x.col(t).transpose();
    for (Eigen::Index lag = 1; lag <= k; ++lag) design.block(r, (lag - 1) * p, 1, p) = x.col(t - lag).transpose();
  }
  const RMatrix b = design.colPivHouseholderQr().solve(y);  // pK x P
  OlsFit fit;
  for (Eigen::Index lag = 0; lag < k; ++lag) fit.phi.push_back(b.block(lag * p, 0, p, p).transpose());
  const RMatrix e = y - design * b;
  fit.sigma = e.transpose() * e / double(rows - p * k);
  return fit;
}

// Inverse by the adjugate: cofactors from determinants of minors computed by
// Laplace expansion.
inline Complex laplace_det(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return a(0, 0);
  Complex det = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    CMatrix minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
      for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
        if (j != c) minor(i - 1, jj++) = a(i, j);
      }
    }
    det += ((c % 2) ? -1.0 : 1.0) * a(0, c) * laplace_det(minor);
  }
  return det;
}

inline CMatrix cofactor_inverse(const CMatrix& a) {
  const Eigen::Index n = a.rows();
  if (n == 1) return CMatrix::Constant(1, 1, 1.0 / a(0, 0));
  const Complex det = laplace_det(a);
  CMatrix inv(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      CMatrix minor(n - 1, n - 1);
      for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == r) continue;
        for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
          if (j != c) minor(ii, jj++) = a(i, j);
        }
        ++ii;
      }
      inv(c, r) = (((r + c) % 2) ? -1.0 : 1.0) * laplace_det(minor) / det;
    }
  }
  return inv;
}

// BH by definition, without sorting: the largest k whose threshold k q / m
// is met by at least k p-values; reject every p at or below that threshold.
inline std::vector<bool> brute_force_bh(const std::vector<double>& p, double q) {
  const std::size_t m = p.size();
  std::vector<bool> out(m, false);
  for (std::size_t k = m; k >= 1; --k) {
    const double threshold = double(k) * q / double(m);
    const auto count = static_cast<std::size_t>(std::count_if(p.begin(), p.end(), [&](double v) { return v <= threshold; }));
    if (count >= k) {
      for (std::size_t i = 0; i < m; ++i) out[i] = p[i] <= threshold;
      break;
    }
  }
  return out;
}

}  // namespace gshrink::oracle
