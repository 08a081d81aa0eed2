#include "gshrink/var.hpp"

#include "gshrink/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace gshrink {
namespace {

std::vector<std::size_t> canonical_order(const MultiTrialSeries& trials) {
  std::vector<std::size_t> idx(trials.trials());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    const RMatrix& xa = trials.trial(a);
    const RMatrix& xb = trials.trial(b);
    return std::lexicographical_compare(xa.data(), xa.data() + xa.size(), xb.data(), xb.data() + xb.size());
  });
  return idx;
}

// Stacked regressors (PK x N(T-K)) and targets (P x N(T-K)).
void build_regression(const MultiTrialSeries& trials, std::size_t order, const std::vector<std::size_t>& idx,
                      RMatrix& regressors, RMatrix& targets) {
  const auto p = static_cast<Eigen::Index>(trials.channels());
  const auto k = static_cast<Eigen::Index>(order);
  const auto t_len = static_cast<Eigen::Index>(trials.samples());
  const Eigen::Index eff = t_len - k;
  const auto total = static_cast<Eigen::Index>(idx.size()) * eff;
  regressors.resize(p * k, total);
  targets.resize(p, total);
  Eigen::Index col = 0;
  for (std::size_t n : idx) {
    const RMatrix& x = trials.trial(n);
    for (Eigen::Index t = k; t < t_len; ++t, ++col) {
      targets.col(col) = x.col(t);
      for (Eigen::Index lag = 1; lag <= k; ++lag) {
        regressors.block(p * (lag - 1), col, p, 1) = x.col(t - lag);
      }
    }
  }
}

}  // namespace

VarModel fit_var_ls(const MultiTrialSeries& trials, std::size_t order) {
  if (order == 0) throw DomainError("VAR order must be positive");
  const std::size_t p = trials.channels();
  const std::size_t n = trials.trials();
  const std::size_t t_len = trials.samples();
  if (order >= t_len) {
    throw InsufficientDataError("VAR order " + std::to_string(order) + " needs more than " +
                                std::to_string(order) + " samples per trial");
  }
  const std::size_t eff = n * (t_len - order);
  const std::size_t params = p * order;
  if (eff <= params) {
    throw InsufficientDataError("VAR(" + std::to_string(order) + ") fit needs N(T-K) > PK, got " +
                                std::to_string(eff) + " <= " + std::to_string(params));
  }

  RMatrix regressors;
  RMatrix targets;
  build_regression(trials, order, canonical_order(trials), regressors, targets);

  const auto dim = static_cast<Eigen::Index>(params);
  RMatrix gram = RMatrix::Zero(dim, dim);
  gram.selfadjointView<Eigen::Lower>().rankUpdate(regressors);
  gram = gram.selfadjointView<Eigen::Lower>();
  const RMatrix cross = regressors * targets.transpose();  // PK x P

  Eigen::SelfAdjointEigenSolver<RMatrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  VarModel model;
  model.gram_condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(model.gram_condition <= kGramFailCondition)) {
    throw RankDeficiencyError("VAR(" + std::to_string(order) +
                              ") regressor Gram matrix is rank deficient (condition number " +
                              std::to_string(model.gram_condition) + "); check for constant or duplicated channels");
  }
  model.ill_conditioned = model.gram_condition > kGramWarnCondition;

  Eigen::LLT<RMatrix> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw RankDeficiencyError("VAR(" + std::to_string(order) + ") regressor Gram matrix is not positive definite");
  }
  const RMatrix b = llt.solve(cross).transpose();  // P x PK

  const auto pp = static_cast<Eigen::Index>(p);
  model.coefficients.reserve(order);
  for (std::size_t k = 0; k < order; ++k) {
    model.coefficients.push_back(b.block(0, static_cast<Eigen::Index>(k) * pp, pp, pp));
  }
  const RMatrix resid = targets - b * regressors;
  RMatrix sigma = RMatrix::Zero(pp, pp);
  sigma.selfadjointView<Eigen::Lower>().rankUpdate(resid);
  sigma = sigma.selfadjointView<Eigen::Lower>();
  model.sigma_z = sigma / static_cast<double>(eff - params);
  return model;
}

std::vector<RMatrix> var_residuals(const MultiTrialSeries& trials, const VarModel& model) {
  const auto k = static_cast<Eigen::Index>(model.order());
  const auto t_len = static_cast<Eigen::Index>(trials.samples());
  std::vector<RMatrix> out;
  out.reserve(trials.trials());
  for (const auto& x : trials.data()) {
    RMatrix r = x.rightCols(t_len - k);
    for (Eigen::Index lag = 1; lag <= k; ++lag) {
      r.noalias() -= model.coefficients[static_cast<std::size_t>(lag - 1)] * x.middleCols(k - lag, t_len - k);
    }
    out.push_back(std::move(r));
  }
  return out;
}

OrderSelection bic_select_order(const MultiTrialSeries& trials, std::size_t k_max) {
  if (k_max == 0) throw DomainError("k_max must be positive");
  const double nt = static_cast<double>(trials.trials() * trials.samples());
  const double p2 = static_cast<double>(trials.channels() * trials.channels());
  OrderSelection sel;
  double best = 0.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    VarModel model = fit_var_ls(trials, k);
    Eigen::LLT<RMatrix> llt(model.sigma_z);
    double logdet = 0.0;
    if (llt.info() == Eigen::Success) {
      logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    } else {
      logdet = -std::numeric_limits<double>::infinity();
    }
    const double ic = logdet + std::log(nt) / nt * static_cast<double>(k) * p2;
    sel.criterion.push_back(ic);
    if (k == 1 || ic < best) {
      best = ic;
      sel.order = k;
      sel.model = std::move(model);
    }
  }
  return sel;
}

Complex fourier_phase(std::size_t j, std::size_t k, std::size_t samples) {
  const std::size_t r = (j * k) % samples;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == samples) return {-1.0, 0.0};
  if (4 * r == samples) return {0.0, -1.0};
  if (4 * r == 3 * samples) return {0.0, 1.0};
  return std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(r) / static_cast<double>(samples));
}

SpectralEstimate var_spectrum(const VarModel& model, const FrequencyGrid& grid) {
  const auto p = model.sigma_z.rows();
  if (p == 0 || model.sigma_z.cols() != p) throw DimensionError("VAR innovation covariance must be square");
  for (const auto& phi : model.coefficients) {
    if (phi.rows() != p || phi.cols() != p) throw DimensionError("VAR coefficient shape mismatch");
  }
  const CMatrix sigma = model.sigma_z.cast<Complex>();
  const double scale = 1.0 / (2.0 * std::numbers::pi);
  SpectralEstimate out{grid, MatrixSequence(grid.size()), EstimatorTag::var};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CMatrix a = CMatrix::Identity(p, p);
    for (std::size_t k = 0; k < model.order(); ++k) {
      a -= model.coefficients[k].cast<Complex>() * fourier_phase(j, k + 1, grid.samples());
    }
    Eigen::PartialPivLU<CMatrix> lu(a);
    const double rcond = lu.rcond();
    if (!(rcond > 1e-12)) {
      throw ConditioningError("VAR transfer matrix is singular at frequency index " + std::to_string(j) +
                              " (omega = " + std::to_string(grid.omega(j)) + ", rcond = " + std::to_string(rcond) +
                              "); the model is at or near a unit root");
    }
    const CMatrix inv = lu.inverse();
    out.matrices[j] = hermitize(scale * inv * sigma * inv.adjoint());
  }
  return out;
}

double companion_spectral_radius(const std::vector<RMatrix>& coefficients) {
  if (coefficients.empty()) return 0.0;
  const auto p = coefficients.front().rows();
  const auto k = static_cast<Eigen::Index>(coefficients.size());
  RMatrix companion = RMatrix::Zero(p * k, p * k);
  for (Eigen::Index i = 0; i < k; ++i) companion.block(0, i * p, p, p) = coefficients[static_cast<std::size_t>(i)];
  if (k > 1) companion.block(p, 0, p * (k - 1), p * (k - 1)).setIdentity();
  Eigen::EigenSolver<RMatrix> eig(companion, false);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace gshrink
