#pragma once

#include "gshrink/core.hpp"
#include "gshrink/timeseries.hpp"

#include <cstddef>
#include <vector>

namespace gshrink {

// X(t) = sum_k Phi_k X(t-k) + Z(t), Cov Z = sigma_z.
struct VarModel {
  std::vector<RMatrix> coefficients;  // Phi_1 .. Phi_K, each P x P
  RMatrix sigma_z;

  // Fit diagnostics (zero for hand-built models).
  double gram_condition = 0.0;
  bool ill_conditioned = false;  // condition number above the warning level

  std::size_t order() const { return coefficients.size(); }
  std::size_t channels() const { return static_cast<std::size_t>(sigma_z.rows()); }
};

// Gram matrices with condition number above `kGramWarnCondition` are
// flagged; above `kGramFailCondition` the fit fails.
inline constexpr double kGramWarnCondition = 1e10;
inline constexpr double kGramFailCondition = 1e14;

// Pooled least squares over all trials, conditioning on the first K samples
// of each trial (regression over t = K+1..T). sigma_z uses the divisor
// N(T-K) - PK. Trials are accumulated in a canonical content order, so the
// result does not depend on the order trials are supplied in.
VarModel fit_var_ls(const MultiTrialSeries& trials, std::size_t order);

// Residuals X_n(t) - sum_k Phi_k X_n(t-k) for t = K+1..T, as a P x (T-K)
// block per trial (input order).
std::vector<RMatrix> var_residuals(const MultiTrialSeries& trials, const VarModel& model);

struct OrderSelection {
  std::size_t order = 1;
  std::vector<double> criterion;  // IC(kappa) for kappa = 1..k_max
  VarModel model;                 // fit at the selected order
};

// BIC: IC(k) = log|Sigma_Z(k)| + log(NT)/(NT) * k * P^2 over k = 1..k_max;
// ties go to the smaller order.
OrderSelection bic_select_order(const MultiTrialSeries& trials, std::size_t k_max);

// V(w) = (2 pi)^-1 A(w)^-1 Sigma_Z A(w)^-*, A(w) = I - sum_k Phi_k e^{-i w k}.
SpectralEstimate var_spectrum(const VarModel& model, const FrequencyGrid& grid);

// Spectral radius of the VAR companion matrix; < 1 means stable.
double companion_spectral_radius(const std::vector<RMatrix>& coefficients);

// exp(-i * 2 pi * j * k / T) with exact values at multiples of pi / 2.
Complex fourier_phase(std::size_t j, std::size_t k, std::size_t samples);

}  // namespace gshrink
