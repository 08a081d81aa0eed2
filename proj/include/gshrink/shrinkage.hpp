#pragma once

#include "gshrink/core.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/smoothing.hpp"
#include "gshrink/timeseries.hpp"
#include "gshrink/var.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gshrink {

// Risk-term estimates use a window of `window` Fourier frequencies centred on
// each grid frequency; offsets past 0 or pi wrap by conjugate symmetry.
inline constexpr int kDefaultWindow = 15;

// beta^2(w) = C^-1 sum_k || smoothed(w) - mean_pgram(w + w_k) ||^2
std::vector<double> estimate_beta2(const SpectralEstimate& smoothed, const SpectralEstimate& mean_pgram, int window);

// alpha^2(w) = C^-1 sum_k || parametric(w) - mean_pgram(w + w_k) ||^2
std::vector<double> estimate_alpha2(const SpectralEstimate& parametric, const SpectralEstimate& mean_pgram,
                                    int window);

// delta^2(w) = 1/2 C^-1 sum_k ( ||smoothed(w + w_k) - parametric(w)||^2
//                              + ||parametric(w + w_k) - smoothed(w)||^2 )
std::vector<double> estimate_delta2(const SpectralEstimate& smoothed, const SpectralEstimate& parametric,
                                    int window);

struct ShrinkageWeight {
  double raw = 0.0;
  double clamped = 0.0;
};

// W = (beta^2 - (alpha^2 + beta^2 - delta^2) / 2) / delta^2, truncated to
// [0, 1]. When delta^2 == 0 the two estimators agree over the window and the
// weight is defined as 0.
ShrinkageWeight shrinkage_weight(double alpha2, double beta2, double delta2);

struct ShrinkageDiagnostics {
  FrequencyGrid grid;
  std::vector<double> alpha2;
  std::vector<double> beta2;
  std::vector<double> delta2;
  std::vector<double> weight_raw;
  std::vector<double> weight;
  int window = kDefaultWindow;
};

ShrinkageDiagnostics shrinkage_diagnostics(const SpectralEstimate& parametric, const SpectralEstimate& smoothed,
                                           const SpectralEstimate& mean_pgram, int window);

// weights[j] * parametric(w_j) + (1 - weights[j]) * smoothed(w_j).
SpectralEstimate generalized_shrinkage(const SpectralEstimate& parametric, const SpectralEstimate& smoothed,
                                       const std::vector<double>& weights);

struct PipelineOptions {
  std::size_t k_max = 15;
  std::optional<std::size_t> fixed_order;  // skip BIC
  SmoothingConfig smoothing;
  int window = kDefaultWindow;
  std::optional<double> fixed_weight;  // bypass the estimated weight
};

struct PipelineResult {
  SpectralEstimate estimate;  // tag shrinkage
  ShrinkageDiagnostics diagnostics;
  VarModel var_model;
  std::vector<double> order_criterion;  // BIC values (empty with a fixed order)
  SpectralEstimate var_estimate;
  SmoothedResult smoothed;
  SpectralEstimate mean_periodogram;
  SmoothingConfig smoothing;  // resolved span grid
};

// periodogram -> {VAR via BIC + LS, PURE-smoothed periodogram} -> risk
// terms -> weight -> convex combination. Stage failures are rethrown with
// the stage name prefixed to the message.
PipelineResult full_pipeline(const MultiTrialSeries& trials, const PipelineOptions& options = {});
PipelineResult full_pipeline(const MultiTrialSeries& trials, const PeriodogramSet& periodograms,
                             const PipelineOptions& options);

}  // namespace gshrink
