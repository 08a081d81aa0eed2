#include "gshrink/shrinkage.hpp"

#include "gshrink/errors.hpp"

#include <algorithm>
#include <string>

namespace gshrink {
namespace {

void check_window(int window, const FrequencyGrid& grid) {
  if (window < 1 || window % 2 == 0) {
    throw DomainError("risk window C_T must be odd and positive, got " + std::to_string(window));
  }
  if (static_cast<std::size_t>(window) >= grid.samples()) {
    throw DomainError("risk window C_T = " + std::to_string(window) + " must be smaller than T = " +
                      std::to_string(grid.samples()));
  }
}

void check_pair(const SpectralEstimate& a, const SpectralEstimate& b, const char* what) {
  if (!(a.grid == b.grid)) throw DimensionError(std::string(what) + ": frequency grids differ");
  check_sequence(a.matrices, a.grid, what);
  check_sequence(b.matrices, b.grid, what);
  if (a.channels() != b.channels()) throw DimensionError(std::string(what) + ": channel counts differ");
}

// C^-1 sum_k ||centre(w) - other(w + w_k)||^2.
std::vector<double> windowed_distance(const SpectralEstimate& centre, const SpectralEstimate& other, int window) {
  const FrequencyGrid& grid = centre.grid;
  const long half = (window - 1) / 2;
  std::vector<double> out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    double acc = 0.0;
    for (long k = -half; k <= half; ++k) {
      const auto mir = grid.mirror(static_cast<long>(j) + k);
      acc += hs_distance_sq(centre[j], other[mir.index], mir.conjugate);
    }
    out[j] = acc / static_cast<double>(window);
  }
  return out;
}

template <class F>
auto run_stage(const char* stage, F&& fn) {
  return with_context(std::string("stage ") + stage, std::forward<F>(fn));
}

}  // namespace

std::vector<double> estimate_beta2(const SpectralEstimate& smoothed, const SpectralEstimate& mean_pgram, int window) {
  check_pair(smoothed, mean_pgram, "estimate_beta2");
  check_window(window, smoothed.grid);
  return windowed_distance(smoothed, mean_pgram, window);
}

std::vector<double> estimate_alpha2(const SpectralEstimate& parametric, const SpectralEstimate& mean_pgram,
                                    int window) {
  check_pair(parametric, mean_pgram, "estimate_alpha2");
  check_window(window, parametric.grid);
  return windowed_distance(parametric, mean_pgram, window);
}

std::vector<double> estimate_delta2(const SpectralEstimate& smoothed, const SpectralEstimate& parametric,
                                    int window) {
  check_pair(smoothed, parametric, "estimate_delta2");
  check_window(window, smoothed.grid);
  const auto a = windowed_distance(parametric, smoothed, window);
  const auto b = windowed_distance(smoothed, parametric, window);
  std::vector<double> out(a.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = 0.5 * (a[j] + b[j]);
  return out;
}

ShrinkageWeight shrinkage_weight(double alpha2, double beta2, double delta2) {
  if (delta2 == 0.0) return {0.0, 0.0};
  const double raw = (beta2 - 0.5 * (alpha2 + beta2 - delta2)) / delta2;
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

ShrinkageDiagnostics shrinkage_diagnostics(const SpectralEstimate& parametric, const SpectralEstimate& smoothed,
                                           const SpectralEstimate& mean_pgram, int window) {
  ShrinkageDiagnostics diag{parametric.grid, estimate_alpha2(parametric, mean_pgram, window),
                            estimate_beta2(smoothed, mean_pgram, window),
                            estimate_delta2(smoothed, parametric, window), {}, {}, window};
  const std::size_t size = diag.alpha2.size();
  diag.weight_raw.resize(size);
  diag.weight.resize(size);
  for (std::size_t j = 0; j < size; ++j) {
    const auto w = shrinkage_weight(diag.alpha2[j], diag.beta2[j], diag.delta2[j]);
    diag.weight_raw[j] = w.raw;
    diag.weight[j] = w.clamped;
  }
  return diag;
}

SpectralEstimate generalized_shrinkage(const SpectralEstimate& parametric, const SpectralEstimate& smoothed,
                                       const std::vector<double>& weights) {
  check_pair(parametric, smoothed, "generalized_shrinkage");
  if (weights.size() != parametric.size()) {
    throw DimensionError("generalized_shrinkage: expected " + std::to_string(parametric.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  SpectralEstimate out{parametric.grid, MatrixSequence(parametric.size()), EstimatorTag::shrinkage};
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double w = weights[j];
    if (!(w >= 0.0 && w <= 1.0)) {
      throw DomainError("shrinkage weight at frequency index " + std::to_string(j) + " is outside [0, 1]");
    }
    out.matrices[j] = w * parametric[j] + (1.0 - w) * smoothed[j];
  }
  return out;
}

PipelineResult full_pipeline(const MultiTrialSeries& trials, const PipelineOptions& options) {
  const PeriodogramSet periodograms = run_stage("periodogram", [&] { return compute_periodograms(trials); });
  return full_pipeline(trials, periodograms, options);
}

PipelineResult full_pipeline(const MultiTrialSeries& trials, const PeriodogramSet& periodograms,
                             const PipelineOptions& options) {
  if (trials.trials() < 2) {
    throw InsufficientDataError("stage pipeline: the shrinkage estimator needs at least two trials, got " +
                                std::to_string(trials.trials()));
  }
  const FrequencyGrid grid = periodograms.grid;
  PipelineResult result{SpectralEstimate{grid, {}, EstimatorTag::shrinkage},
                        ShrinkageDiagnostics{grid, {}, {}, {}, {}, {}, options.window},
                        {},
                        {},
                        SpectralEstimate{grid, {}, EstimatorTag::var},
                        SmoothedResult{SpectralEstimate{grid, {}, EstimatorTag::smoothed}, {}},
                        periodograms.mean,
                        options.smoothing};

  run_stage("var", [&] {
    if (options.fixed_order) {
      result.var_model = fit_var_ls(trials, *options.fixed_order);
    } else {
      auto sel = bic_select_order(trials, options.k_max);
      result.order_criterion = std::move(sel.criterion);
      result.var_model = std::move(sel.model);
    }
    result.var_estimate = var_spectrum(result.var_model, grid);
    return 0;
  });

  if (result.smoothing.span_grid.empty()) result.smoothing.span_grid = default_span_grid(grid.samples());
  result.smoothed = run_stage("smoothing", [&] { return smoothed_estimator(periodograms, result.smoothing); });

  result.diagnostics = run_stage("risk", [&] {
    return shrinkage_diagnostics(result.var_estimate, result.smoothed.estimate, result.mean_periodogram,
                                 options.window);
  });

  std::vector<double> weights = result.diagnostics.weight;
  if (options.fixed_weight) {
    const double w = *options.fixed_weight;
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError("stage combine: fixed weight must lie in [0, 1]");
    std::fill(weights.begin(), weights.end(), w);
  }
  result.estimate = run_stage("combine", [&] {
    return generalized_shrinkage(result.var_estimate, result.smoothed.estimate, weights);
  });
  return result;
}

}  // namespace gshrink
