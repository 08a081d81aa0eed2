#include "gshrink/smoothing.hpp"

#include "gshrink/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gshrink {

std::vector<int> default_span_grid(std::size_t samples) {
  int upper = static_cast<int>(samples / 4);
  if (upper % 2 == 0) upper -= 1;
  upper = std::min(upper, 63);
  std::vector<int> grid;
  for (int h = 3; h <= upper; h += 2) grid.push_back(h);
  if (grid.empty()) grid.push_back(1);
  return grid;
}

std::vector<double> hann_weights(int span) {
  if (span < 1 || span % 2 == 0) {
    throw DomainError("Hann span must be odd and positive, got " + std::to_string(span));
  }
  const int half = (span - 1) / 2;
  std::vector<double> w(static_cast<std::size_t>(span));
  double total = 0.0;
  for (int m = -half; m <= half; ++m) {
    const double c = std::cos(std::numbers::pi * m / (span + 1));
    w[static_cast<std::size_t>(m + half)] = c * c;
    total += c * c;
  }
  for (auto& v : w) v /= total;
  // Exact symmetry regardless of rounding in cos.
  for (int m = 1; m <= half; ++m) w[static_cast<std::size_t>(half - m)] = w[static_cast<std::size_t>(half + m)];
  return w;
}

MatrixSequence smooth_periodogram(const MatrixSequence& per_freq, int span, const FrequencyGrid& grid) {
  check_sequence(per_freq, grid, "smooth_periodogram");
  if (span < 1 || span % 2 == 0) {
    throw DomainError("smoothing span must be odd and positive, got " + std::to_string(span));
  }
  if (static_cast<std::size_t>(span) >= grid.samples()) {
    throw DomainError("smoothing span " + std::to_string(span) + " too large for T = " +
                      std::to_string(grid.samples()));
  }
  if (span == 1) return per_freq;

  const auto weights = hann_weights(span);
  const long half = (span - 1) / 2;
  const Eigen::Index p = per_freq.front().rows();
  MatrixSequence out(grid.size(), CMatrix::Zero(p, p));
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CMatrix& acc = out[j];
    for (long m = -half; m <= half; ++m) {
      const double w = weights[static_cast<std::size_t>(m + half)];
      const auto mir = grid.mirror(static_cast<long>(j) + m);
      if (mir.conjugate) {
        acc.noalias() += w * per_freq[mir.index].conjugate();
      } else {
        acc.noalias() += w * per_freq[mir.index];
      }
    }
  }
  return out;
}

MatrixSequence loo_pilot(const PeriodogramSet& periodograms, std::size_t n) {
  const std::size_t count = periodograms.trials();
  if (count < 2) throw InsufficientDataError("leave-one-out pilot needs at least two trials");
  if (n >= count) throw DimensionError("trial index out of range");
  // Summed directly rather than via the mean so the result is exact for
  // identical trials.
  MatrixSequence out(periodograms.grid.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    CMatrix acc = CMatrix::Zero(periodograms.per_trial[0][j].rows(), periodograms.per_trial[0][j].cols());
    for (std::size_t i = 0; i < count; ++i) {
      if (i != n) acc += periodograms.per_trial[i][j];
    }
    out[j] = acc / static_cast<double>(count - 1);
  }
  return out;
}

double integrated_distance(const MatrixSequence& pilot, const MatrixSequence& candidate,
                           const FrequencyGrid& grid) {
  check_sequence(pilot, grid, "integrated_distance");
  check_sequence(candidate, grid, "integrated_distance");
  double acc = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) acc += hs_distance_sq(pilot[j], candidate[j]);
  return acc * 2.0 * std::numbers::pi / static_cast<double>(grid.samples());
}

SpanSelection pure_select_span(const PeriodogramSet& periodograms, std::size_t n,
                               const std::vector<int>& span_grid) {
  if (span_grid.empty()) throw DomainError("PURE span grid is empty");
  if (n >= periodograms.trials()) throw DimensionError("trial index out of range");
  SpanSelection sel;
  sel.risks.reserve(span_grid.size());
  if (span_grid.size() == 1) {
    // Forced choice; still validate the span.
    hann_weights(span_grid.front());
    sel.span = span_grid.front();
    sel.risks.push_back(0.0);
    return sel;
  }
  const MatrixSequence pilot = loo_pilot(periodograms, n);
  const auto& trial = periodograms.per_trial[n];
  double best = 0.0;
  for (std::size_t i = 0; i < span_grid.size(); ++i) {
    const double risk = integrated_distance(pilot, smooth_periodogram(trial, span_grid[i], periodograms.grid),
                                            periodograms.grid);
    sel.risks.push_back(risk);
    if (i == 0 || risk < best || (risk == best && span_grid[i] < sel.span)) {
      best = risk;
      sel.span = span_grid[i];
    }
  }
  return sel;
}

SmoothedResult smoothed_estimator(const PeriodogramSet& periodograms, const SmoothingConfig& config) {
  const FrequencyGrid& grid = periodograms.grid;
  const std::size_t count = periodograms.trials();
  if (count == 0) throw InsufficientDataError("no trials");
  if (!config.fixed_span && count < 2) {
    throw InsufficientDataError("automatic span selection needs at least two trials");
  }
  const std::vector<int> span_grid =
      config.span_grid.empty() ? default_span_grid(grid.samples()) : config.span_grid;

  const Eigen::Index p = periodograms.per_trial[0][0].rows();
  SmoothedResult result{SpectralEstimate{grid, MatrixSequence(grid.size(), CMatrix::Zero(p, p)),
                                         EstimatorTag::smoothed},
                        {}};
  result.selected_spans.reserve(count);
  for (std::size_t n = 0; n < count; ++n) {
    const int span = config.fixed_span ? *config.fixed_span : pure_select_span(periodograms, n, span_grid).span;
    result.selected_spans.push_back(span);
    const MatrixSequence smoothed = smooth_periodogram(periodograms.per_trial[n], span, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) result.estimate.matrices[j] += smoothed[j];
  }
  const double inv_n = 1.0 / static_cast<double>(count);
  for (auto& m : result.estimate.matrices) m = hermitize(m * inv_n);
  return result;
}

SmoothedResult smoothed_estimator(const MultiTrialSeries& trials, const SmoothingConfig& config) {
  return smoothed_estimator(compute_periodograms(trials), config);
}

}  // namespace gshrink
