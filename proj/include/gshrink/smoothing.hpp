#pragma once

#include "gshrink/core.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/timeseries.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace gshrink {

enum class SmoothingKernel { hann };

struct SmoothingConfig {
  SmoothingKernel kernel = SmoothingKernel::hann;
  // Candidate spans for PURE selection; empty means default_span_grid(T).
  std::vector<int> span_grid;
  // When set, every trial uses this span and no selection is performed.
  std::optional<int> fixed_span;
};

// Odd spans 3, 5, ..., min(T/4 rounded to odd, 63).
std::vector<int> default_span_grid(std::size_t samples);

// Discrete Hann weights cos^2(pi m / (span + 1)), m = -(span-1)/2..(span-1)/2,
// normalized to sum to one.
std::vector<double> hann_weights(int span);

// Convolves each matrix entry with the Hann weights across frequency. The
// half-grid sequence is extended to the full circle by conjugate symmetry.
MatrixSequence smooth_periodogram(const MatrixSequence& per_freq, int span, const FrequencyGrid& grid);

// Average of all trial periodograms except trial n.
MatrixSequence loo_pilot(const PeriodogramSet& periodograms, std::size_t n);

// Riemann sum (2 pi / T) sum_j ||pilot(w_j) - candidate(w_j)||^2 over the half grid.
double integrated_distance(const MatrixSequence& pilot, const MatrixSequence& candidate,
                           const FrequencyGrid& grid);

struct SpanSelection {
  int span = 1;
  std::vector<double> risks;  // aligned with the candidate grid
};

// PURE: picks the span minimizing the integrated distance between the
// leave-one-out pilot and trial n's smoothed periodogram. Ties go to the
// smaller span.
SpanSelection pure_select_span(const PeriodogramSet& periodograms, std::size_t n,
                               const std::vector<int>& span_grid);

struct SmoothedResult {
  SpectralEstimate estimate;  // tag smoothed
  std::vector<int> selected_spans;
};

SmoothedResult smoothed_estimator(const PeriodogramSet& periodograms, const SmoothingConfig& config);
SmoothedResult smoothed_estimator(const MultiTrialSeries& trials, const SmoothingConfig& config);

}  // namespace gshrink
