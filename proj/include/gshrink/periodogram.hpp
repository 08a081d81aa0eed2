#pragma once

#include "gshrink/core.hpp"
#include "gshrink/timeseries.hpp"

#include <vector>

namespace gshrink {

// Unnormalized DFT sum_{t=1..T} x(t) h(t) exp(-i w_j t) of every channel of a
// P x T block at the half-grid Fourier frequencies; h is an optional taper
// (length T). Result is P x (floor(T/2)+1).
CMatrix fourier_transform(const RMatrix& x, const RVector* taper = nullptr);

// I(w_j) = d d^* / T with d = (2 pi)^-1/2 sum_t x(t) exp(-i w_j t).
MatrixSequence raw_periodogram(const RMatrix& trial, const FrequencyGrid& grid);

struct PeriodogramSet {
  FrequencyGrid grid;
  std::vector<MatrixSequence> per_trial;
  SpectralEstimate mean;  // tag raw_mean

  std::size_t trials() const { return per_trial.size(); }
};

PeriodogramSet compute_periodograms(const MultiTrialSeries& trials);

// Trial average of raw periodograms.
SpectralEstimate mean_periodogram(const MultiTrialSeries& trials);

}  // namespace gshrink
