#pragma once

#include "gshrink/core.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/timeseries.hpp"

#include <cstddef>
#include <vector>

namespace gshrink {

struct TaperBank {
  std::size_t samples = 0;
  std::vector<RVector> tapers;

  std::size_t count() const { return tapers.size(); }
};

// u_a(t) = sqrt(2/(T+1)) sin(pi a t / (T+1)), a = 1..m, t = 1..T.
TaperBank sine_tapers(std::size_t samples, std::size_t count);

// Taper counts 1..min(32, T/8).
std::vector<int> default_taper_grid(std::size_t samples);

// Per trial: (2 pi m)^-1 sum_a d_a d_a^*, d_a the DFT of the a-th tapered
// trial; then the average over trials.
SpectralEstimate multitaper_estimator(const MultiTrialSeries& trials, std::size_t count);

// Same, with a taper count per trial.
SpectralEstimate multitaper_estimator(const MultiTrialSeries& trials, const std::vector<int>& counts);

struct TaperSelection {
  std::vector<int> per_trial;
  std::vector<std::vector<double>> risks;  // per trial, aligned with the grid
  int median = 1;                          // lower median of per_trial
};

// PURE over the taper count: for each trial, the count minimizing the
// integrated distance to the leave-one-out mean periodogram. Ties go to the
// smaller count.
TaperSelection pure_select_ntapers(const MultiTrialSeries& trials, const std::vector<int>& count_grid);
TaperSelection pure_select_ntapers(const MultiTrialSeries& trials, const PeriodogramSet& periodograms,
                                   const std::vector<int>& count_grid);

}  // namespace gshrink
