#pragma once

#include "gshrink/core.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gshrink {

// N independent trials of a P-channel, T-sample real series. Each trial is
// stored as a P x T matrix (row = channel, column = time t = 1..T).
class MultiTrialSeries {
 public:
  MultiTrialSeries() = default;
  MultiTrialSeries(std::vector<RMatrix> trials, double sampling_rate,
                   std::vector<std::string> channel_labels = {});

  std::size_t trials() const { return trials_.size(); }
  std::size_t channels() const { return trials_.empty() ? 0 : trials_.front().rows(); }
  std::size_t samples() const { return trials_.empty() ? 0 : trials_.front().cols(); }
  double sampling_rate() const { return sampling_rate_; }
  const std::vector<std::string>& channel_labels() const { return labels_; }

  const RMatrix& trial(std::size_t n) const { return trials_.at(n); }
  RMatrix& trial(std::size_t n) { return trials_.at(n); }
  const std::vector<RMatrix>& data() const { return trials_; }

  FrequencyGrid grid() const { return FrequencyGrid(samples(), sampling_rate_); }

  // Copy without trial `n` (used by leave-one-out procedures).
  MultiTrialSeries without_trial(std::size_t n) const;

 private:
  std::vector<RMatrix> trials_;
  double sampling_rate_ = 1.0;
  std::vector<std::string> labels_;
};

enum class TrendOrder { linear = 1, quadratic = 2 };

// Subtracts the least-squares polynomial (in t) of the given order from each
// trial and channel.
MultiTrialSeries detrend(const MultiTrialSeries& series, TrendOrder order);

// Mean-centers and scales each (trial, channel) to unit sample variance,
// with divisor T - 1.
MultiTrialSeries standardize(const MultiTrialSeries& series);

}  // namespace gshrink
