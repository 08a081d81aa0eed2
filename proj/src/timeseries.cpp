#include "gshrink/timeseries.hpp"

#include "gshrink/errors.hpp"

#include <cmath>
#include <string>

namespace gshrink {

MultiTrialSeries::MultiTrialSeries(std::vector<RMatrix> trials, double sampling_rate,
                                   std::vector<std::string> channel_labels)
    : trials_(std::move(trials)), sampling_rate_(sampling_rate), labels_(std::move(channel_labels)) {
  if (trials_.empty()) throw InsufficientDataError("need at least one trial");
  const Eigen::Index p = trials_.front().rows();
  const Eigen::Index t = trials_.front().cols();
  if (p < 1) throw DimensionError("need at least one channel");
  if (t < 2) throw InsufficientDataError("need at least two samples per trial");
  for (std::size_t n = 0; n < trials_.size(); ++n) {
    if (trials_[n].rows() != p || trials_[n].cols() != t) {
      throw DimensionError("trial " + std::to_string(n + 1) + " has shape " +
                           std::to_string(trials_[n].rows()) + "x" + std::to_string(trials_[n].cols()) +
                           ", expected " + std::to_string(p) + "x" + std::to_string(t));
    }
    if (!trials_[n].allFinite()) {
      throw DomainError("trial " + std::to_string(n + 1) + " contains non-finite values");
    }
  }
  if (!(sampling_rate_ > 0.0) || !std::isfinite(sampling_rate_)) {
    throw DomainError("sampling rate must be positive and finite");
  }
  if (labels_.empty()) {
    for (Eigen::Index i = 0; i < p; ++i) labels_.push_back("ch" + std::to_string(i + 1));
  } else if (labels_.size() != static_cast<std::size_t>(p)) {
    throw DimensionError("expected " + std::to_string(p) + " channel labels, got " +
                         std::to_string(labels_.size()));
  }
}

MultiTrialSeries MultiTrialSeries::without_trial(std::size_t n) const {
  if (n >= trials_.size()) throw DimensionError("trial index out of range");
  if (trials_.size() < 2) throw InsufficientDataError("cannot leave out the only trial");
  std::vector<RMatrix> kept;
  kept.reserve(trials_.size() - 1);
  for (std::size_t i = 0; i < trials_.size(); ++i) {
    if (i != n) kept.push_back(trials_[i]);
  }
  return MultiTrialSeries(std::move(kept), sampling_rate_, labels_);
}

MultiTrialSeries detrend(const MultiTrialSeries& series, TrendOrder order) {
  const auto degree = static_cast<Eigen::Index>(order);
  const auto t_len = static_cast<Eigen::Index>(series.samples());
  if (t_len <= degree + 1) {
    throw InsufficientDataError("detrend of order " + std::to_string(degree) + " needs more than " +
                                std::to_string(degree + 1) + " samples, got " + std::to_string(t_len));
  }
  // Orthonormal polynomial basis via QR of the Vandermonde matrix on a
  // centered, scaled time axis (keeps the fit well conditioned for long T).
  RMatrix vander(t_len, degree + 1);
  const double mid = 0.5 * static_cast<double>(t_len + 1);
  const double half = 0.5 * static_cast<double>(t_len - 1);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const double u = (static_cast<double>(t + 1) - mid) / half;
    double pow = 1.0;
    for (Eigen::Index d = 0; d <= degree; ++d) {
      vander(t, d) = pow;
      pow *= u;
    }
  }
  Eigen::HouseholderQR<RMatrix> qr(vander);
  const RMatrix basis = qr.householderQ() * RMatrix::Identity(t_len, degree + 1);

  std::vector<RMatrix> out;
  out.reserve(series.trials());
  for (const auto& trial : series.data()) {
    const RMatrix coef = trial * basis;  // P x (degree+1)
    out.push_back(trial - coef * basis.transpose());
  }
  return MultiTrialSeries(std::move(out), series.sampling_rate(), series.channel_labels());
}

MultiTrialSeries standardize(const MultiTrialSeries& series) {
  const auto t_len = static_cast<double>(series.samples());
  std::vector<RMatrix> out;
  out.reserve(series.trials());
  for (std::size_t n = 0; n < series.trials(); ++n) {
    RMatrix x = series.trial(n);
    for (Eigen::Index p = 0; p < x.rows(); ++p) {
      auto row = x.row(p);
      const double scale = row.cwiseAbs().maxCoeff();
      const double mean = row.mean();
      row.array() -= mean;
      const double var = row.squaredNorm() / (t_len - 1.0);
      // Rounding in the mean leaves ~eps residue on constant input.
      if (!(std::sqrt(var) > 1e-12 * scale)) {
        throw DegenerateChannelError("trial " + std::to_string(n + 1) + ", channel " +
                                     series.channel_labels()[p] + " has zero variance");
      }
      row /= std::sqrt(var);
    }
    out.push_back(std::move(x));
  }
  return MultiTrialSeries(std::move(out), series.sampling_rate(), series.channel_labels());
}

}  // namespace gshrink
