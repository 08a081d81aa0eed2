#include "gshrink/periodogram.hpp"

#include "gshrink/errors.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <string>

namespace gshrink {

CMatrix fourier_transform(const RMatrix& x, const RVector* taper) {
  const Eigen::Index p = x.rows();
  const Eigen::Index t_len = x.cols();
  if (taper != nullptr && taper->size() != t_len) {
    throw DimensionError("taper length " + std::to_string(taper->size()) + " does not match T = " +
                         std::to_string(t_len));
  }
  const Eigen::Index half = t_len / 2 + 1;
  CMatrix out(p, half);

  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(t_len));
  std::vector<Complex> spec;
  for (Eigen::Index ch = 0; ch < p; ++ch) {
    for (Eigen::Index t = 0; t < t_len; ++t) {
      const double h = taper ? (*taper)(t) : 1.0;
      in[static_cast<std::size_t>(t)] = Complex(x(ch, t) * h, 0.0);
    }
    fft.fwd(spec, in);
    // The FFT indexes time from 0; the series index starts at t = 1.
    for (Eigen::Index j = 0; j < half; ++j) {
      const double w = 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(t_len);
      out(ch, j) = spec[static_cast<std::size_t>(j)] * std::polar(1.0, -w);
    }
  }
  return out;
}

MatrixSequence raw_periodogram(const RMatrix& trial, const FrequencyGrid& grid) {
  if (static_cast<std::size_t>(trial.cols()) != grid.samples()) {
    throw DimensionError("trial has " + std::to_string(trial.cols()) + " samples but grid T = " +
                         std::to_string(grid.samples()));
  }
  const CMatrix d = fourier_transform(trial);
  const double scale = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(grid.samples()));
  MatrixSequence out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const auto col = d.col(static_cast<Eigen::Index>(j));
    out[j] = scale * (col * col.adjoint());
  }
  return out;
}

PeriodogramSet compute_periodograms(const MultiTrialSeries& trials) {
  const FrequencyGrid grid = trials.grid();
  const auto p = static_cast<Eigen::Index>(trials.channels());
  PeriodogramSet set{grid, {}, SpectralEstimate{grid, {}, EstimatorTag::raw_mean}};
  set.per_trial.reserve(trials.trials());
  for (const auto& x : trials.data()) set.per_trial.push_back(raw_periodogram(x, grid));

  set.mean.matrices.assign(grid.size(), CMatrix::Zero(p, p));
  for (const auto& seq : set.per_trial) {
    for (std::size_t j = 0; j < grid.size(); ++j) set.mean.matrices[j] += seq[j];
  }
  const double inv_n = 1.0 / static_cast<double>(trials.trials());
  for (auto& m : set.mean.matrices) m *= inv_n;
  return set;
}

SpectralEstimate mean_periodogram(const MultiTrialSeries& trials) {
  return compute_periodograms(trials).mean;
}

}  // namespace gshrink
