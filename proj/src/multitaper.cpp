#include "gshrink/multitaper.hpp"

#include "gshrink/errors.hpp"
#include "gshrink/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gshrink {
namespace {

// Cumulative sums S_m(w_j) = sum_{a<=m} d_a d_a^* for m = 1..max_count.
std::vector<MatrixSequence> cumulative_eigenspectra(const RMatrix& trial, const TaperBank& bank) {
  const std::size_t half = static_cast<std::size_t>(trial.cols()) / 2 + 1;
  const auto p = trial.rows();
  std::vector<MatrixSequence> cum;
  cum.reserve(bank.count());
  MatrixSequence running(half, CMatrix::Zero(p, p));
  for (const auto& taper : bank.tapers) {
    const CMatrix d = fourier_transform(trial, &taper);
    for (std::size_t j = 0; j < half; ++j) {
      const auto col = d.col(static_cast<Eigen::Index>(j));
      running[j].noalias() += col * col.adjoint();
    }
    cum.push_back(running);
  }
  return cum;
}

void check_count(std::size_t count, std::size_t samples) {
  if (count < 1 || count >= samples) {
    throw DomainError("taper count must satisfy 1 <= m < T, got m = " + std::to_string(count) +
                      ", T = " + std::to_string(samples));
  }
}

}  // namespace

TaperBank sine_tapers(std::size_t samples, std::size_t count) {
  check_count(count, samples);
  TaperBank bank{samples, {}};
  const double denom = static_cast<double>(samples + 1);
  const double norm = std::sqrt(2.0 / denom);
  for (std::size_t a = 1; a <= count; ++a) {
    RVector u(static_cast<Eigen::Index>(samples));
    for (std::size_t t = 1; t <= samples; ++t) {
      u(static_cast<Eigen::Index>(t - 1)) =
          norm * std::sin(std::numbers::pi * static_cast<double>(a * t) / denom);
    }
    bank.tapers.push_back(std::move(u));
  }
  return bank;
}

std::vector<int> default_taper_grid(std::size_t samples) {
  const int upper = std::max(1, std::min(32, static_cast<int>(samples / 8)));
  std::vector<int> grid;
  for (int m = 1; m <= upper; ++m) grid.push_back(m);
  return grid;
}

SpectralEstimate multitaper_estimator(const MultiTrialSeries& trials, std::size_t count) {
  return multitaper_estimator(trials, std::vector<int>(trials.trials(), static_cast<int>(count)));
}

SpectralEstimate multitaper_estimator(const MultiTrialSeries& trials, const std::vector<int>& counts) {
  if (counts.size() != trials.trials()) throw DimensionError("need one taper count per trial");
  const FrequencyGrid grid = trials.grid();
  for (int m : counts) {
    if (m < 1) throw DomainError("taper count must be positive");
    check_count(static_cast<std::size_t>(m), grid.samples());
  }
  const auto p = static_cast<Eigen::Index>(trials.channels());
  const int max_count = *std::max_element(counts.begin(), counts.end());
  const TaperBank bank = sine_tapers(grid.samples(), static_cast<std::size_t>(max_count));

  SpectralEstimate out{grid, MatrixSequence(grid.size(), CMatrix::Zero(p, p)), EstimatorTag::multitaper};
  for (std::size_t n = 0; n < trials.trials(); ++n) {
    const auto m = static_cast<std::size_t>(counts[n]);
    MatrixSequence sum(grid.size(), CMatrix::Zero(p, p));
    for (std::size_t a = 0; a < m; ++a) {
      const CMatrix d = fourier_transform(trials.trial(n), &bank.tapers[a]);
      for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto col = d.col(static_cast<Eigen::Index>(j));
        sum[j].noalias() += col * col.adjoint();
      }
    }
    const double scale = 1.0 / (2.0 * std::numbers::pi * static_cast<double>(m));
    for (std::size_t j = 0; j < grid.size(); ++j) out.matrices[j] += scale * sum[j];
  }
  const double inv_n = 1.0 / static_cast<double>(trials.trials());
  for (auto& mat : out.matrices) mat = hermitize(mat * inv_n);
  return out;
}

TaperSelection pure_select_ntapers(const MultiTrialSeries& trials, const std::vector<int>& count_grid) {
  return pure_select_ntapers(trials, compute_periodograms(trials), count_grid);
}

TaperSelection pure_select_ntapers(const MultiTrialSeries& trials, const PeriodogramSet& periodograms,
                                   const std::vector<int>& count_grid) {
  if (count_grid.empty()) throw DomainError("PURE taper grid is empty");
  const FrequencyGrid grid = trials.grid();
  for (int m : count_grid) {
    if (m < 1) throw DomainError("taper count must be positive");
    check_count(static_cast<std::size_t>(m), grid.samples());
  }
  TaperSelection sel;
  if (count_grid.size() == 1) {
    sel.per_trial.assign(trials.trials(), count_grid.front());
    sel.risks.assign(trials.trials(), std::vector<double>{0.0});
    sel.median = count_grid.front();
    return sel;
  }
  if (trials.trials() < 2) throw InsufficientDataError("PURE taper selection needs at least two trials");

  const int max_count = *std::max_element(count_grid.begin(), count_grid.end());
  const TaperBank bank = sine_tapers(grid.samples(), static_cast<std::size_t>(max_count));
  const double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t n = 0; n < trials.trials(); ++n) {
    const MatrixSequence pilot = loo_pilot(periodograms, n);
    const auto cum = cumulative_eigenspectra(trials.trial(n), bank);
    std::vector<double> risks;
    int best_m = count_grid.front();
    double best = 0.0;
    for (std::size_t i = 0; i < count_grid.size(); ++i) {
      const int m = count_grid[i];
      const MatrixSequence& s = cum[static_cast<std::size_t>(m - 1)];
      const double scale = 1.0 / (two_pi * static_cast<double>(m));
      double acc = 0.0;
      for (std::size_t j = 0; j < grid.size(); ++j) acc += hs_distance_sq(pilot[j], scale * s[j]);
      const double risk = acc * two_pi / static_cast<double>(grid.samples());
      risks.push_back(risk);
      if (i == 0 || risk < best || (risk == best && m < best_m)) {
        best = risk;
        best_m = m;
      }
    }
    sel.per_trial.push_back(best_m);
    sel.risks.push_back(std::move(risks));
  }
  std::vector<int> sorted = sel.per_trial;
  std::sort(sorted.begin(), sorted.end());
  sel.median = sorted[(sorted.size() - 1) / 2];
  return sel;
}

}  // namespace gshrink
