#pragma once

#include "gshrink/core.hpp"
#include "gshrink/shrinkage.hpp"
#include "gshrink/timeseries.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gshrink {

// splitmix64 finalizer; used to derive independent per-trial seeds.
std::uint64_t mix_seed(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream = 0);

// Standard normal draws from mt19937_64 via Box-Muller on 53-bit uniforms
// u = (k + 0.5) / 2^53. std::normal_distribution is avoided because its
// algorithm differs between standard libraries.
class NormalGenerator {
 public:
  explicit NormalGenerator(std::uint64_t seed) : engine_(seed) {}
  double operator()();

 private:
  double uniform();
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// X(t) = sum_k Phi_k X(t-k) + Z(t) from a zero state; the first `burnin`
// samples are discarded. Returns P x T.
RMatrix simulate_var(const std::vector<RMatrix>& coefficients, const RMatrix& sigma_z, std::size_t samples,
                     std::size_t burnin, std::uint64_t seed);

// X(t) = Z(t) + Theta Z(t-1) with one presample innovation. Returns P x T.
RMatrix simulate_vma(const RMatrix& theta, const RMatrix& sigma_z, std::size_t samples, std::uint64_t seed);

struct SimulationConfig {
  std::size_t trials = 120;
  std::size_t samples = 256;
  double sampling_rate = 256.0;
  double ma_weight = 0.65;
  double ar_weight = 0.35;
  RMatrix theta;                   // VMA(1) coefficient
  std::vector<RMatrix> phi;        // VAR coefficients
  RMatrix sigma_z;                 // innovation covariance, shared by both parts
  std::size_t burnin = 500;
  std::uint64_t seed = 1;

  std::size_t channels() const { return static_cast<std::size_t>(sigma_z.rows()); }

  // The 12-channel VAR(5) + VMA(1) mixture used in the simulation study.
  static SimulationConfig paper_defaults();
};

// The 6 x 6 VMA block; the full 12 x 12 coefficient is block-diagonal in it.
RMatrix vma_theta_block();

void validate(const SimulationConfig& config);

// Trial n is ma_weight * VMA + ar_weight * VAR, each driven by its own
// stream seeded from (seed, n).
MultiTrialSeries simulate_mixture(const SimulationConfig& config);

// (2 pi)^-1 (I + Theta e^{-iw}) Sigma (I + Theta e^{-iw})^*.
SpectralEstimate vma_spectrum(const RMatrix& theta, const RMatrix& sigma_z, const FrequencyGrid& grid);

// ma_weight^2 f_MA + ar_weight^2 f_AR.
SpectralEstimate true_mixture_spectrum(const SimulationConfig& config, const FrequencyGrid& grid);

// Grid indices of local maxima of the mean VAR-component autospectrum.
std::vector<std::size_t> var_peak_indices(const SimulationConfig& config, const FrequencyGrid& grid);

enum class CompareEstimator { truth, var, smoothed, multitaper, shrinkage };
std::string to_string(CompareEstimator e);

struct MonteCarloOptions {
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  std::vector<CompareEstimator> estimators{CompareEstimator::truth, CompareEstimator::var,
                                           CompareEstimator::smoothed, CompareEstimator::multitaper,
                                           CompareEstimator::shrinkage};
  PipelineOptions pipeline;      // pipeline.window is the primary risk window
  std::vector<int> extra_windows;  // additional shrinkage columns "shrinkage_c<W>"
  std::vector<int> taper_grid;     // empty: default_taper_grid(T)
};

struct MonteCarloResult {
  FrequencyGrid grid;
  std::vector<std::string> columns;              // estimator column names
  std::vector<std::vector<double>> mse_spectral;  // [column][frequency]
  std::vector<std::vector<double>> mse_pcoh;      // [column][frequency]
  std::vector<int> windows;                       // primary first, then extras
  std::vector<std::vector<double>> mean_weight;   // [window][frequency]
  std::vector<std::size_t> selected_orders;       // per replicate
  std::vector<int> selected_tapers;               // per replicate (median)
  std::size_t reps = 0;

  // (2 pi / T) * sum over the grid of a column's curve.
  double integrated(const std::vector<std::vector<double>>& curves, const std::string& column) const;
  std::size_t column(const std::string& name) const;
};

// Simulates `reps` replicate datasets from `config` (replicate seeds derived
// from options.seed), runs every estimator and averages the per-frequency
// squared HS distances to the true spectrum and true partial coherence.
MonteCarloResult monte_carlo_compare(const SimulationConfig& config, const MonteCarloOptions& options);

}  // namespace gshrink
