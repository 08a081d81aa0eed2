#include "gshrink/simulation.hpp"

#include "gshrink/connectivity.hpp"
#include "gshrink/errors.hpp"
#include "gshrink/multitaper.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/var.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace gshrink {
namespace {

RMatrix innovation_factor(const RMatrix& sigma) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw DimensionError("innovation covariance must be square");
  Eigen::LLT<RMatrix> llt(sigma);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(sigma);
  if (eig.eigenvalues().minCoeff() < -1e-12 * std::abs(sigma.trace())) {
    throw DomainError("innovation covariance is not positive semidefinite");
  }
  return eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
}

void fill_normals(NormalGenerator& gen, RMatrix& out) {
  for (Eigen::Index t = 0; t < out.cols(); ++t) {
    for (Eigen::Index p = 0; p < out.rows(); ++p) out(p, t) = gen();
  }
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t stream) {
  return mix_seed(mix_seed(mix_seed(master) ^ index) ^ (stream * 0xd1b54a32d192ed03ULL));
}

double NormalGenerator::uniform() {
  return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double NormalGenerator::operator()() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double r = std::sqrt(-2.0 * std::log(uniform()));
  const double angle = 2.0 * std::numbers::pi * uniform();
  cached_ = r * std::sin(angle);
  has_cached_ = true;
  return r * std::cos(angle);
}

RMatrix simulate_var(const std::vector<RMatrix>& coefficients, const RMatrix& sigma_z, std::size_t samples,
                     std::size_t burnin, std::uint64_t seed) {
  const auto p = sigma_z.rows();
  for (const auto& phi : coefficients) {
    if (phi.rows() != p || phi.cols() != p) throw DimensionError("VAR coefficient shape does not match sigma_z");
  }
  const double radius = companion_spectral_radius(coefficients);
  if (!(radius < 1.0)) {
    throw StabilityError("VAR model is not stable (companion spectral radius " + std::to_string(radius) + ")");
  }
  const RMatrix factor = innovation_factor(sigma_z);
  const auto total = static_cast<Eigen::Index>(samples + burnin);
  const auto k = static_cast<Eigen::Index>(coefficients.size());

  NormalGenerator gen(seed);
  RMatrix z(p, total);
  fill_normals(gen, z);
  RMatrix x = factor * z;
  for (Eigen::Index t = 0; t < total; ++t) {
    for (Eigen::Index lag = 1; lag <= std::min(k, t); ++lag) {
      x.col(t).noalias() += coefficients[static_cast<std::size_t>(lag - 1)] * x.col(t - lag);
    }
  }
  return x.rightCols(static_cast<Eigen::Index>(samples));
}

RMatrix simulate_vma(const RMatrix& theta, const RMatrix& sigma_z, std::size_t samples, std::uint64_t seed) {
  const auto p = sigma_z.rows();
  if (theta.rows() != p || theta.cols() != p) throw DimensionError("VMA coefficient shape does not match sigma_z");
  const RMatrix factor = innovation_factor(sigma_z);
  NormalGenerator gen(seed);
  RMatrix z(p, static_cast<Eigen::Index>(samples) + 1);
  fill_normals(gen, z);
  z = factor * z;
  const auto t_len = static_cast<Eigen::Index>(samples);
  return z.rightCols(t_len) + theta * z.leftCols(t_len);
}

RMatrix vma_theta_block() {
  RMatrix b(6, 6);
  b << 0.00, 0.20, 0.15, 0.15, 0.00, -0.15,
       0.20, 0.00, -0.20, 0.00, 0.00, 0.00,
       -0.15, 0.20, 0.00, 0.00, 0.00, 0.00,
       0.00, 0.00, 0.00, 0.00, 0.20, 0.15,
       0.00, 0.00, 0.00, 0.20, 0.00, -0.20,
       0.00, 0.00, 0.00, -0.15, 0.20, 0.00;
  return b;
}

SimulationConfig SimulationConfig::paper_defaults() {
  SimulationConfig c;
  const Eigen::Index p = 12;
  c.theta = RMatrix::Zero(p, p);
  c.theta.topLeftCorner(6, 6) = vma_theta_block();
  c.theta.bottomRightCorner(6, 6) = vma_theta_block();
  const RMatrix eye = RMatrix::Identity(p, p);
  c.phi = {0.75 * eye, -0.20 * eye, RMatrix::Zero(p, p), -0.15 * eye, -0.05 * eye};
  c.sigma_z = eye;
  return c;
}

void validate(const SimulationConfig& config) {
  if (config.trials < 1) throw ConfigError("simulation needs at least one trial");
  if (config.samples < 2) throw ConfigError("simulation needs at least two samples per trial");
  if (!(config.sampling_rate > 0.0)) throw ConfigError("sampling rate must be positive");
  const auto p = config.sigma_z.rows();
  if (p == 0 || config.sigma_z.cols() != p) throw ConfigError("sigma_z must be a nonempty square matrix");
  if (config.theta.rows() != p || config.theta.cols() != p) throw ConfigError("theta shape does not match sigma_z");
  for (const auto& phi : config.phi) {
    if (phi.rows() != p || phi.cols() != p) throw ConfigError("phi shape does not match sigma_z");
  }
  if (!std::isfinite(config.ma_weight) || !std::isfinite(config.ar_weight)) {
    throw ConfigError("mixture weights must be finite");
  }
}

MultiTrialSeries simulate_mixture(const SimulationConfig& config) {
  validate(config);
  const auto p = static_cast<Eigen::Index>(config.channels());
  const auto t_len = static_cast<Eigen::Index>(config.samples);
  std::vector<RMatrix> trials;
  trials.reserve(config.trials);
  for (std::size_t n = 0; n < config.trials; ++n) {
    RMatrix x = RMatrix::Zero(p, t_len);
    if (config.ma_weight != 0.0) {
      x += config.ma_weight * simulate_vma(config.theta, config.sigma_z, config.samples, derive_seed(config.seed, n, 0));
    }
    if (config.ar_weight != 0.0) {
      x += config.ar_weight *
           simulate_var(config.phi, config.sigma_z, config.samples, config.burnin, derive_seed(config.seed, n, 1));
    }
    trials.push_back(std::move(x));
  }
  return MultiTrialSeries(std::move(trials), config.sampling_rate);
}

SpectralEstimate vma_spectrum(const RMatrix& theta, const RMatrix& sigma_z, const FrequencyGrid& grid) {
  const auto p = sigma_z.rows();
  const CMatrix sigma = sigma_z.cast<Complex>();
  const double scale = 1.0 / (2.0 * std::numbers::pi);
  SpectralEstimate out{grid, MatrixSequence(grid.size()), EstimatorTag::truth};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const CMatrix b = CMatrix::Identity(p, p) + theta.cast<Complex>() * fourier_phase(j, 1, grid.samples());
    out.matrices[j] = hermitize(scale * b * sigma * b.adjoint());
  }
  return out;
}

SpectralEstimate true_mixture_spectrum(const SimulationConfig& config, const FrequencyGrid& grid) {
  validate(config);
  const auto p = static_cast<Eigen::Index>(config.channels());
  SpectralEstimate out{grid, MatrixSequence(grid.size(), CMatrix::Zero(p, p)), EstimatorTag::truth};
  const double cma = config.ma_weight * config.ma_weight;
  const double car = config.ar_weight * config.ar_weight;
  if (cma != 0.0) {
    const auto ma = vma_spectrum(config.theta, config.sigma_z, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) out.matrices[j] += cma * ma[j];
  }
  if (car != 0.0) {
    const double radius = companion_spectral_radius(config.phi);
    if (!(radius < 1.0)) {
      throw StabilityError("VAR component is not stable (companion spectral radius " + std::to_string(radius) + ")");
    }
    VarModel model{config.phi, config.sigma_z};
    const auto ar = var_spectrum(model, grid);
    for (std::size_t j = 0; j < grid.size(); ++j) out.matrices[j] += car * ar[j];
  }
  out.tag = EstimatorTag::truth;
  return out;
}

std::vector<std::size_t> var_peak_indices(const SimulationConfig& config, const FrequencyGrid& grid) {
  VarModel model{config.phi, config.sigma_z};
  const auto spec = var_spectrum(model, grid);
  std::vector<double> level(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) level[j] = spec[j].diagonal().real().mean();
  std::vector<std::size_t> peaks;
  const std::size_t last = grid.size() - 1;
  for (std::size_t j = 0; j <= last; ++j) {
    // Neighbours across 0 and pi are mirror images.
    const double left = j == 0 ? (last > 0 ? level[1] : level[0]) : level[j - 1];
    const double right = j == last ? level[grid.mirror(static_cast<long>(j) + 1).index] : level[j + 1];
    if (level[j] > left && level[j] >= right) peaks.push_back(j);
  }
  return peaks;
}

std::string to_string(CompareEstimator e) {
  switch (e) {
    case CompareEstimator::truth: return "truth";
    case CompareEstimator::var: return "var";
    case CompareEstimator::smoothed: return "smoothed";
    case CompareEstimator::multitaper: return "multitaper";
    case CompareEstimator::shrinkage: return "shrinkage";
  }
  return "unknown";
}

double MonteCarloResult::integrated(const std::vector<std::vector<double>>& curves, const std::string& name) const {
  const auto& curve = curves.at(column(name));
  double acc = 0.0;
  for (double v : curve) acc += v;
  return acc * 2.0 * std::numbers::pi / static_cast<double>(grid.samples());
}

std::size_t MonteCarloResult::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw DomainError("no estimator column named " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

MonteCarloResult monte_carlo_compare(const SimulationConfig& config, const MonteCarloOptions& options) {
  if (options.reps < 1) throw ConfigError("Monte Carlo needs at least one replicate");
  validate(config);
  const FrequencyGrid grid(config.samples, config.sampling_rate);
  const std::size_t size = grid.size();

  MonteCarloResult result{grid, {}, {}, {}, {}, {}, {}, {}, options.reps};
  result.windows.push_back(options.pipeline.window);
  for (int w : options.extra_windows) result.windows.push_back(w);
  for (auto e : options.estimators) result.columns.push_back(to_string(e));
  for (int w : options.extra_windows) result.columns.push_back("shrinkage_c" + std::to_string(w));
  result.mse_spectral.assign(result.columns.size(), std::vector<double>(size, 0.0));
  result.mse_pcoh.assign(result.columns.size(), std::vector<double>(size, 0.0));
  result.mean_weight.assign(result.windows.size(), std::vector<double>(size, 0.0));

  const bool need_pipeline =
      std::any_of(options.estimators.begin(), options.estimators.end(),
                  [](CompareEstimator e) { return e != CompareEstimator::truth && e != CompareEstimator::multitaper; }) ||
      !options.extra_windows.empty();
  const bool need_multitaper = std::find(options.estimators.begin(), options.estimators.end(),
                                         CompareEstimator::multitaper) != options.estimators.end();
  const std::vector<int> taper_grid =
      options.taper_grid.empty() ? default_taper_grid(config.samples) : options.taper_grid;

  const SpectralEstimate truth = true_mixture_spectrum(config, grid);
  const ConnectivityResult truth_pcoh = partial_coherence(truth);

  for (std::size_t r = 0; r < options.reps; ++r) {
    with_context("replicate " + std::to_string(r), [&] {
      SimulationConfig rep_config = config;
      rep_config.seed = derive_seed(options.seed, r, 7);
      const MultiTrialSeries data = simulate_mixture(rep_config);
      const PeriodogramSet periodograms = compute_periodograms(data);

      std::optional<PipelineResult> fit;
      if (need_pipeline) {
        fit = full_pipeline(data, periodograms, options.pipeline);
        result.selected_orders.push_back(fit->var_model.order());
      }
      std::optional<SpectralEstimate> multitaper;
      if (need_multitaper) {
        const auto sel = pure_select_ntapers(data, periodograms, taper_grid);
        result.selected_tapers.push_back(sel.median);
        multitaper = multitaper_estimator(data, static_cast<std::size_t>(sel.median));
      }

      auto accumulate = [&](std::size_t col, const SpectralEstimate& est) {
        const ConnectivityResult pcoh = partial_coherence(est);
        for (std::size_t j = 0; j < size; ++j) {
          result.mse_spectral[col][j] += hs_distance_sq(est[j], truth[j]);
          result.mse_pcoh[col][j] += hs_norm_sq(RMatrix(pcoh.matrices[j] - truth_pcoh.matrices[j]));
        }
      };

      std::size_t col = 0;
      for (auto e : options.estimators) {
        switch (e) {
          case CompareEstimator::truth: accumulate(col, truth); break;
          case CompareEstimator::var: accumulate(col, fit->var_estimate); break;
          case CompareEstimator::smoothed: accumulate(col, fit->smoothed.estimate); break;
          case CompareEstimator::multitaper: accumulate(col, *multitaper); break;
          case CompareEstimator::shrinkage: accumulate(col, fit->estimate); break;
        }
        ++col;
      }
      if (fit) {
        for (std::size_t j = 0; j < size; ++j) result.mean_weight[0][j] += fit->diagnostics.weight[j];
      }
      for (std::size_t i = 0; i < options.extra_windows.size(); ++i, ++col) {
        const auto diag = shrinkage_diagnostics(fit->var_estimate, fit->smoothed.estimate, fit->mean_periodogram,
                                                options.extra_windows[i]);
        accumulate(col, generalized_shrinkage(fit->var_estimate, fit->smoothed.estimate, diag.weight));
        for (std::size_t j = 0; j < size; ++j) result.mean_weight[i + 1][j] += diag.weight[j];
      }
      return 0;
    });
  }

  const double inv = 1.0 / static_cast<double>(options.reps);
  for (auto* curves : {&result.mse_spectral, &result.mse_pcoh, &result.mean_weight}) {
    for (auto& curve : *curves) {
      for (double& v : curve) v *= inv;
    }
  }
  return result;
}

}  // namespace gshrink
