#include "gshrink/connectivity.hpp"

#include "gshrink/errors.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace gshrink {

ConnectivityResult coherence(const SpectralEstimate& f) {
  check_sequence(f.matrices, f.grid, "coherence");
  ConnectivityResult out{f.grid, {}, ConnectivityKind::coherence};
  out.matrices.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const CMatrix& m = f[j];
    const auto p = m.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
      if (!(m(i, i).real() > 0.0)) {
        throw DegenerateChannelError("coherence: autospectrum of channel " + std::to_string(i) +
                                     " is not positive at frequency index " + std::to_string(j));
      }
    }
    RMatrix c = RMatrix::Identity(p, p);
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a + 1; b < p; ++b) {
        const double v = std::norm(m(a, b)) / (m(a, a).real() * m(b, b).real());
        c(a, b) = v;
        c(b, a) = v;
      }
    }
    out.matrices.push_back(std::move(c));
  }
  return out;
}

RMatrix partial_coherence(const CMatrix& f, std::size_t frequency_index) {
  const auto p = f.rows();
  if (p == 0 || f.cols() != p) throw DimensionError("partial_coherence needs a square spectral matrix");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(hermitize(f));
  const auto& lambda = eig.eigenvalues();
  const double lo = lambda.minCoeff();
  const double hi = lambda.maxCoeff();
  const double cond = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(cond <= kMaxSpectralCondition)) {
    throw ConditioningError("partial_coherence: spectral matrix at frequency index " +
                            std::to_string(frequency_index) + " is singular or near-singular (condition number " +
                            std::to_string(cond) + ")");
  }
  const CMatrix& v = eig.eigenvectors();
  const CMatrix g = v * lambda.cwiseInverse().asDiagonal() * v.adjoint();
  RMatrix rho = RMatrix::Identity(p, p);
  for (Eigen::Index a = 0; a < p; ++a) {
    for (Eigen::Index b = a + 1; b < p; ++b) {
      const double value = std::norm(g(a, b)) / (g(a, a).real() * g(b, b).real());
      rho(a, b) = value;
      rho(b, a) = value;
    }
  }
  return rho;
}

ConnectivityResult partial_coherence(const SpectralEstimate& f) {
  check_sequence(f.matrices, f.grid, "partial_coherence");
  ConnectivityResult out{f.grid, {}, ConnectivityKind::partial_coherence};
  out.matrices.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) out.matrices.push_back(partial_coherence(f[j], j));
  return out;
}

std::vector<Band> default_bands() { return {{"alpha", 8.0, 12.0}, {"beta", 18.0, 30.0}}; }

std::vector<std::size_t> band_indices(const FrequencyGrid& grid, const Band& band) {
  if (!(band.lo_hz <= band.hi_hz)) throw DomainError("band " + band.name + " has lo > hi");
  // Absorb rounding in fs * j / T; Fourier frequencies are otherwise exact.
  const double slack = 1e-9 * std::max(1.0, std::abs(band.hi_hz));
  std::vector<std::size_t> idx;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double hz = grid.hz(j);
    if (hz >= band.lo_hz - slack && hz <= band.hi_hz + slack) idx.push_back(j);
  }
  return idx;
}

BandConnectivity band_average(const ConnectivityResult& result, const Band& band) {
  const auto idx = band_indices(result.grid, band);
  if (idx.empty()) {
    throw DomainError("no Fourier frequencies in band " + band.name + " [" + std::to_string(band.lo_hz) + ", " +
                      std::to_string(band.hi_hz) + "] Hz");
  }
  if (result.matrices.size() != result.grid.size()) throw DimensionError("band_average: result/grid size mismatch");
  RMatrix acc = RMatrix::Zero(result.matrices.front().rows(), result.matrices.front().cols());
  for (std::size_t j : idx) acc += result.matrices[j];
  acc /= static_cast<double>(idx.size());
  acc.diagonal().setOnes();
  return {band, acc, result.kind};
}

double fisher_z(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw DomainError("fisher_z needs 0 <= rho < 1, got " + std::to_string(rho));
  }
  return std::atanh(std::sqrt(rho));
}

JackknifeSummary jackknife(const std::vector<double>& replicates) {
  if (replicates.empty()) throw InsufficientDataError("jackknife needs at least one replicate");
  const auto n = static_cast<double>(replicates.size());
  const double mean = std::accumulate(replicates.begin(), replicates.end(), 0.0) / n;
  double ss = 0.0;
  for (double z : replicates) ss += (z - mean) * (z - mean);
  return {mean, std::sqrt((n - 1.0) / n * ss), replicates.size()};
}

std::vector<BandJackknife> jackknife_band_stats(const MultiTrialSeries& trials, const std::vector<Band>& bands,
                                                const PipelineOptions& options) {
  const std::size_t n = trials.trials();
  if (n < 2) throw InsufficientDataError("jackknife needs at least two trials");
  if (bands.empty()) throw DomainError("no bands requested");
  const FrequencyGrid grid = trials.grid();
  for (const auto& band : bands) {
    if (band_indices(grid, band).empty()) throw DomainError("no Fourier frequencies in band " + band.name);
  }
  const auto p = static_cast<Eigen::Index>(trials.channels());
  std::vector<BandJackknife> out;
  for (const auto& band : bands) out.push_back({band, RMatrix::Zero(p, p), RMatrix::Zero(p, p), n, {}});

  for (std::size_t left_out = 0; left_out < n; ++left_out) {
    const auto fit = full_pipeline(trials.without_trial(left_out), options);
    const auto pcoh = partial_coherence(fit.estimate);
    for (auto& stats : out) {
      const RMatrix avg = band_average(pcoh, stats.band).matrix;
      RMatrix z = RMatrix::Zero(p, p);
      for (Eigen::Index a = 0; a < p; ++a) {
        for (Eigen::Index b = a + 1; b < p; ++b) {
          z(a, b) = fisher_z(avg(a, b));
          z(b, a) = z(a, b);
        }
      }
      stats.replicates.push_back(std::move(z));
    }
  }
  std::vector<double> values(n);
  for (auto& stats : out) {
    for (Eigen::Index a = 0; a < p; ++a) {
      for (Eigen::Index b = a + 1; b < p; ++b) {
        for (std::size_t i = 0; i < n; ++i) values[i] = stats.replicates[i](a, b);
        const auto s = jackknife(values);
        stats.mean_z(a, b) = stats.mean_z(b, a) = s.mean;
        stats.se(a, b) = stats.se(b, a) = s.se;
      }
    }
  }
  return out;
}

TTest welch_t(const JackknifeSummary& a, const JackknifeSummary& b) {
  if (!(a.se >= 0.0 && b.se >= 0.0)) throw DomainError("welch_t: standard errors must be nonnegative");
  if (a.n < 2 || b.n < 2) throw InsufficientDataError("welch_t: each sample needs n >= 2");
  const double va = a.se * a.se;
  const double vb = b.se * b.se;
  const double diff = a.mean - b.mean;
  TTest out;
  if (va + vb == 0.0) {
    out.df = static_cast<double>(a.n + b.n - 2);
    if (diff == 0.0) return out;
    out.t = diff > 0.0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
    out.p = 0.0;
    out.infinite = true;
    return out;
  }
  out.t = diff / std::sqrt(va + vb);
  out.df = (va + vb) * (va + vb) /
           (va * va / static_cast<double>(a.n - 1) + vb * vb / static_cast<double>(b.n - 1));
  const boost::math::students_t dist(out.df);
  out.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(out.t))));
  return out;
}

std::vector<bool> bh_fdr(const std::vector<double>& pvalues, double q) {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("FDR level q must lie in (0, 1)");
  for (double p : pvalues) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("p-value outside [0, 1]: " + std::to_string(p));
  }
  const std::size_t m = pvalues.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pvalues[a] < pvalues[b]; });
  std::size_t k = 0;
  for (std::size_t r = m; r >= 1; --r) {
    if (pvalues[order[r - 1]] <= static_cast<double>(r) * q / static_cast<double>(m)) {
      k = r;
      break;
    }
  }
  std::vector<bool> reject(m, false);
  for (std::size_t r = 0; r < k; ++r) reject[order[r]] = true;
  return reject;
}

std::vector<PairTest> compare_conditions(const std::vector<BandJackknife>& left,
                                         const std::vector<BandJackknife>& right, double q) {
  if (left.size() != right.size()) throw DimensionError("conditions were analysed with different band lists");
  std::vector<PairTest> tests;
  for (std::size_t b = 0; b < left.size(); ++b) {
    const auto& l = left[b];
    const auto& r = right[b];
    if (l.band.name != r.band.name) throw DimensionError("band order differs between conditions");
    if (l.mean_z.rows() != r.mean_z.rows()) {
      throw DimensionError("channel mismatch: " + std::to_string(l.mean_z.rows()) + " vs " +
                           std::to_string(r.mean_z.rows()) + " channels");
    }
    const auto p = l.mean_z.rows();
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index k = i + 1; k < p; ++k) {
        PairTest t;
        t.band = l.band.name;
        t.channel_a = static_cast<std::size_t>(i);
        t.channel_b = static_cast<std::size_t>(k);
        t.z_left = l.mean_z(i, k);
        t.z_right = r.mean_z(i, k);
        t.se_left = l.se(i, k);
        t.se_right = r.se(i, k);
        t.test = welch_t({t.z_left, t.se_left, l.n}, {t.z_right, t.se_right, r.n});
        tests.push_back(t);
      }
    }
  }
  std::vector<double> pvals;
  pvals.reserve(tests.size());
  for (const auto& t : tests) pvals.push_back(t.test.p);
  const auto reject = bh_fdr(pvals, q);
  for (std::size_t i = 0; i < tests.size(); ++i) tests[i].rejected = reject[i];
  return tests;
}

}  // namespace gshrink
