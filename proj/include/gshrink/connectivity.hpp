#pragma once

#include "gshrink/core.hpp"
#include "gshrink/shrinkage.hpp"
#include "gshrink/timeseries.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace gshrink {

enum class ConnectivityKind { coherence, partial_coherence };

// Per-frequency symmetric real matrices with unit diagonal.
struct ConnectivityResult {
  FrequencyGrid grid;
  std::vector<RMatrix> matrices;
  ConnectivityKind kind = ConnectivityKind::partial_coherence;
};

// Partial coherence inversion fails above this condition number.
inline constexpr double kMaxSpectralCondition = 1e12;

// |f_pq|^2 / (f_pp f_qq).
ConnectivityResult coherence(const SpectralEstimate& f);

// rho_pq = |Gamma_pq|^2 with Gamma = -h g h, g = f^-1, h = diag(g_pp^-1/2).
ConnectivityResult partial_coherence(const SpectralEstimate& f);
RMatrix partial_coherence(const CMatrix& f, std::size_t frequency_index = 0);

struct Band {
  std::string name;
  double lo_hz = 0.0;
  double hi_hz = 0.0;
};

// alpha 8-12 Hz and beta 18-30 Hz.
std::vector<Band> default_bands();

// Grid indices with lo <= hz <= hi (inclusive).
std::vector<std::size_t> band_indices(const FrequencyGrid& grid, const Band& band);

struct BandConnectivity {
  Band band;
  RMatrix matrix;
  ConnectivityKind kind = ConnectivityKind::partial_coherence;
};

BandConnectivity band_average(const ConnectivityResult& result, const Band& band);

// atanh(sqrt(rho)) for 0 <= rho < 1.
double fisher_z(double rho);

struct JackknifeSummary {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

// Mean and sqrt((n-1)/n * sum (z_i - mean)^2) of leave-one-out replicates.
JackknifeSummary jackknife(const std::vector<double>& replicates);

struct BandJackknife {
  Band band;
  RMatrix mean_z;  // jackknife mean of Fisher-Z band partial coherence
  RMatrix se;
  std::size_t n = 0;
  std::vector<RMatrix> replicates;  // per left-out trial
};

// Leave-one-trial-out reruns of the full shrinkage pipeline; each replicate
// is band-averaged partial coherence on the Fisher-Z scale.
std::vector<BandJackknife> jackknife_band_stats(const MultiTrialSeries& trials, const std::vector<Band>& bands,
                                                const PipelineOptions& options = {});

struct TTest {
  double t = 0.0;
  double df = 0.0;
  double p = 1.0;
  bool infinite = false;
};

// Two-sample Welch t statistic from point estimates and standard errors.
TTest welch_t(const JackknifeSummary& a, const JackknifeSummary& b);

// Benjamini-Hochberg step-up rejections at level q, in input order.
std::vector<bool> bh_fdr(const std::vector<double>& pvalues, double q = 0.05);

struct PairTest {
  std::string band;
  std::size_t channel_a = 0;
  std::size_t channel_b = 0;
  double z_left = 0.0;
  double z_right = 0.0;
  double se_left = 0.0;
  double se_right = 0.0;
  TTest test;
  bool rejected = false;
};

// Welch tests for every off-diagonal pair in every band, with BH-FDR
// applied jointly over all bands and pairs.
std::vector<PairTest> compare_conditions(const std::vector<BandJackknife>& left,
                                         const std::vector<BandJackknife>& right, double q = 0.05);

}  // namespace gshrink
