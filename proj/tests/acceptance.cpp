// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero if any criterion fails. Tolerances are fixed below.

#include "gshrink/connectivity.hpp"
#include "gshrink/io.hpp"
#include "gshrink/multitaper.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/shrinkage.hpp"
#include "gshrink/simulation.hpp"
#include "gshrink/smoothing.hpp"
#include "gshrink/var.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gshrink;
using std::numbers::pi;

namespace {

// Criterion 1 / 5
constexpr std::size_t kMonteCarloReps = 20;
constexpr std::uint64_t kMonteCarloSeed = 2024;
constexpr double kPcohSlack = 1.1;
constexpr double kPeakWeight = 0.5;
constexpr long kPeakHalfWidth = 2;
const std::vector<int> kWindows{15, 7, 31};
// Criterion 2
constexpr double kLyapunovRelError = 1e-3;
// Criterion 3
constexpr double kCoefficientError = 0.05;
constexpr int kBicHits = 18;
constexpr double kOlsAgreement = 1e-9;
// Criterion 4
constexpr double kPcohTwoChannel = 1e-12;
constexpr double kPcohCompound = 1e-10;
constexpr double kPcohRescale = 1e-10;
constexpr double kPcohCofactor = 1e-9;
// Criterion 5
constexpr double kScaleEquivariance = 1e-10;
// Criterion 7
constexpr double kHandExample = 1e-9;
constexpr int kPowerHits = 18;
constexpr int kMaxFalseHits = 3;
// Criterion 8
constexpr double kWhiteNoiseRel = 0.10;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail << " [exception: " << e.what() << "]";
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!out.pass) ++failures;
  std::cout << (out.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << "):" << out.detail.str()
            << " (" << std::fixed;
  std::cout.precision(1);
  std::cout << secs << " s)" << std::endl;
  std::cout.unsetf(std::ios::fixed);
  std::cout.precision(6);
}

double relative_error_lyapunov(const std::vector<RMatrix>& phi, const RMatrix& sigma) {
  const FrequencyGrid g(1024);
  const auto v = var_spectrum(VarModel{phi, sigma}, g);
  CMatrix sum = CMatrix::Zero(sigma.rows(), sigma.cols());
  for (long k = 0; k < 1024; ++k) {
    const auto m = g.mirror(k);
    sum += m.conjugate ? CMatrix(v[m.index].conjugate()) : v[m.index];
  }
  const RMatrix gamma = oracle::lyapunov_covariance(phi, sigma);
  return ((2 * pi / 1024.0 * sum).real() - gamma).norm() / gamma.norm();
}

// ---------------------------------------------------------------- 1 and 5

const MonteCarloResult& monte_carlo() {
  static const MonteCarloResult result = [] {
    MonteCarloOptions o;
    o.reps = kMonteCarloReps;
    o.seed = kMonteCarloSeed;
    o.pipeline.window = kWindows[0];
    o.extra_windows.assign(kWindows.begin() + 1, kWindows.end());
    return monte_carlo_compare(SimulationConfig::paper_defaults(), o);
  }();
  return result;
}

// Orderings (a) and (b) for one shrinkage column.
void check_orderings(Outcome& out, const MonteCarloResult& r, const std::string& column) {
  const double s = r.integrated(r.mse_spectral, column);
  const double sm = r.integrated(r.mse_spectral, "smoothed");
  const double mt = r.integrated(r.mse_spectral, "multitaper");
  const double pc = r.integrated(r.mse_pcoh, column);
  const double best = std::min({r.integrated(r.mse_pcoh, "var"), r.integrated(r.mse_pcoh, "smoothed"),
                                r.integrated(r.mse_pcoh, "multitaper")});
  out.detail << " " << column << ": spec " << s << " pcoh " << pc << ";";
  out.require(s <= sm, column + " spectral MSE <= smoothed");
  out.require(s <= mt, column + " spectral MSE <= multitaper");
  out.require(pc <= kPcohSlack * best, column + " pcoh MSE <= 1.1 x best competitor");
}

void criterion1(Outcome& out) {
  const auto& r = monte_carlo();
  out.detail << " reps " << r.reps << "; var spec " << r.integrated(r.mse_spectral, "var") << " pcoh "
             << r.integrated(r.mse_pcoh, "var") << "; smoothed spec " << r.integrated(r.mse_spectral, "smoothed")
             << " pcoh " << r.integrated(r.mse_pcoh, "smoothed") << "; multitaper spec "
             << r.integrated(r.mse_spectral, "multitaper") << " pcoh " << r.integrated(r.mse_pcoh, "multitaper")
             << ";";
  check_orderings(out, r, "shrinkage");

  const auto peaks = var_peak_indices(SimulationConfig::paper_defaults(), r.grid);
  out.require(!peaks.empty(), "true VAR spectrum has a peak");
  for (auto j : peaks) {
    double acc = 0;
    int count = 0;
    for (long k = -kPeakHalfWidth; k <= kPeakHalfWidth; ++k) {
      const long idx = long(j) + k;
      if (idx < 0 || idx >= long(r.grid.size())) continue;
      acc += r.mean_weight[0][std::size_t(idx)];
      ++count;
    }
    const double w = acc / count;
    out.detail << " mean weight near peak " << r.grid.hz(j) << " Hz: " << w << ";";
    out.require(w > kPeakWeight, "mean weight > 0.5 within +-2 bins of each VAR peak");
  }
}

// ---------------------------------------------------------------- 2

void criterion2(Outcome& out) {
  std::mt19937_64 rng(20);
  std::normal_distribution<double> d;
  double worst = 0;
  for (int m = 0; m < 20; ++m) {
    const int p = 1 + m % 4;
    const int order = 1 + m % 2;
    std::vector<RMatrix> phi;
    for (int k = 0; k < order; ++k) {
      RMatrix a(p, p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) a(i, j) = 0.4 * d(rng);
      }
      phi.push_back(a);
    }
    // Shrink until the model is comfortably stable.
    for (double radius = companion_spectral_radius(phi); radius >= 0.9; radius = companion_spectral_radius(phi)) {
      for (std::size_t k = 0; k < phi.size(); ++k) phi[k] *= std::pow(0.85, double(k + 1));
    }
    RMatrix l(p, p);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) l(i, j) = d(rng);
    }
    const RMatrix sigma = l * l.transpose() + 0.1 * RMatrix::Identity(p, p);
    worst = std::max(worst, relative_error_lyapunov(phi, sigma));
  }
  out.detail << " worst relative error over 20 models " << worst;
  out.require(worst < kLyapunovRelError, "relative error < 1e-3");
}

// ---------------------------------------------------------------- 3

void criterion3(Outcome& out) {
  RMatrix phi1(3, 3), phi2(3, 3);
  phi1 << 0.5, 0.1, 0.0, 0.0, 0.4, 0.1, 0.1, 0.0, 0.3;
  phi2 << -0.4, 0.0, 0.0, 0.0, -0.3, 0.0, 0.0, 0.05, -0.35;
  const RMatrix sigma = RMatrix::Identity(3, 3);
  double worst = 0;
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto x = test::var_trials({phi1, phi2}, sigma, 50, 256, 3000 + seed);
    const auto fit = fit_var_ls(x, 2);
    worst = std::max({worst, (fit.coefficients[0] - phi1).cwiseAbs().maxCoeff(),
                      (fit.coefficients[1] - phi2).cwiseAbs().maxCoeff()});
    hits += bic_select_order(x, 6).order == 2;
  }
  double ols = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto one = test::var_trials({phi1, phi2}, sigma, 1, 256, 4000 + seed);
    for (std::size_t k : {1u, 2u, 3u}) {
      const auto fit = fit_var_ls(one, k);
      const auto ref = oracle::single_trial_ols(one.trial(0), k);
      for (std::size_t i = 0; i < k; ++i) ols = std::max(ols, (fit.coefficients[i] - ref.phi[i]).cwiseAbs().maxCoeff());
      ols = std::max(ols, (fit.sigma_z - ref.sigma).cwiseAbs().maxCoeff());
    }
  }
  out.detail << " max coefficient error " << worst << "; BIC picked 2 in " << hits << "/20; N=1 vs OLS " << ols;
  out.require(worst < kCoefficientError, "coefficient error < 0.05");
  out.require(hits >= kBicHits, "BIC order 2 in >= 18/20");
  out.require(ols < kOlsAgreement, "single-trial OLS agreement 1e-9");
}

// ---------------------------------------------------------------- 4

void criterion4(Outcome& out) {
  std::mt19937_64 rng(40);
  double two = 0;
  for (int i = 0; i < 100; ++i) {
    const CMatrix f = test::random_hpd(2, rng);
    const double coh = std::norm(f(0, 1)) / (f(0, 0).real() * f(1, 1).real());
    two = std::max(two, std::abs(partial_coherence(f)(0, 1) - coh));
  }
  CMatrix cs = CMatrix::Constant(3, 3, 0.5);
  cs.diagonal().setOnes();
  const double compound = std::abs(partial_coherence(cs)(0, 1) - 1.0 / 9.0);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  double rescale = 0, cofactor = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t p = 1 + i % 5;
    const CMatrix f = test::random_hpd(p, rng);
    const RMatrix r = partial_coherence(f);
    Eigen::VectorXcd dv(p);
    for (std::size_t k = 0; k < p; ++k) dv(k) = u(rng);
    rescale = std::max(rescale, (partial_coherence(CMatrix(dv.asDiagonal() * f * dv.asDiagonal())) - r).cwiseAbs().maxCoeff());
    const CMatrix g = oracle::cofactor_inverse(f);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        if (a == b) continue;
        cofactor = std::max(cofactor, std::abs(r(a, b) - std::norm(g(a, b)) / (g(a, a).real() * g(b, b).real())));
      }
    }
  }
  out.detail << " (a) " << two << " (b) " << compound << " (c) " << rescale << " (d) " << cofactor;
  out.require(two <= kPcohTwoChannel, "(a) P=2 equals coherence");
  out.require(compound <= kPcohCompound, "(b) compound symmetric 1/9");
  out.require(rescale <= kPcohRescale, "(c) rescaling invariance");
  out.require(cofactor <= kPcohCofactor, "(d) cofactor oracle");
}

// ---------------------------------------------------------------- 5

void criterion5(Outcome& out) {
  auto exact = [&](double a, double b, double d, double raw, double clamped, const char* label) {
    const auto w = shrinkage_weight(a, b, d);
    out.require(w.raw == raw && w.clamped == clamped, label);
  };
  exact(0.0, 0.3, 0.3, 1.0, 1.0, "(0,b,b) -> 1");
  exact(0.4, 0.0, 0.4, 0.0, 0.0, "(a,0,a) -> 0");
  exact(0.8, 0.8, 0.8, 0.5, 0.5, "(d,d,d) -> 0.5");
  const auto w = shrinkage_weight(0.1, 0.2, 1.0);
  out.require(std::abs(w.raw - 0.55) < 1e-15 && w.clamped == w.raw, "(0.1,0.2,1) -> 0.55");
  const auto hi = shrinkage_weight(0.0, 3.0, 1.0), lo = shrinkage_weight(5.0, 0.0, 1.0);
  out.require(hi.raw > 1.0 && hi.clamped == 1.0 && lo.raw < 0.0 && lo.clamped == 0.0, "clamping exact");

  auto config = SimulationConfig::paper_defaults();
  config.trials = 40;
  config.seed = 55;
  const auto data = simulate_mixture(config);
  const auto fit = full_pipeline(data);
  const double c = 7.3;
  auto scaled = [&](const SpectralEstimate& e) {
    SpectralEstimate s = e;
    for (auto& m : s.matrices) m *= c;
    return s;
  };
  double worst = 0;
  for (int window : kWindows) {
    const auto base = shrinkage_diagnostics(fit.var_estimate, fit.smoothed.estimate, fit.mean_periodogram, window);
    const auto sc = shrinkage_diagnostics(scaled(fit.var_estimate), scaled(fit.smoothed.estimate),
                                          scaled(fit.mean_periodogram), window);
    for (std::size_t j = 0; j < base.alpha2.size(); ++j) {
      worst = std::max({worst, std::abs(sc.alpha2[j] / (c * c) - base.alpha2[j]) / base.alpha2[j],
                        std::abs(sc.beta2[j] / (c * c) - base.beta2[j]) / base.beta2[j],
                        std::abs(sc.delta2[j] / (c * c) - base.delta2[j]) / base.delta2[j],
                        std::abs(sc.weight_raw[j] - base.weight_raw[j]) / std::max(1.0, std::abs(base.weight_raw[j]))});
    }
  }
  out.detail << " scale equivariance worst " << worst << ";";
  out.require(worst <= kScaleEquivariance, "scale equivariance 1e-10");

  const auto& r = monte_carlo();
  for (std::size_t i = 1; i < kWindows.size(); ++i) check_orderings(out, r, "shrinkage_c" + std::to_string(kWindows[i]));
}

// ---------------------------------------------------------------- 6

void criterion6(Outcome& out) {
  std::vector<int> grid;
  for (int h = 3; h <= 63; h += 4) grid.push_back(h);
  int checked = 0, argmin_failures = 0, ordered = 0;
  std::vector<double> white_all, peaked_all;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    std::vector<double> white, peaked;
    for (int which = 0; which < 2; ++which) {
      const auto x = which == 0 ? test::white_noise(20, 2, 256, 6000 + seed)
                                : test::ar2_trials(20, 2, 256, 1.4, -0.9, 6000 + seed);
      const auto set = compute_periodograms(x);
      for (std::size_t n = 0; n < 20; ++n) {
        const auto sel = pure_select_span(set, n, grid);
        // Exhaustive re-evaluation of every candidate.
        const auto pilot = loo_pilot(set, n);
        double best = 0;
        int arg = -1;
        for (int h : grid) {
          const double risk = integrated_distance(pilot, smooth_periodogram(set.per_trial[n], h, set.grid), set.grid);
          if (arg < 0 || risk < best) {
            best = risk;
            arg = h;
          }
        }
        ++checked;
        argmin_failures += sel.span != arg;
        (which == 0 ? white : peaked).push_back(sel.span);
      }
    }
    ordered += test::median(white) >= test::median(peaked);
    white_all.insert(white_all.end(), white.begin(), white.end());
    peaked_all.insert(peaked_all.end(), peaked.begin(), peaked.end());
  }
  out.detail << " argmin verified on " << checked << " selections (" << argmin_failures
             << " mismatches); median span white " << test::median(white_all) << " vs AR(2) "
             << test::median(peaked_all) << "; per-seed ordering held in " << ordered << "/20";
  out.require(argmin_failures == 0, "exhaustive argmin");
  out.require(test::median(white_all) >= test::median(peaked_all), "median white >= median AR(2)");
  out.require(ordered == 20, "ordering in every seed");
}

// ---------------------------------------------------------------- 7

// Two conditions, four channels, 128 Hz. A narrowband AR(2) latent near
// 10 Hz drives channels 1 and 2. In condition "coupled" both channels share
// one latent draw; in "uncoupled" each has its own, so marginal spectra are
// identical and only the (1,2) coupling differs. Channels 3 and 4 are noise.
// The gain keeps the true beta-band partial coherence of (1,2) near 1e-3, so
// the coupling is confined to the alpha band.
MultiTrialSeries power_condition(bool coupled, std::uint64_t seed) {
  constexpr std::size_t n = 30, t_len = 256, p = 4;
  constexpr double rate = 128.0, hz = 10.0, radius = 0.97, gain = 0.15;
  const double theta = 2 * pi * hz / rate;
  const std::vector<RMatrix> ar{RMatrix::Constant(1, 1, 2 * radius * std::cos(theta)),
                                RMatrix::Constant(1, 1, -radius * radius)};
  std::vector<RMatrix> trials;
  for (std::size_t i = 0; i < n; ++i) {
    NormalGenerator noise(derive_seed(seed, i, 21));
    RMatrix x(p, t_len);
    for (Eigen::Index t = 0; t < x.cols(); ++t) {
      for (Eigen::Index c = 0; c < x.rows(); ++c) x(c, t) = noise();
    }
    const RMatrix s1 = simulate_var(ar, RMatrix::Identity(1, 1), t_len, 500, derive_seed(seed, i, 22));
    const RMatrix s2 = coupled ? s1 : simulate_var(ar, RMatrix::Identity(1, 1), t_len, 500, derive_seed(seed, i, 23));
    x.row(0) += gain * s1.row(0);
    x.row(1) += gain * s2.row(0);
    trials.push_back(std::move(x));
  }
  return MultiTrialSeries(std::move(trials), rate);
}

void criterion7(Outcome& out) {
  std::mt19937_64 rng(70);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int bh_mismatch = 0;
  for (int c = 0; c < 1000; ++c) {
    const std::size_t m = 1 + rng() % 12;
    std::vector<double> p(m);
    for (auto& v : p) v = c % 2 ? u(rng) * 0.1 : u(rng);
    if (c % 5 == 0 && m > 1) p[1] = p[0];
    bh_mismatch += bh_fdr(p, 0.05) != oracle::brute_force_bh(p, 0.05);
  }
  out.detail << " BH mismatches " << bh_mismatch << "/1000;";
  out.require(bh_mismatch == 0, "BH brute force");

  const auto t = welch_t({1.0, 0.5, 20}, {0.0, 0.5, 20});
  const auto j = jackknife({1, 2, 3});
  out.require(std::abs(t.t - std::sqrt(2.0)) < kHandExample, "Welch t = sqrt 2");
  out.require(welch_t({0.3, 0.2, 9}, {0.3, 0.1, 9}).t == 0.0 && welch_t({0.3, 0.2, 9}, {0.3, 0.1, 9}).p == 1.0,
              "equal means t = 0, p = 1");
  out.require(std::abs(j.mean - 2.0) < kHandExample && std::abs(j.se - 1.1547005383792515) < kHandExample,
              "jackknife (1,2,3)");

  PipelineOptions o;
  o.k_max = 8;
  int target_hits = 0, worst_other = 0;
  std::vector<int> other_hits(12, 0);  // 6 pairs x 2 bands
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto left = jackknife_band_stats(power_condition(false, 7000 + seed), default_bands(), o);
    const auto right = jackknife_band_stats(power_condition(true, 8000 + seed), default_bands(), o);
    const auto tests = compare_conditions(left, right, 0.05);
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto& r = tests[i];
      const bool target = r.band == "alpha" && r.channel_a == 0 && r.channel_b == 1;
      if (target) {
        target_hits += r.rejected;
      } else {
        other_hits[i] += r.rejected;
      }
    }
  }
  worst_other = *std::max_element(other_hits.begin(), other_hits.end());
  out.detail << " power: pair (1,2) alpha rejected " << target_hits << "/20, worst other cell " << worst_other << "/20";
  out.require(target_hits >= kPowerHits, "power >= 18/20");
  out.require(worst_other <= kMaxFalseHits, "no systematic rejections elsewhere");
}

// ---------------------------------------------------------------- 8

void criterion8(Outcome& out) {
  const auto x = test::white_noise(120, 3, 256, 8080);
  const double level = 1 / (2 * pi);
  const auto fit = full_pipeline(x);
  const auto mt = multitaper_estimator(x, std::size_t(pure_select_ntapers(x, default_taper_grid(256)).median));
  const std::vector<std::pair<std::string, const SpectralEstimate*>> ests{
      {"smoothed", &fit.smoothed.estimate}, {"multitaper", &mt}, {"var", &fit.var_estimate}, {"shrinkage", &fit.estimate}};
  for (const auto& [name, est] : ests) {
    double worst = 0;
    for (auto j : test::interior(est->grid)) {
      for (int p = 0; p < 3; ++p) worst = std::max(worst, std::abs((*est)[j](p, p).real() / level - 1.0));
    }
    out.detail << " " << name << " " << worst << ";";
    out.require(worst <= kWhiteNoiseRel, name + " within 10%");
  }
}

// ---------------------------------------------------------------- 9

void criterion9(Outcome& out) {
  auto config = SimulationConfig::paper_defaults();
  config.seed = 99;
  const auto a = simulate_mixture(config), b = simulate_mixture(config);
  const std::string ea = io::encode_trials(a), eb = io::encode_trials(b);
  out.require(ea == eb, "simulation bit-identical");

  const auto decoded = io::decode_trials(ea);
  bool same = decoded.channel_labels() == a.channel_labels() && decoded.sampling_rate() == a.sampling_rate();
  for (std::size_t n = 0; n < a.trials() && same; ++n) {
    same = std::memcmp(decoded.trial(n).data(), a.trial(n).data(), sizeof(double) * a.channels() * a.samples()) == 0;
  }
  out.require(same && io::encode_trials(decoded) == ea, "trial file round trip");

  config.trials = 30;
  const auto small = simulate_mixture(config);
  const auto f1 = full_pipeline(small), f2 = full_pipeline(small);
  bool pipeline_same = true;
  for (std::size_t j = 0; j < f1.estimate.size(); ++j) {
    pipeline_same &= std::memcmp(f1.estimate[j].data(), f2.estimate[j].data(), sizeof(Complex) * 144) == 0;
    pipeline_same &= f1.diagnostics.weight_raw[j] == f2.diagnostics.weight_raw[j];
  }
  out.require(pipeline_same, "pipeline bit-identical");

  config.trials = 10;
  config.samples = 128;
  MonteCarloOptions o;
  o.reps = 2;
  o.seed = 3;
  o.pipeline.k_max = 6;
  const auto m1 = monte_carlo_compare(config, o), m2 = monte_carlo_compare(config, o);
  out.require(m1.mse_spectral == m2.mse_spectral && m1.mse_pcoh == m2.mse_pcoh && m1.mean_weight == m2.mean_weight,
              "Monte Carlo curves bit-identical");
  out.detail << " trial file " << ea.size() << " bytes round-tripped; simulation, pipeline and Monte Carlo reruns compared";
}

}  // namespace

int main() {
  report(1, "simulation-study reproduction", criterion1);
  report(2, "VAR spectrum Lyapunov oracle", criterion2);
  report(3, "N-trial LS recovery and BIC", criterion3);
  report(4, "partial-coherence oracles", criterion4);
  report(5, "shrinkage-weight algebra and C_T stability", criterion5);
  report(6, "PURE behaviour", criterion6);
  report(7, "inference stack", criterion7);
  report(8, "white-noise estimator sanity", criterion8);
  report(9, "determinism and format round-trips", criterion9);
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
