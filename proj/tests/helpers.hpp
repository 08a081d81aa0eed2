#pragma once

#include "gshrink/core.hpp"
#include "gshrink/simulation.hpp"
#include "gshrink/timeseries.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace gshrink::test {

inline MultiTrialSeries white_noise(std::size_t n, std::size_t p, std::size_t t, std::uint64_t seed,
                                    double rate = 1.0) {
  std::vector<RMatrix> trials;
  for (std::size_t i = 0; i < n; ++i) {
    NormalGenerator g(derive_seed(seed, i, 11));
    RMatrix x(p, t);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      for (Eigen::Index r = 0; r < x.rows(); ++r) x(r, c) = g();
    }
    trials.push_back(std::move(x));
  }
  return MultiTrialSeries(std::move(trials), rate);
}

inline MultiTrialSeries var_trials(const std::vector<RMatrix>& coeffs, const RMatrix& sigma, std::size_t n,
                                   std::size_t t, std::uint64_t seed, double rate = 1.0) {
  std::vector<RMatrix> trials;
  for (std::size_t i = 0; i < n; ++i) trials.push_back(simulate_var(coeffs, sigma, t, 200, derive_seed(seed, i, 12)));
  return MultiTrialSeries(std::move(trials), rate);
}

// P independent channels of the same AR(2).
inline MultiTrialSeries ar2_trials(std::size_t n, std::size_t p, std::size_t t, double phi1, double phi2,
                                   std::uint64_t seed) {
  const auto eye = RMatrix::Identity(p, p);
  return var_trials({phi1 * eye, phi2 * eye}, eye, n, t, seed);
}

inline CMatrix random_complex(std::size_t p, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  CMatrix a(p, p);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = Complex(d(rng), d(rng));
  }
  return a;
}

// Random Hermitian positive definite matrix.
inline CMatrix random_hpd(std::size_t p, std::mt19937_64& rng) {
  const CMatrix a = random_complex(p, rng);
  return a * a.adjoint() + 0.1 * CMatrix::Identity(p, p);
}

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// Interior grid indices, excluding the first and last `margin` bins.
inline std::vector<std::size_t> interior(const FrequencyGrid& grid, std::size_t margin = 2) {
  std::vector<std::size_t> out;
  for (std::size_t j = margin; j + margin < grid.size(); ++j) out.push_back(j);
  return out;
}

}  // namespace gshrink::test
