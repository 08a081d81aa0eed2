#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string_view>
#include <vector>

namespace gshrink {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

// One P x P complex matrix per frequency of a FrequencyGrid.
using MatrixSequence = std::vector<CMatrix>;

// Fourier frequencies w_j = 2*pi*j/T for j = 0..floor(T/2), in radians per
// sample. Negative frequencies are never stored; they follow from conjugate
// symmetry of spectra of real-valued series.
class FrequencyGrid {
 public:
  explicit FrequencyGrid(std::size_t samples, double sampling_rate = 1.0);

  std::size_t samples() const { return samples_; }
  double sampling_rate() const { return sampling_rate_; }
  std::size_t size() const { return samples_ / 2 + 1; }

  double omega(std::size_t j) const;
  double hz(std::size_t j) const;
  std::vector<double> frequencies() const;

  // Maps an integer offset on the full circle (any sign, any magnitude) to
  // its half-grid index. `conjugate` is set when the full-circle value is
  // the complex conjugate of the stored one.
  struct Mirror {
    std::size_t index;
    bool conjugate;
  };
  Mirror mirror(long k) const;

  bool operator==(const FrequencyGrid& other) const {
    return samples_ == other.samples_ && sampling_rate_ == other.sampling_rate_;
  }

 private:
  std::size_t samples_;
  double sampling_rate_;
};

enum class EstimatorTag { raw_mean, smoothed, var, multitaper, shrinkage, truth };

std::string_view to_string(EstimatorTag tag);

struct SpectralEstimate {
  FrequencyGrid grid;
  MatrixSequence matrices;
  EstimatorTag tag = EstimatorTag::raw_mean;

  std::size_t channels() const { return matrices.empty() ? 0 : matrices.front().rows(); }
  std::size_t size() const { return matrices.size(); }
  const CMatrix& operator[](std::size_t j) const { return matrices[j]; }
  CMatrix& operator[](std::size_t j) { return matrices[j]; }
};

// Normalized Hilbert-Schmidt norm squared, P^-1 tr(A A^*).
double hs_norm_sq(const CMatrix& a);
double hs_norm_sq(const RMatrix& a);

// Squared normalized Hilbert-Schmidt distance, optionally conjugating `b`.
double hs_distance_sq(const CMatrix& a, const CMatrix& b, bool conjugate_b = false);

struct SpectralTolerance {
  double hermitian = 1e-10;  // relative to max |A_pq|
  double psd = 1e-8;         // relative to |trace|
};

struct ValidityReport {
  double hermitian_deviation = 0.0;
  double min_eigenvalue = 0.0;
  bool hermitian = false;
  bool psd = false;
  bool real_nonnegative_diagonal = false;
  bool ok() const { return hermitian && psd && real_nonnegative_diagonal; }
};

ValidityReport validate_spectral(const CMatrix& a, const SpectralTolerance& tol = {});

// (A + A^*) / 2.
CMatrix hermitize(const CMatrix& a);

// Fails with DimensionError unless every matrix is P x P and the sequence
// length matches the grid.
void check_sequence(const MatrixSequence& seq, const FrequencyGrid& grid, std::string_view what);

}  // namespace gshrink
