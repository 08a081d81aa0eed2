#include "gshrink/core.hpp"

#include "gshrink/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace gshrink {

FrequencyGrid::FrequencyGrid(std::size_t samples, double sampling_rate)
    : samples_(samples), sampling_rate_(sampling_rate) {
  if (samples == 0) throw DimensionError("frequency grid needs at least one sample");
  if (!(sampling_rate > 0.0) || !std::isfinite(sampling_rate)) {
    throw DomainError("sampling rate must be positive and finite");
  }
}

double FrequencyGrid::omega(std::size_t j) const {
  return 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(samples_);
}

double FrequencyGrid::hz(std::size_t j) const {
  return sampling_rate_ * static_cast<double>(j) / static_cast<double>(samples_);
}

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> out(size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = omega(j);
  return out;
}

FrequencyGrid::Mirror FrequencyGrid::mirror(long k) const {
  const long n = static_cast<long>(samples_);
  long r = k % n;
  if (r < 0) r += n;
  if (2 * r <= n) return {static_cast<std::size_t>(r), false};
  return {static_cast<std::size_t>(n - r), true};
}

std::string_view to_string(EstimatorTag tag) {
  switch (tag) {
    case EstimatorTag::raw_mean: return "raw_mean";
    case EstimatorTag::smoothed: return "smoothed";
    case EstimatorTag::var: return "var";
    case EstimatorTag::multitaper: return "multitaper";
    case EstimatorTag::shrinkage: return "shrinkage";
    case EstimatorTag::truth: return "truth";
  }
  return "unknown";
}

double hs_norm_sq(const CMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("hs_norm_sq needs a nonempty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return a.squaredNorm() / static_cast<double>(a.rows());
}

double hs_norm_sq(const RMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw DimensionError("hs_norm_sq needs a nonempty square matrix, got " +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
  return a.squaredNorm() / static_cast<double>(a.rows());
}

double hs_distance_sq(const CMatrix& a, const CMatrix& b, bool conjugate_b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hs_distance_sq: shape mismatch");
  }
  const Eigen::Index n = a.size();
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  double acc = 0.0;
  if (conjugate_b) {
    for (Eigen::Index i = 0; i < n; ++i) acc += std::norm(pa[i] - std::conj(pb[i]));
  } else {
    for (Eigen::Index i = 0; i < n; ++i) acc += std::norm(pa[i] - pb[i]);
  }
  return acc / static_cast<double>(a.rows());
}

CMatrix hermitize(const CMatrix& a) {
  return (0.5 * (a + a.adjoint())).eval();
}

ValidityReport validate_spectral(const CMatrix& a, const SpectralTolerance& tol) {
  if (a.rows() != a.cols()) throw DimensionError("validate_spectral needs a square matrix");
  ValidityReport report;
  const double scale = a.cwiseAbs().maxCoeff();
  report.hermitian_deviation = (a - a.adjoint()).cwiseAbs().maxCoeff();
  report.hermitian = report.hermitian_deviation <= tol.hermitian * scale;

  // Eigenvalues of the Hermitian part; for a Hermitian input this is exact.
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitize(a), Eigen::EigenvaluesOnly);
  report.min_eigenvalue = solver.eigenvalues().minCoeff();
  const double trace = std::abs(a.trace().real());
  report.psd = report.min_eigenvalue >= -tol.psd * trace;

  report.real_nonnegative_diagonal = true;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    const Complex d = a(p, p);
    if (std::abs(d.imag()) > tol.hermitian * scale || d.real() < -tol.psd * trace) {
      report.real_nonnegative_diagonal = false;
    }
  }
  return report;
}

void check_sequence(const MatrixSequence& seq, const FrequencyGrid& grid, std::string_view what) {
  if (seq.size() != grid.size()) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(grid.size()) +
                         " frequencies, got " + std::to_string(seq.size()));
  }
  if (seq.empty()) return;
  const Eigen::Index p = seq.front().rows();
  for (const auto& m : seq) {
    if (m.rows() != p || m.cols() != p) {
      throw DimensionError(std::string(what) + ": inconsistent matrix shape across frequencies");
    }
  }
}

}  // namespace gshrink
