#include "gshrink/connectivity.hpp"
#include "gshrink/errors.hpp"
#include "gshrink/io.hpp"
#include "gshrink/multitaper.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/shrinkage.hpp"
#include "gshrink/simulation.hpp"
#include "gshrink/smoothing.hpp"
#include "gshrink/var.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

namespace py = pybind11;
using namespace gshrink;

namespace {

using RealArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

// (N, P, T) array -> trials.
MultiTrialSeries to_series(const RealArray& data, double sampling_rate) {
  if (data.ndim() != 3) throw DimensionError("trial data must have shape (trials, channels, samples)");
  const auto n = static_cast<std::size_t>(data.shape(0));
  const auto p = static_cast<Eigen::Index>(data.shape(1));
  const auto t = static_cast<Eigen::Index>(data.shape(2));
  auto view = data.unchecked<3>();
  std::vector<RMatrix> trials(n, RMatrix(p, t));
  for (std::size_t i = 0; i < n; ++i)
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index s = 0; s < t; ++s) trials[i](a, s) = view(i, a, s);
  return MultiTrialSeries(std::move(trials), sampling_rate);
}

RealArray from_series(const MultiTrialSeries& series) {
  RealArray out({series.trials(), series.channels(), series.samples()});
  auto view = out.mutable_unchecked<3>();
  for (std::size_t i = 0; i < series.trials(); ++i)
    for (std::size_t a = 0; a < series.channels(); ++a)
      for (std::size_t s = 0; s < series.samples(); ++s)
        view(i, a, s) = series.trial(i)(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(s));
  return out;
}

ComplexArray from_sequence(const MatrixSequence& seq) {
  const std::size_t p = seq.empty() ? 0 : static_cast<std::size_t>(seq.front().rows());
  ComplexArray out({seq.size(), p, p});
  auto view = out.mutable_unchecked<3>();
  for (std::size_t j = 0; j < seq.size(); ++j)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        view(j, a, b) = seq[j](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return out;
}

SpectralEstimate to_estimate(const ComplexArray& arr, std::size_t samples, double sampling_rate) {
  if (arr.ndim() != 3 || arr.shape(1) != arr.shape(2)) {
    throw DimensionError("spectral array must have shape (frequencies, channels, channels)");
  }
  const FrequencyGrid grid(samples, sampling_rate);
  if (static_cast<std::size_t>(arr.shape(0)) != grid.size()) {
    throw DimensionError("spectral array has " + std::to_string(arr.shape(0)) + " frequencies, expected " +
                         std::to_string(grid.size()) + " for " + std::to_string(samples) + " samples");
  }
  const auto p = static_cast<Eigen::Index>(arr.shape(1));
  auto view = arr.unchecked<3>();
  SpectralEstimate est{grid, {}, EstimatorTag::raw_mean};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    CMatrix m(p, p);
    for (Eigen::Index a = 0; a < p; ++a)
      for (Eigen::Index b = 0; b < p; ++b) m(a, b) = view(j, a, b);
    est.matrices.push_back(std::move(m));
  }
  return est;
}

py::array_t<double> from_real_sequence(const std::vector<RMatrix>& seq) {
  const std::size_t p = seq.empty() ? 0 : static_cast<std::size_t>(seq.front().rows());
  py::array_t<double> out({seq.size(), p, p});
  auto view = out.mutable_unchecked<3>();
  for (std::size_t j = 0; j < seq.size(); ++j)
    for (std::size_t a = 0; a < p; ++a)
      for (std::size_t b = 0; b < p; ++b)
        view(j, a, b) = seq[j](static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  return out;
}

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

py::array_t<double> stack_coefficients(const std::vector<RMatrix>& coeffs) { return from_real_sequence(coeffs); }

PipelineOptions make_options(std::size_t k_max, std::optional<std::size_t> order, std::optional<int> span,
                             std::optional<std::vector<int>> span_grid, int window,
                             std::optional<double> weight) {
  PipelineOptions o;
  o.k_max = k_max;
  o.fixed_order = order;
  o.smoothing.fixed_span = span;
  if (span_grid) o.smoothing.span_grid = *span_grid;
  o.window = window;
  o.fixed_weight = weight;
  return o;
}

std::vector<Band> to_bands(const std::vector<std::tuple<std::string, double, double>>& bands) {
  std::vector<Band> out;
  for (const auto& [name, lo, hi] : bands) out.push_back({name, lo, hi});
  return out;
}

}  // namespace

PYBIND11_MODULE(_gshrink, m) {
  m.doc() = "Generalized shrinkage spectral estimation for multi-trial time series";

  auto base = py::register_exception<Error>(m, "GshrinkError", PyExc_RuntimeError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", base.ptr());
  py::register_exception<DegenerateChannelError>(m, "DegenerateChannelError", base.ptr());
  py::register_exception<RankDeficiencyError>(m, "RankDeficiencyError", base.ptr());
  py::register_exception<ConditioningError>(m, "ConditioningError", base.ptr());
  py::register_exception<StabilityError>(m, "StabilityError", base.ptr());
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  m.def(
      "frequencies",
      [](std::size_t samples, double fs) {
        const FrequencyGrid g(samples, fs);
        std::vector<double> hz(g.size());
        for (std::size_t j = 0; j < g.size(); ++j) hz[j] = g.hz(j);
        return to_array(hz);
      },
      py::arg("samples"), py::arg("sampling_rate") = 1.0, "Fourier frequencies in Hz on the half grid.");

  m.def(
      "simulate",
      [](std::size_t trials, std::size_t samples, double fs, std::uint64_t seed, double ma_weight, double ar_weight,
         std::size_t burnin) {
        auto c = SimulationConfig::paper_defaults();
        c.trials = trials;
        c.samples = samples;
        c.sampling_rate = fs;
        c.seed = seed;
        c.ma_weight = ma_weight;
        c.ar_weight = ar_weight;
        c.burnin = burnin;
        return from_series(simulate_mixture(c));
      },
      py::arg("trials") = 120, py::arg("samples") = 256, py::arg("sampling_rate") = 256.0, py::arg("seed") = 1,
      py::arg("ma_weight") = 0.65, py::arg("ar_weight") = 0.35, py::arg("burnin") = 500,
      "Simulate the 12-channel VMA/VAR mixture. Returns an (N, P, T) array.");

  m.def(
      "true_spectrum",
      [](std::size_t samples, double fs, double ma_weight, double ar_weight) {
        auto c = SimulationConfig::paper_defaults();
        c.samples = samples;
        c.sampling_rate = fs;
        c.ma_weight = ma_weight;
        c.ar_weight = ar_weight;
        return from_sequence(true_mixture_spectrum(c, FrequencyGrid(samples, fs)).matrices);
      },
      py::arg("samples") = 256, py::arg("sampling_rate") = 256.0, py::arg("ma_weight") = 0.65,
      py::arg("ar_weight") = 0.35);

  m.def(
      "mean_periodogram",
      [](const RealArray& data, double fs) { return from_sequence(mean_periodogram(to_series(data, fs)).matrices); },
      py::arg("data"), py::arg("sampling_rate") = 1.0);

  m.def(
      "smoothed",
      [](const RealArray& data, double fs, std::optional<int> span, std::optional<std::vector<int>> span_grid) {
        SmoothingConfig c;
        c.fixed_span = span;
        if (span_grid) c.span_grid = *span_grid;
        const auto r = smoothed_estimator(to_series(data, fs), c);
        return py::make_tuple(from_sequence(r.estimate.matrices), r.selected_spans);
      },
      py::arg("data"), py::arg("sampling_rate") = 1.0, py::arg("span") = py::none(),
      py::arg("span_grid") = py::none(), "Returns (spectrum, selected spans per trial).");

  m.def(
      "fit_var",
      [](const RealArray& data, std::optional<std::size_t> order, std::size_t k_max) {
        const auto x = to_series(data, 1.0);
        py::dict out;
        if (order) {
          const auto model = fit_var_ls(x, *order);
          out["coefficients"] = stack_coefficients(model.coefficients);
          out["sigma"] = model.sigma_z;
          out["order"] = model.order();
          out["bic"] = py::array_t<double>(0);
          return out;
        }
        const auto sel = bic_select_order(x, k_max);
        out["coefficients"] = stack_coefficients(sel.model.coefficients);
        out["sigma"] = sel.model.sigma_z;
        out["order"] = sel.order;
        out["bic"] = to_array(sel.criterion);
        return out;
      },
      py::arg("data"), py::arg("order") = py::none(), py::arg("k_max") = 15,
      "Least-squares VAR fit; BIC picks the order unless one is given.");

  m.def(
      "var_spectrum",
      [](const RealArray& coefficients, const RMatrix& sigma, std::size_t samples, double fs) {
        if (coefficients.ndim() != 3) throw DimensionError("coefficients must have shape (K, P, P)");
        auto view = coefficients.unchecked<3>();
        std::vector<RMatrix> phi;
        for (py::ssize_t k = 0; k < coefficients.shape(0); ++k) {
          RMatrix c(coefficients.shape(1), coefficients.shape(2));
          for (py::ssize_t a = 0; a < c.rows(); ++a)
            for (py::ssize_t b = 0; b < c.cols(); ++b) c(a, b) = view(k, a, b);
          phi.push_back(std::move(c));
        }
        return from_sequence(var_spectrum(VarModel{phi, sigma}, FrequencyGrid(samples, fs)).matrices);
      },
      py::arg("coefficients"), py::arg("sigma"), py::arg("samples"), py::arg("sampling_rate") = 1.0);

  m.def(
      "multitaper",
      [](const RealArray& data, double fs, std::optional<int> tapers, std::optional<std::vector<int>> grid) {
        const auto x = to_series(data, fs);
        int count = 0;
        if (tapers) {
          count = *tapers;
        } else {
          count = pure_select_ntapers(x, grid ? *grid : default_taper_grid(x.samples())).median;
        }
        return py::make_tuple(from_sequence(multitaper_estimator(x, count).matrices), count);
      },
      py::arg("data"), py::arg("sampling_rate") = 1.0, py::arg("tapers") = py::none(),
      py::arg("taper_grid") = py::none(), "Returns (spectrum, taper count used).");

  m.def(
      "estimate",
      [](const RealArray& data, double fs, std::size_t k_max, std::optional<std::size_t> order,
         std::optional<int> span, std::optional<std::vector<int>> span_grid, int window,
         std::optional<double> weight) {
        const auto r = full_pipeline(to_series(data, fs), make_options(k_max, order, span, span_grid, window, weight));
        py::dict out;
        out["spectrum"] = from_sequence(r.estimate.matrices);
        out["var_spectrum"] = from_sequence(r.var_estimate.matrices);
        out["smoothed_spectrum"] = from_sequence(r.smoothed.estimate.matrices);
        out["mean_periodogram"] = from_sequence(r.mean_periodogram.matrices);
        out["frequencies"] = to_array(r.estimate.grid.frequencies());
        out["weight"] = to_array(r.diagnostics.weight);
        out["weight_raw"] = to_array(r.diagnostics.weight_raw);
        out["alpha2"] = to_array(r.diagnostics.alpha2);
        out["beta2"] = to_array(r.diagnostics.beta2);
        out["delta2"] = to_array(r.diagnostics.delta2);
        out["var_order"] = r.var_model.order();
        out["spans"] = r.smoothed.selected_spans;
        return out;
      },
      py::arg("data"), py::arg("sampling_rate") = 1.0, py::arg("k_max") = 15, py::arg("order") = py::none(),
      py::arg("span") = py::none(), py::arg("span_grid") = py::none(), py::arg("window") = kDefaultWindow,
      py::arg("weight") = py::none(), "Full shrinkage pipeline.");

  m.def(
      "shrinkage_weight",
      [](double alpha2, double beta2, double delta2) {
        const auto w = shrinkage_weight(alpha2, beta2, delta2);
        return py::make_tuple(w.raw, w.clamped);
      },
      py::arg("alpha2"), py::arg("beta2"), py::arg("delta2"), "Returns (raw, clamped).");

  m.def(
      "coherence",
      [](const ComplexArray& f, std::size_t samples) {
        return from_real_sequence(coherence(to_estimate(f, samples, 1.0)).matrices);
      },
      py::arg("spectrum"), py::arg("samples"));

  m.def(
      "partial_coherence",
      [](const ComplexArray& f, std::size_t samples) {
        return from_real_sequence(partial_coherence(to_estimate(f, samples, 1.0)).matrices);
      },
      py::arg("spectrum"), py::arg("samples"));

  m.def("fisher_z", &fisher_z, py::arg("rho"));

  m.def(
      "welch_t",
      [](double mean_a, double se_a, std::size_t n_a, double mean_b, double se_b, std::size_t n_b) {
        const auto t = welch_t({mean_a, se_a, n_a}, {mean_b, se_b, n_b});
        return py::make_tuple(t.t, t.df, t.p);
      },
      py::arg("mean_a"), py::arg("se_a"), py::arg("n_a"), py::arg("mean_b"), py::arg("se_b"), py::arg("n_b"),
      "Returns (t, df, p).");

  m.def("bh_fdr", &bh_fdr, py::arg("pvalues"), py::arg("q") = 0.05);

  m.def(
      "compare_conditions",
      [](const RealArray& left, const RealArray& right, double fs,
         const std::vector<std::tuple<std::string, double, double>>& bands, double q, std::size_t k_max,
         std::optional<std::size_t> order, std::optional<int> span, int window) {
        const auto b = bands.empty() ? default_bands() : to_bands(bands);
        const auto opts = make_options(k_max, order, span, std::nullopt, window, std::nullopt);
        const auto l = jackknife_band_stats(to_series(left, fs), b, opts);
        const auto r = jackknife_band_stats(to_series(right, fs), b, opts);
        py::list rows;
        for (const auto& t : compare_conditions(l, r, q)) {
          py::dict d;
          d["band"] = t.band;
          d["channel_a"] = t.channel_a;
          d["channel_b"] = t.channel_b;
          d["z_left"] = t.z_left;
          d["z_right"] = t.z_right;
          d["se_left"] = t.se_left;
          d["se_right"] = t.se_right;
          d["t"] = t.test.t;
          d["df"] = t.test.df;
          d["p"] = t.test.p;
          d["rejected"] = t.rejected;
          rows.append(d);
        }
        return rows;
      },
      py::arg("left"), py::arg("right"), py::arg("sampling_rate"),
      py::arg("bands") = std::vector<std::tuple<std::string, double, double>>{}, py::arg("q") = 0.05,
      py::arg("k_max") = 15, py::arg("order") = py::none(), py::arg("span") = py::none(),
      py::arg("window") = kDefaultWindow, "Jackknife Welch tests on band partial coherence, BH-adjusted.");

  m.def(
      "encode_trials",
      [](const RealArray& data, double fs) { return py::bytes(io::encode_trials(to_series(data, fs))); },
      py::arg("data"), py::arg("sampling_rate"));

  m.def(
      "decode_trials",
      [](const py::bytes& blob) {
        const auto x = io::decode_trials(std::string(blob));
        return py::make_tuple(from_series(x), x.sampling_rate());
      },
      py::arg("blob"), "Returns (data, sampling_rate).");

  m.def(
      "write_trials",
      [](const std::string& path, const RealArray& data, double fs) {
        io::write_trial_file(path, to_series(data, fs));
      },
      py::arg("path"), py::arg("data"), py::arg("sampling_rate"));

  m.def(
      "read_trials",
      [](const std::string& path) {
        const auto x = io::read_trial_file(path);
        return py::make_tuple(from_series(x), x.sampling_rate());
      },
      py::arg("path"), "Returns (data, sampling_rate).");
}
