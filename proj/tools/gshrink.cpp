// gshrink: command-line front end for the shrinkage spectral toolkit.
//
//   gshrink simulate     --out sim.mts [--paper-defaults] [--seed S] ...
//   gshrink estimate     sim.mts --method shrinkage --out-dir est/
//   gshrink connectivity left.mts [right.mts] --out-dir conn/
//   gshrink compare      --reps 20 --seed 3 --out-dir mc/

#include "gshrink/connectivity.hpp"
#include "gshrink/errors.hpp"
#include "gshrink/io.hpp"
#include "gshrink/multitaper.hpp"
#include "gshrink/periodogram.hpp"
#include "gshrink/shrinkage.hpp"
#include "gshrink/simulation.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace gshrink;
using io::format_number;

// Flags shared by estimate / connectivity / compare. Values given on the
// command line override the config file.
struct CommonFlags {
  std::string config_path;
  std::vector<std::pair<std::string, std::string>> overrides;

  void add(CLI::App* cmd, const std::string& flag, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [this, key](const std::string& v) { overrides.emplace_back(key, v); }, help);
  }

  io::RunConfig resolve() const {
    io::RunConfig config = config_path.empty() ? io::RunConfig{} : io::read_run_config(config_path);
    for (const auto& [key, value] : overrides) {
      with_context("--" + key, [&] { io::set_config_value(config, key, value); return 0; });
    }
    return config;
  }
};

void add_pipeline_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "key = value run configuration file");
  flags.add(cmd, "--window", "window", "risk-estimation window C_T, odd (default 15)");
  flags.add(cmd, "--span-min", "span_min", "smallest PURE candidate span (default 3)");
  flags.add(cmd, "--span-max", "span_max", "largest PURE candidate span (default min(T/4 odd, 63))");
  flags.add(cmd, "--span", "span", "fixed Hann span for every trial (default: PURE)");
  flags.add(cmd, "--k-max", "k_max", "largest VAR order searched by BIC (default 15)");
  flags.add(cmd, "--order", "order", "fixed VAR order (default: BIC)");
  flags.add(cmd, "--taper-max", "taper_max", "largest PURE taper count (default min(32, T/8))");
  flags.add(cmd, "--tapers", "tapers", "fixed taper count (default: PURE median)");
  flags.add(cmd, "--detrend", "detrend", "none | linear | quadratic (default none)");
  flags.add(cmd, "--standardize", "standardize", "unit-variance standardization, true|false (default false)");
  flags.add(cmd, "--out-dir", "out_dir", "output directory (default .)");
}

std::vector<int> span_grid(const io::RunConfig& c, std::size_t samples) {
  std::vector<int> grid;
  const std::vector<int> defaults = default_span_grid(samples);
  const int hi = c.span_max > 0 ? c.span_max : defaults.back();
  int lo = c.span_min;
  if (lo % 2 == 0) ++lo;
  for (int h = std::max(lo, 1); h <= hi; h += 2) grid.push_back(h);
  if (grid.empty()) throw ConfigError("span grid [" + std::to_string(c.span_min) + ", " + std::to_string(hi) + "] is empty");
  return grid;
}

std::vector<int> taper_grid(const io::RunConfig& c, std::size_t samples) {
  if (c.taper_max <= 0) return default_taper_grid(samples);
  std::vector<int> grid;
  for (int m = 1; m <= c.taper_max; ++m) grid.push_back(m);
  return grid;
}

PipelineOptions pipeline_options(const io::RunConfig& c, std::size_t samples) {
  PipelineOptions o;
  o.k_max = c.k_max;
  if (c.order > 0) o.fixed_order = c.order;
  o.smoothing.span_grid = span_grid(c, samples);
  if (c.span > 0) o.smoothing.fixed_span = c.span;
  o.window = c.window;
  return o;
}

MultiTrialSeries load(const std::string& path, const io::RunConfig& c) {
  MultiTrialSeries data = io::read_trial_file(path);
  if (c.detrend == "linear") data = detrend(data, TrendOrder::linear);
  if (c.detrend == "quadratic") data = detrend(data, TrendOrder::quadratic);
  if (c.standardize) data = standardize(data);
  return data;
}

void write_spectra(io::OutputSet& out, const SpectralEstimate& est, const MultiTrialSeries& data) {
  const auto& labels = data.channel_labels();
  std::string& auto_csv = out.file("spectra.csv");
  std::string& cross_csv = out.file("cross_spectra.csv");
  auto_csv = "frequency_hz,channel,value\n";
  cross_csv = "frequency_hz,channel_a,channel_b,real,imag\n";
  const auto p = static_cast<Eigen::Index>(est.channels());
  for (std::size_t j = 0; j < est.size(); ++j) {
    const std::string hz = format_number(est.grid.hz(j));
    for (Eigen::Index a = 0; a < p; ++a) {
      auto_csv += hz + "," + labels[a] + "," + format_number(est[j](a, a).real()) + "\n";
      for (Eigen::Index b = a + 1; b < p; ++b) {
        cross_csv += hz + "," + labels[a] + "," + labels[b] + "," + format_number(est[j](a, b).real()) + "," +
                     format_number(est[j](a, b).imag()) + "\n";
      }
    }
  }
}

int cmd_simulate(bool /*paper_defaults*/, std::uint64_t seed, const std::string& out, long trials, long samples,
                 double rate, double ma_weight, double ar_weight, long burnin) {
  SimulationConfig config = SimulationConfig::paper_defaults();
  config.seed = seed;
  if (trials < 1) throw ConfigError("--trials must be at least 1, got " + std::to_string(trials));
  if (samples < 2) throw ConfigError("--length must be at least 2, got " + std::to_string(samples));
  if (burnin < 0) throw ConfigError("--burnin must be nonnegative");
  config.trials = static_cast<std::size_t>(trials);
  config.samples = static_cast<std::size_t>(samples);
  config.sampling_rate = rate;
  config.ma_weight = ma_weight;
  config.ar_weight = ar_weight;
  config.burnin = static_cast<std::size_t>(burnin);
  const MultiTrialSeries data = simulate_mixture(config);
  io::write_trial_file(out, data);
  std::cout << "wrote " << out << ": N=" << data.trials() << " P=" << data.channels() << " T=" << data.samples()
            << " sampling_rate=" << format_number(data.sampling_rate()) << " seed=" << seed << "\n";
  return 0;
}

int cmd_estimate(const std::string& input, const io::RunConfig& c, bool fixed_weight) {
  const MultiTrialSeries data = load(input, c);
  const FrequencyGrid grid = data.grid();
  io::OutputSet out(c.out_dir);
  std::ostringstream report;
  report << "input = " << input << "\nmethod = " << c.method << "\nN = " << data.trials()
         << "\nP = " << data.channels() << "\nT = " << data.samples() << "\n";

  if (c.method == "raw_mean") {
    write_spectra(out, mean_periodogram(data), data);
  } else if (c.method == "var") {
    VarModel model;
    if (c.order > 0) {
      model = fit_var_ls(data, c.order);
    } else {
      model = with_context("stage var", [&] { return bic_select_order(data, c.k_max).model; });
    }
    report << "var_order = " << model.order() << "\n";
    write_spectra(out, var_spectrum(model, grid), data);
  } else if (c.method == "smoothed") {
    SmoothingConfig sc;
    sc.span_grid = span_grid(c, grid.samples());
    if (c.span > 0) sc.fixed_span = c.span;
    const auto res = smoothed_estimator(data, sc);
    report << "spans =";
    for (int s : res.selected_spans) report << " " << s;
    report << "\n";
    write_spectra(out, res.estimate, data);
  } else if (c.method == "multitaper") {
    int m = c.tapers;
    if (m <= 0) {
      const auto sel = pure_select_ntapers(data, taper_grid(c, grid.samples()));
      m = sel.median;
      report << "tapers_per_trial =";
      for (int v : sel.per_trial) report << " " << v;
      report << "\n";
    }
    report << "tapers = " << m << "\n";
    write_spectra(out, multitaper_estimator(data, static_cast<std::size_t>(m)), data);
  } else {
    PipelineOptions o = pipeline_options(c, grid.samples());
    if (fixed_weight || c.weight) {
      if (!c.weight) throw ConfigError("--fixed needs --weight");
      o.fixed_weight = *c.weight;
    }
    const auto fit = full_pipeline(data, o);
    report << "var_order = " << fit.var_model.order() << "\nwindow = " << o.window << "\nspans =";
    for (int s : fit.smoothed.selected_spans) report << " " << s;
    report << "\n";
    if (o.fixed_weight) report << "fixed_weight = " << format_number(*o.fixed_weight) << "\n";
    write_spectra(out, fit.estimate, data);
    std::string& w = out.file("weights.csv");
    w = "frequency_hz,alpha2,beta2,delta2,w_raw,w\n";
    const auto& d = fit.diagnostics;
    for (std::size_t j = 0; j < grid.size(); ++j) {
      w += format_number(grid.hz(j)) + "," + format_number(d.alpha2[j]) + "," + format_number(d.beta2[j]) + "," +
           format_number(d.delta2[j]) + "," + format_number(d.weight_raw[j]) + "," + format_number(d.weight[j]) + "\n";
    }
  }
  out.file("fit_report.txt") = report.str();
  out.commit();
  return 0;
}

int cmd_connectivity(const std::vector<std::string>& inputs, const io::RunConfig& c) {
  if (inputs.empty() || inputs.size() > 2) throw ConfigError("connectivity takes one or two input files");
  std::vector<MultiTrialSeries> data;
  for (const auto& path : inputs) data.push_back(load(path, c));
  if (data.size() == 2 && data[0].channels() != data[1].channels()) {
    throw DimensionError("channel mismatch: " + inputs[0] + " has " + std::to_string(data[0].channels()) +
                         " channels, " + inputs[1] + " has " + std::to_string(data[1].channels()));
  }
  if (data.size() == 2 && !(data[0].grid() == data[1].grid())) {
    throw DimensionError("conditions differ in T or sampling rate");
  }
  const std::vector<std::string> names = {"left", "right"};
  io::OutputSet out(c.out_dir);
  std::string& pc = out.file("partial_coherence.csv");
  pc = "condition,band,channel_a,channel_b,value\n";
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto fit = with_context(inputs[i], [&] { return full_pipeline(data[i], pipeline_options(c, data[i].samples())); });
    const auto pcoh = partial_coherence(fit.estimate);
    const auto& labels = data[i].channel_labels();
    for (const auto& band : c.bands) {
      const auto avg = band_average(pcoh, band).matrix;
      for (Eigen::Index a = 0; a < avg.rows(); ++a) {
        for (Eigen::Index b = a + 1; b < avg.cols(); ++b) {
          pc += names[i] + "," + band.name + "," + labels[a] + "," + labels[b] + "," + format_number(avg(a, b)) + "\n";
        }
      }
    }
  }
  if (data.size() == 2) {
    std::vector<std::vector<BandJackknife>> stats;
    for (std::size_t i = 0; i < 2; ++i) {
      stats.push_back(with_context(inputs[i], [&] {
        return jackknife_band_stats(data[i], c.bands, pipeline_options(c, data[i].samples()));
      }));
    }
    const auto tests = compare_conditions(stats[0], stats[1], c.fdr_q);
    const auto& labels = data[0].channel_labels();
    std::string& t = out.file("tests.csv");
    t = "pair,band,z_left,z_right,se_left,se_right,t,p,rejected\n";
    for (const auto& r : tests) {
      t += labels[r.channel_a] + "-" + labels[r.channel_b] + "," + r.band + "," + format_number(r.z_left) + "," +
           format_number(r.z_right) + "," + format_number(r.se_left) + "," + format_number(r.se_right) + "," +
           format_number(r.test.t) + "," + format_number(r.test.p) + "," + (r.rejected ? "1" : "0") + "\n";
    }
  }
  out.commit();
  return 0;
}

int cmd_compare(const io::RunConfig& c, long reps, long trials, long samples, const std::vector<int>& extra_windows) {
  if (reps < 1) throw ConfigError("--reps must be at least 1");
  SimulationConfig config = SimulationConfig::paper_defaults();
  if (trials > 0) config.trials = static_cast<std::size_t>(trials);
  if (samples > 0) config.samples = static_cast<std::size_t>(samples);
  MonteCarloOptions o;
  o.reps = static_cast<std::size_t>(reps);
  o.seed = c.seed;
  o.pipeline = pipeline_options(c, config.samples);
  o.extra_windows = extra_windows;
  o.taper_grid = taper_grid(c, config.samples);
  const auto res = monte_carlo_compare(config, o);

  io::OutputSet out(c.out_dir);
  auto table = [&](const std::vector<std::vector<double>>& curves, const std::vector<std::string>& cols) {
    std::string s = "frequency_hz";
    for (const auto& name : cols) s += "," + name;
    s += "\n";
    for (std::size_t j = 0; j < res.grid.size(); ++j) {
      s += format_number(res.grid.hz(j));
      for (const auto& curve : curves) s += "," + format_number(curve[j]);
      s += "\n";
    }
    return s;
  };
  out.file("mse_spectral.csv") = table(res.mse_spectral, res.columns);
  out.file("mse_pcoh.csv") = table(res.mse_pcoh, res.columns);
  std::vector<std::string> wcols;
  for (std::size_t i = 0; i < res.windows.size(); ++i) {
    wcols.push_back(i == 0 ? "shrinkage" : "shrinkage_c" + std::to_string(res.windows[i]));
  }
  out.file("mean_weight.csv") = table(res.mean_weight, wcols);
  out.commit();
  for (const auto& name : res.columns) {
    std::cout << name << ": integrated spectral MSE " << format_number(res.integrated(res.mse_spectral, name))
              << ", partial coherence MSE " << format_number(res.integrated(res.mse_pcoh, name)) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generalized shrinkage estimation of multivariate spectra and partial coherence"};
  app.require_subcommand(1);

  auto* sim = app.add_subcommand("simulate", "write a seeded VAR(5) + VMA(1) mixture dataset");
  bool paper_defaults = false;
  std::uint64_t seed = 1;
  std::string out_path;
  long sim_trials = 120, sim_samples = 256, burnin = 500;
  double rate = 256.0, ma_weight = 0.65, ar_weight = 0.35;
  sim->add_flag("--paper-defaults", paper_defaults, "12 channels, N = 120, T = 256, weights 0.65 / 0.35 (default)");
  sim->add_option("--seed", seed, "master seed")->capture_default_str();
  sim->add_option("--out", out_path, "output trial file (.mts)")->required();
  sim->add_option("--trials", sim_trials, "number of trials N")->capture_default_str();
  sim->add_option("--length", sim_samples, "samples per trial T")->capture_default_str();
  sim->add_option("--sampling-rate", rate, "sampling rate in Hz")->capture_default_str();
  sim->add_option("--ma-weight", ma_weight, "VMA mixing weight")->capture_default_str();
  sim->add_option("--ar-weight", ar_weight, "VAR mixing weight")->capture_default_str();
  sim->add_option("--burnin", burnin, "discarded VAR warm-up samples")->capture_default_str();

  auto* est = app.add_subcommand("estimate", "estimate the spectral matrix of a trial file");
  CommonFlags est_flags;
  std::string est_input;
  bool fixed_weight = false;
  est->add_option("input", est_input, "trial file (.mts)")->required();
  add_pipeline_flags(est, est_flags);
  est_flags.add(est, "--method", "method", "shrinkage | smoothed | var | multitaper | raw_mean (default shrinkage)");
  est_flags.add(est, "--weight", "weight", "shrinkage weight used with --fixed");
  est->add_flag("--fixed", fixed_weight, "use --weight at every frequency instead of the estimated weight");

  auto* conn = app.add_subcommand("connectivity", "band partial coherence and two-condition tests");
  CommonFlags conn_flags;
  std::vector<std::string> conn_inputs;
  conn->add_option("inputs", conn_inputs, "one or two trial files (left, right)")->required()->expected(1, 2);
  add_pipeline_flags(conn, conn_flags);
  conn_flags.add(conn, "--bands", "bands", "name:lo:hi list in Hz (default alpha:8:12,beta:18:30)");
  conn_flags.add(conn, "--fdr-q", "fdr_q", "Benjamini-Hochberg level (default 0.05)");

  auto* cmp = app.add_subcommand("compare", "Monte Carlo MSE comparison on the simulated mixture");
  CommonFlags cmp_flags;
  long reps = 20, cmp_trials = 0, cmp_samples = 0;
  std::vector<int> extra_windows;
  cmp->add_option("--reps", reps, "Monte Carlo replicates")->capture_default_str();
  cmp->add_option("--trials", cmp_trials, "override N (default 120)");
  cmp->add_option("--length", cmp_samples, "override T (default 256)");
  cmp->add_option("--extra-windows", extra_windows, "additional C_T values reported as shrinkage_c<W>");
  add_pipeline_flags(cmp, cmp_flags);
  cmp_flags.add(cmp, "--seed", "seed", "master seed (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "gshrink: error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (*sim) return cmd_simulate(paper_defaults, seed, out_path, sim_trials, sim_samples, rate, ma_weight, ar_weight, burnin);
    if (*est) return cmd_estimate(est_input, est_flags.resolve(), fixed_weight);
    if (*conn) return cmd_connectivity(conn_inputs, conn_flags.resolve());
    if (*cmp) return cmd_compare(cmp_flags.resolve(), reps, cmp_trials, cmp_samples, extra_windows);
  } catch (const std::exception& e) {
    std::string msg = e.what();
    for (auto& ch : msg) {
      if (ch == '\n') ch = ' ';
    }
    std::cerr << "gshrink: error: " << msg << "\n";
    return 1;
  }
  return 0;
}
