#pragma once

#include "gshrink/connectivity.hpp"
#include "gshrink/timeseries.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gshrink::io {

// Binary trial file, all integers little-endian:
//   "MTS1" | u16 version | u32 N | u32 P | u32 T | f64 sampling_rate
//   | P x (u32 byte length, UTF-8 label)
//   | N*P*T f64 values in [trial][channel][time] order
inline constexpr std::uint16_t kTrialFileVersion = 1;

std::string encode_trials(const MultiTrialSeries& series);
MultiTrialSeries decode_trials(std::string_view bytes);

void write_trial_file(const std::filesystem::path& path, const MultiTrialSeries& series);
MultiTrialSeries read_trial_file(const std::filesystem::path& path);

// CSV with header "trial,channel,time,value"; indices are 1-based and every
// (trial, channel, time) cell must appear exactly once.
MultiTrialSeries import_trials_csv(const std::filesystem::path& path, double sampling_rate);

// Flat "key = value" run configuration. Blank lines and lines starting with
// '#' are ignored; unknown keys are rejected.
struct RunConfig {
  std::string method = "shrinkage";  // shrinkage | smoothed | var | multitaper | raw_mean
  int window = 15;
  int span_min = 3;
  int span_max = 0;  // 0: min(T/4 rounded to odd, 63)
  int span = 0;      // > 0: fixed span for every trial
  std::size_t k_max = 15;
  std::size_t order = 0;  // > 0: fixed VAR order
  int taper_max = 0;      // 0: min(32, T/8)
  int tapers = 0;         // > 0: fixed taper count
  std::optional<double> weight;  // fixed shrinkage weight
  std::vector<Band> bands = default_bands();
  double fdr_q = 0.05;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  std::string detrend = "none";  // none | linear | quadratic
  bool standardize = false;
};

RunConfig parse_run_config(std::string_view text);
RunConfig read_run_config(const std::filesystem::path& path);
// Applies one key/value pair; throws ConfigError on unknown keys or bad values.
void set_config_value(RunConfig& config, const std::string& key, const std::string& value);
std::string format_run_config(const RunConfig& config);

// "alpha:8:12,beta:18:30"
std::vector<Band> parse_bands(const std::string& text);

// 12 significant digits.
std::string format_number(double value);

// Collects output files in memory and writes them all on commit(), each via
// a temporary file renamed into place.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  std::string& file(const std::string& name) { return files_[name]; }
  void commit() const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace gshrink::io
