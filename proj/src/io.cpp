#include "gshrink/io.hpp"

#include "gshrink/errors.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace gshrink::io {
namespace {

void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  std::uint64_t uint(std::size_t width, const char* what) {
    need(width, what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < width; ++i) {
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += width;
    return v;
  }

  double f64(const char* what) { return std::bit_cast<double>(uint(8, what)); }

  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) {
    if (remaining() < n) {
      throw FormatError("truncated trial file: need " + std::to_string(n) + " bytes for " + what + " at byte offset " +
                        std::to_string(pos_) + ", only " + std::to_string(remaining()) + " left");
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_integer(const std::string& value, const std::string& key) {
  T out{};
  const auto* first = value.data();
  const auto* last = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw ConfigError("invalid integer for " + key + ": '" + value + "'");
  return out;
}

double parse_double(const std::string& value, const std::string& key) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("invalid number for " + key + ": '" + value + "'");
  }
  if (used != value.size() || !std::isfinite(out)) throw ConfigError("invalid number for " + key + ": '" + value + "'");
  return out;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("invalid boolean for " + key + ": '" + value + "'");
}

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string encode_trials(const MultiTrialSeries& series) {
  std::string out = "MTS1";
  put_u16(out, kTrialFileVersion);
  put_u32(out, static_cast<std::uint32_t>(series.trials()));
  put_u32(out, static_cast<std::uint32_t>(series.channels()));
  put_u32(out, static_cast<std::uint32_t>(series.samples()));
  put_f64(out, series.sampling_rate());
  for (const auto& label : series.channel_labels()) {
    put_u32(out, static_cast<std::uint32_t>(label.size()));
    out += label;
  }
  out.reserve(out.size() + 8 * series.trials() * series.channels() * series.samples());
  for (const auto& trial : series.data()) {
    for (Eigen::Index p = 0; p < trial.rows(); ++p) {
      for (Eigen::Index t = 0; t < trial.cols(); ++t) put_f64(out, trial(p, t));
    }
  }
  return out;
}

MultiTrialSeries decode_trials(std::string_view bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (magic != "MTS1") throw FormatError("bad magic at byte offset 0: expected MTS1");
  const auto version = r.uint(2, "version");
  if (version != kTrialFileVersion) {
    throw FormatError("unsupported trial file version " + std::to_string(version) + " at byte offset 4");
  }
  const auto n = r.uint(4, "trial count");
  const auto p = r.uint(4, "channel count");
  const auto t = r.uint(4, "sample count");
  const std::size_t rate_offset = r.pos();
  const double rate = r.f64("sampling rate");
  if (n < 1 || p < 1 || t < 2) {
    throw FormatError("invalid dimensions N=" + std::to_string(n) + ", P=" + std::to_string(p) +
                      ", T=" + std::to_string(t) + " in header");
  }
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw FormatError("invalid sampling rate at byte offset " + std::to_string(rate_offset));
  }
  std::vector<std::string> labels;
  for (std::uint64_t i = 0; i < p; ++i) {
    const auto len = r.uint(4, "label length");
    labels.emplace_back(r.take(len, "channel label"));
  }
  const std::uint64_t expected = 8 * n * p * t;
  if (r.remaining() != expected) {
    throw FormatError("payload at byte offset " + std::to_string(r.pos()) + " has " +
                      std::to_string(r.remaining()) + " bytes, expected " + std::to_string(expected));
  }
  std::vector<RMatrix> trials;
  trials.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    RMatrix x(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(t));
    for (std::uint64_t c = 0; c < p; ++c) {
      for (std::uint64_t s = 0; s < t; ++s) {
        const std::size_t offset = r.pos();
        const double v = r.f64("sample");
        if (!std::isfinite(v)) throw FormatError("non-finite sample at byte offset " + std::to_string(offset));
        x(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(s)) = v;
      }
    }
    trials.push_back(std::move(x));
  }
  return MultiTrialSeries(std::move(trials), rate, std::move(labels));
}

void write_trial_file(const std::filesystem::path& path, const MultiTrialSeries& series) {
  write_file_atomic(path, encode_trials(series));
}

MultiTrialSeries read_trial_file(const std::filesystem::path& path) {
  return with_context(path.string(), [&] { return decode_trials(read_all(path)); });
}

MultiTrialSeries import_trials_csv(const std::filesystem::path& path, double sampling_rate) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || trim(line) != "trial,channel,time,value") {
    throw FormatError(path.string() + ": expected header 'trial,channel,time,value'");
  }
  struct Cell {
    std::size_t n, p, t;
    double v;
  };
  std::vector<Cell> cells;
  std::size_t max_n = 0, max_p = 0, max_t = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string f[4];
    for (auto& field : f) {
      if (!std::getline(ss, field, ',')) throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 4 fields");
      field = trim(field);
    }
    try {
      Cell c{parse_integer<std::size_t>(f[0], "trial"), parse_integer<std::size_t>(f[1], "channel"),
             parse_integer<std::size_t>(f[2], "time"), parse_double(f[3], "value")};
      if (c.n == 0 || c.p == 0 || c.t == 0) throw ConfigError("indices are 1-based");
      max_n = std::max(max_n, c.n);
      max_p = std::max(max_p, c.p);
      max_t = std::max(max_t, c.t);
      cells.push_back(c);
    } catch (const ConfigError& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (cells.size() != max_n * max_p * max_t) {
    throw FormatError(path.string() + ": expected " + std::to_string(max_n * max_p * max_t) +
                      " cells for a complete N x P x T array, found " + std::to_string(cells.size()));
  }
  std::vector<RMatrix> trials(max_n, RMatrix::Constant(static_cast<Eigen::Index>(max_p),
                                                       static_cast<Eigen::Index>(max_t), std::nan("")));
  for (const auto& c : cells) {
    double& slot = trials[c.n - 1](static_cast<Eigen::Index>(c.p - 1), static_cast<Eigen::Index>(c.t - 1));
    if (!std::isnan(slot)) {
      throw FormatError(path.string() + ": duplicate cell trial=" + std::to_string(c.n) +
                        " channel=" + std::to_string(c.p) + " time=" + std::to_string(c.t));
    }
    slot = c.v;
  }
  return MultiTrialSeries(std::move(trials), sampling_rate);
}

std::vector<Band> parse_bands(const std::string& text) {
  std::vector<Band> bands;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    const auto a = item.find(':');
    const auto b = item.find(':', a == std::string::npos ? a : a + 1);
    if (a == std::string::npos || b == std::string::npos) {
      throw ConfigError("band '" + item + "' must look like name:lo:hi");
    }
    Band band{trim(item.substr(0, a)), parse_double(trim(item.substr(a + 1, b - a - 1)), "band lo"),
              parse_double(trim(item.substr(b + 1)), "band hi")};
    if (band.name.empty() || !(band.lo_hz <= band.hi_hz) || band.lo_hz < 0.0) {
      throw ConfigError("band '" + item + "' needs a name and 0 <= lo <= hi");
    }
    bands.push_back(band);
  }
  if (bands.empty()) throw ConfigError("no bands given");
  return bands;
}

void set_config_value(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "method") {
    if (value != "shrinkage" && value != "smoothed" && value != "var" && value != "multitaper" && value != "raw_mean") {
      throw ConfigError("unknown method '" + value + "'");
    }
    c.method = value;
  } else if (key == "window") {
    c.window = parse_integer<int>(value, key);
  } else if (key == "span_min") {
    c.span_min = parse_integer<int>(value, key);
  } else if (key == "span_max") {
    c.span_max = parse_integer<int>(value, key);
  } else if (key == "span") {
    c.span = parse_integer<int>(value, key);
  } else if (key == "k_max") {
    c.k_max = parse_integer<std::size_t>(value, key);
  } else if (key == "order") {
    c.order = parse_integer<std::size_t>(value, key);
  } else if (key == "taper_max") {
    c.taper_max = parse_integer<int>(value, key);
  } else if (key == "tapers") {
    c.tapers = parse_integer<int>(value, key);
  } else if (key == "weight") {
    if (value.empty()) {
      c.weight.reset();
    } else {
      c.weight = parse_double(value, key);
    }
  } else if (key == "bands") {
    c.bands = parse_bands(value);
  } else if (key == "fdr_q") {
    c.fdr_q = parse_double(value, key);
  } else if (key == "seed") {
    c.seed = parse_integer<std::uint64_t>(value, key);
  } else if (key == "out_dir") {
    c.out_dir = value;
  } else if (key == "detrend") {
    if (value != "none" && value != "linear" && value != "quadratic") throw ConfigError("unknown detrend '" + value + "'");
    c.detrend = value;
  } else if (key == "standardize") {
    c.standardize = parse_bool(value, key);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

RunConfig parse_run_config(std::string_view text) {
  RunConfig config;
  std::stringstream ss{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::string s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    with_context("config line " + std::to_string(line_no),
                 [&] { set_config_value(config, trim(s.substr(0, eq)), trim(s.substr(eq + 1))); return 0; });
  }
  return config;
}

RunConfig read_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return with_context(path.string(), [&] { return parse_run_config(ss.str()); });
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "method = " << c.method << "\n"
      << "window = " << c.window << "\n"
      << "span_min = " << c.span_min << "\n"
      << "span_max = " << c.span_max << "\n"
      << "span = " << c.span << "\n"
      << "k_max = " << c.k_max << "\n"
      << "order = " << c.order << "\n"
      << "taper_max = " << c.taper_max << "\n"
      << "tapers = " << c.tapers << "\n"
      << "weight = " << (c.weight ? format_number(*c.weight) : std::string()) << "\n"
      << "bands = ";
  for (std::size_t i = 0; i < c.bands.size(); ++i) {
    out << (i ? "," : "") << c.bands[i].name << ":" << format_number(c.bands[i].lo_hz) << ":"
        << format_number(c.bands[i].hi_hz);
  }
  out << "\n"
      << "fdr_q = " << format_number(c.fdr_q) << "\n"
      << "seed = " << c.seed << "\n"
      << "out_dir = " << c.out_dir << "\n"
      << "detrend = " << c.detrend << "\n"
      << "standardize = " << (c.standardize ? "true" : "false") << "\n";
  return out.str();
}

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

void OutputSet::commit() const {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
  for (const auto& [name, contents] : files_) write_file_atomic(dir_ / name, contents);
}

}  // namespace gshrink::io
