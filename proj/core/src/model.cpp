#include "pura/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace pura {

int ring_count(double tau0, double T) {
  if (!(tau0 > 0.0) || !(T > 0.0)) {
    throw std::invalid_argument("ring_count: tau0 and T must be positive");
  }
  const double ratio = T / tau0;
  auto n = static_cast<int>(std::ceil(ratio));
  // 1000 / 0.1 style ratios can land a hair above an integer.
  if (n > 1 && (n - 1) * tau0 >= T * (1.0 - 1e-12)) {
    --n;
  }
  return std::max(n, 1);
}

int SchedulerConfig::ring_count() const { return pura::ring_count(tau0, T); }

std::vector<ConfigError> violations(const SchedulerConfig& c) {
  std::vector<ConfigError> out;
  auto check = [&](bool ok, const char* field, const std::string& what) {
    if (!ok) out.emplace_back(field, what);
  };
  auto finite = [](double x) { return std::isfinite(x); };

  check(c.sigma >= 2, "sigma", "SR period must be at least 2 subframes");
  check(c.y >= 1 && c.y <= c.sigma - 1, "y",
        "threshold out of range [1, sigma-1]");
  check(finite(c.beta) && c.beta >= 1.0, "beta", "must be >= 1");
  check(finite(c.delta) && c.delta > 0.0, "delta", "must be positive");
  check(finite(c.T) && c.T > 0.0, "T", "must be positive");
  check(finite(c.tau0) && c.tau0 > 0.0, "tau0", "must be positive");
  if (finite(c.tau0) && finite(c.T) && c.tau0 > 0.0 && c.T > 0.0) {
    check(c.tau0 <= c.T, "tau0", "ring-crossing time exceeds T");
  }
  check(finite(c.v) && c.v > 0.0, "v", "must be positive");
  check(finite(c.lambda) && c.lambda > 0.0, "lambda", "must be positive");
  check(finite(c.n_max) && c.n_max > 0.0, "n_max", "must be positive");
  check(finite(c.tau_max) && c.tau_max > 0.0, "tau_max", "must be positive");
  if (finite(c.tau_max) && finite(c.T) && c.tau_max > 0.0) {
    check(c.tau_max <= c.T, "tau_max", "must not exceed T");
  }
  return out;
}

SchedulerConfig validate(const SchedulerConfig& config) {
  auto errs = violations(config);
  if (!errs.empty()) throw errs.front();
  return config;
}

namespace {

std::string_view trim(std::string_view s) {
  const char* ws = " \t\r\n";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view key, std::string_view text) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError(std::string(key),
                      "not a number: '" + std::string(text) + "'");
  }
  return value;
}

int parse_integer(std::string_view key, std::string_view text) {
  const double value = parse_number(key, text);
  if (value != std::floor(value) || std::abs(value) > 1e9) {
    throw ConfigError(std::string(key),
                      "expected an integer: '" + std::string(text) + "'");
  }
  return static_cast<int>(value);
}

std::string exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

SchedulerConfig parse_config(std::string_view text, const SchedulerConfig& base) {
  SchedulerConfig c = base;
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("", "line " + std::to_string(line_no) +
                                ": expected key=value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (!seen.emplace(key).second) {
      throw ConfigError(std::string(key), "duplicate key");
    }

    if (key == "sigma") c.sigma = parse_integer(key, value);
    else if (key == "y") c.y = parse_integer(key, value);
    else if (key == "beta") c.beta = parse_number(key, value);
    else if (key == "delta") c.delta = parse_number(key, value);
    else if (key == "tau0") c.tau0 = parse_number(key, value);
    else if (key == "T") c.T = parse_number(key, value);
    else if (key == "v") c.v = parse_number(key, value);
    else if (key == "lambda") c.lambda = parse_number(key, value);
    else if (key == "n_max") c.n_max = parse_number(key, value);
    else if (key == "tau_max") c.tau_max = parse_number(key, value);
    else throw ConfigError(std::string(key), "unknown key");
  }
  return c;
}

SchedulerConfig load_config(const std::string& path, const SchedulerConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), base);
}

std::string format_config(const SchedulerConfig& c) {
  std::ostringstream out;
  out << "sigma=" << c.sigma << '\n'
      << "y=" << c.y << '\n'
      << "beta=" << exact(c.beta) << '\n'
      << "delta=" << exact(c.delta) << '\n'
      << "tau0=" << exact(c.tau0) << '\n'
      << "T=" << exact(c.T) << '\n'
      << "v=" << exact(c.v) << '\n'
      << "lambda=" << exact(c.lambda) << '\n'
      << "n_max=" << exact(c.n_max) << '\n'
      << "tau_max=" << exact(c.tau_max) << '\n';
  return out.str();
}

double distance(Point a, Point b) noexcept {
  return std::hypot(a.x - b.x, a.y - b.y);
}

DeviceField::DeviceField(std::vector<Point> positions, std::vector<int> offsets,
                         std::size_t origin_index, int sigma)
    : positions_(std::move(positions)),
      offsets_(std::move(offsets)),
      origin_(origin_index),
      sigma_(sigma) {
  if (positions_.size() != offsets_.size()) {
    throw std::invalid_argument("DeviceField: positions and offsets differ in length");
  }
  if (origin_ >= positions_.size()) {
    throw std::invalid_argument("DeviceField: origin index out of range");
  }
  if (sigma_ < 1) throw std::invalid_argument("DeviceField: sigma must be >= 1");
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (offsets_[i] < 1 || offsets_[i] > sigma_) {
      throw std::invalid_argument("DeviceField: offset of device " +
                                  std::to_string(i) + " outside [1, sigma]");
    }
  }
}

std::string_view to_string(MetricSource source) {
  return source == MetricSource::analytic ? "analytic" : "simulated";
}

}  // namespace pura
