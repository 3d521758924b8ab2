#pragma once

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pura {

/// Raised when a configuration value is outside its admissible range or a
/// config file cannot be parsed. `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Scalar model parameters.
///
/// Every time is in subframes (1 subframe = 1 ms) and the disturbance speed
/// is in meters per subframe, so ring width and region radius follow from
/// products without unit conversion. Defaults are the evaluation settings:
/// 40-subframe SR period, 300 m/s disturbance, 0.11 devices per square meter.
struct SchedulerConfig {
  int sigma = 40;          ///< SR period
  int y = 1;               ///< prediction threshold
  double beta = 1.0;       ///< SR-to-grant delay
  double delta = 4.5;      ///< buffer alignment (0.5) + grant-to-data (4)
  double tau0 = 10.0;      ///< ring-crossing time
  double T = 1000.0;       ///< disturbance spreading time
  double v = 0.3;          ///< disturbance speed, m/subframe
  double lambda = 0.11;    ///< device intensity, 1/m^2
  double n_max = 1000.0;   ///< max simultaneous uplink grants
  double tau_max = 40.0;   ///< max admissible ring-crossing time

  /// Disturbance radius l = v*T in meters.
  double radius() const noexcept { return v * T; }
  /// Ring width d0 = v*tau0 in meters.
  double ring_width() const noexcept { return v * tau0; }
  /// n = ceil(T / tau0).
  int ring_count() const;
  /// Fixed delay between receiving a grant and sending data (delta minus the
  /// half-subframe buffer alignment).
  double grant_to_data() const noexcept { return delta - 0.5; }

  friend bool operator==(const SchedulerConfig&,
                         const SchedulerConfig&) = default;
};

/// Ring count ceil(T / tau0), robust to floating-point noise when T is an
/// exact multiple of tau0.
int ring_count(double tau0, double T);

/// All invariant violations, one message per offending field. Empty when the
/// config is valid.
std::vector<ConfigError> violations(const SchedulerConfig& config);

/// Returns `config` unchanged if it is valid; otherwise throws the first
/// violation.
SchedulerConfig validate(const SchedulerConfig& config);

/// Flat key=value format. Keys: sigma, y, beta, delta, tau0, T, v, lambda,
/// n_max, tau_max. Blank lines and lines starting with '#' are ignored.
/// Keys absent from the text keep their value from `base`. Unknown or
/// repeated keys and malformed numbers raise ConfigError. The result is not
/// validated.
SchedulerConfig parse_config(std::string_view text,
                             const SchedulerConfig& base = {});
SchedulerConfig load_config(const std::string& path,
                            const SchedulerConfig& base = {});
/// Every key, one per line, with enough digits to round-trip exactly.
std::string format_config(const SchedulerConfig& config);

struct Point {
  double x = 0.0;
  double y = 0.0;
};

double distance(Point a, Point b) noexcept;

/// Sampled device positions (meters, relative to the region center) with each
/// device's SR offset in {1, ..., sigma}. One device is the event origin.
class DeviceField {
 public:
  /// Throws std::invalid_argument if the vectors differ in length, the origin
  /// index is out of range, or an offset lies outside [1, sigma].
  DeviceField(std::vector<Point> positions, std::vector<int> offsets,
              std::size_t origin_index, int sigma);

  std::size_t size() const noexcept { return positions_.size(); }
  const std::vector<Point>& positions() const noexcept { return positions_; }
  const std::vector<int>& offsets() const noexcept { return offsets_; }
  std::size_t origin_index() const noexcept { return origin_; }
  Point origin() const { return positions_[origin_]; }
  int sigma() const noexcept { return sigma_; }

 private:
  std::vector<Point> positions_;
  std::vector<int> offsets_;
  std::size_t origin_;
  int sigma_;
};

enum class MetricSource { analytic, simulated };

std::string_view to_string(MetricSource source);

/// Region-wide performance: mean uplink delay E(D), SR saving P(S) and grant
/// wastage P(U). Confidence half-widths are 95% and zero for analytic values.
struct MetricsReport {
  double expected_delay = 0.0;
  double sr_saving = 0.0;
  double wastage = 0.0;
  MetricSource source = MetricSource::analytic;
  double ci_half_width_delay = 0.0;
  double ci_half_width_prob = 0.0;
  std::size_t samples = 0;  ///< device samples behind a simulated estimate

  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

}  // namespace pura
