#include "pura/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "parallel.hpp"
#include "pura/analytic.hpp"

namespace pura {

std::string_view to_string(SweepMode mode) {
  switch (mode) {
    case SweepMode::analytic: return "analytic";
    case SweepMode::simulate: return "simulate";
    case SweepMode::both: return "both";
  }
  return "unknown";
}

SweepMode parse_mode(std::string_view name) {
  if (name == "analytic") return SweepMode::analytic;
  if (name == "simulate" || name == "simulated") return SweepMode::simulate;
  if (name == "both") return SweepMode::both;
  throw std::invalid_argument("unknown mode '" + std::string(name) +
                              "' (expected analytic, simulate or both)");
}

void validate(const SweepSpec& spec, const SchedulerConfig& config) {
  if (spec.y_values.empty()) throw ConfigError("y", "empty value list");
  if (spec.tau0_values.empty()) throw ConfigError("tau0", "empty value list");
  if (spec.policies.empty()) throw ConfigError("policy", "empty policy list");
  if (spec.episodes == 0) throw ConfigError("episodes", "must be >= 1");
  for (int y : spec.y_values) {
    if (y < 1 || y >= config.sigma) {
      throw ConfigError("y", "value " + std::to_string(y) + " outside [1, sigma-1]");
    }
  }
  const bool analytic = spec.mode != SweepMode::simulate;
  const auto has = [&](sim::Policy p) {
    return std::find(spec.policies.begin(), spec.policies.end(), p) != spec.policies.end();
  };
  for (double t : spec.tau0_values) {
    if (!(t > 0.0) || t > config.T) {
      throw ConfigError("tau0", "value outside (0, T]");
    }
    if (analytic && has(sim::Policy::two_d_pura) && t > config.sigma) {
      throw ConfigError("tau0", "analytic rows require tau0 <= sigma");
    }
  }
  if (analytic && has(sim::Policy::one_d) &&
      analytic::tau_avg(config.lambda, config.v) > config.sigma) {
    throw ConfigError("lambda", "analytic one_d rows require tau_avg <= sigma");
  }
}

MetricsReport analytic_metrics(sim::Policy policy, const SchedulerConfig& c) {
  switch (policy) {
    case sim::Policy::standard: {
      MetricsReport r;
      r.expected_delay = analytic::standard_delay(c.sigma, c.beta, c.delta);
      return r;
    }
    case sim::Policy::one_d:
      return analytic::baseline_1d(analytic::tau_avg(c.lambda, c.v), c.y,
                                   c.sigma, c.beta, c.delta);
    case sim::Policy::two_d_pura:
      return analytic::region_metrics(c);
  }
  throw std::logic_error("analytic_metrics: unknown policy");
}

namespace {

struct SweepPoint {
  sim::Policy policy;
  double tau0;
  int y;
  MetricSource mode;
};

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SchedulerConfig& config) {
  validate(spec, config);
  const SchedulerConfig base = validate(config);

  std::vector<MetricSource> modes;
  if (spec.mode != SweepMode::simulate) modes.push_back(MetricSource::analytic);
  if (spec.mode != SweepMode::analytic) modes.push_back(MetricSource::simulated);

  std::vector<SweepPoint> points;
  for (auto policy : sorted_unique(spec.policies)) {
    for (double tau0 : sorted_unique(spec.tau0_values)) {
      for (int y : sorted_unique(spec.y_values)) {
        for (auto mode : modes) points.push_back({policy, tau0, y, mode});
      }
    }
  }

  std::vector<SweepRow> rows(points.size());
  const unsigned inner_threads = points.size() == 1 ? spec.threads : 1;
  detail::parallel_for(points.size(), spec.threads, [&](std::size_t i) {
    const SweepPoint& p = points[i];
    SchedulerConfig c = base;
    c.y = p.y;
    c.tau0 = p.tau0;
    c = validate(c);

    MetricsReport m;
    SweepRow row;
    if (p.mode == MetricSource::analytic) {
      m = analytic_metrics(p.policy, c);
    } else {
      m = sim::monte_carlo(c, p.policy, spec.episodes, spec.seed,
                           {.threads = inner_threads});
      row.episodes = spec.episodes;
      row.seed = spec.seed;
    }
    row.policy = p.policy;
    row.mode = p.mode;
    row.sigma = c.sigma;
    row.y = c.y;
    row.tau0 = c.tau0;
    row.T = c.T;
    row.v = c.v;
    row.lambda = c.lambda;
    row.expected_delay = m.expected_delay;
    row.sr_saving = m.sr_saving;
    row.wastage = m.wastage;
    row.ci_delay = m.ci_half_width_delay;
    row.ci_prob = m.ci_half_width_prob;
    rows[i] = row;
  });
  return rows;
}

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace

std::string to_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "policy,mode,sigma,y,tau0,T,v,lambda,expected_delay,sr_saving,wastage,"
      "ci_delay,ci_prob,episodes,seed\n";
  for (const auto& r : rows) {
    out += sim::to_string(r.policy);
    out += ',';
    out += to_string(r.mode);
    out += ',' + std::to_string(r.sigma) + ',' + std::to_string(r.y) + ',' +
           num(r.tau0) + ',' + num(r.T) + ',' + num(r.v) + ',' + num(r.lambda) +
           ',' + num(r.expected_delay) + ',' + num(r.sr_saving) + ',' +
           num(r.wastage) + ',' + num(r.ci_delay) + ',' + num(r.ci_prob) + ',' +
           std::to_string(r.episodes) + ',' + std::to_string(r.seed) + '\n';
  }
  return out;
}

std::string report_summary(const std::vector<SweepRow>& rows) {
  using Key = std::pair<sim::Policy, MetricSource>;
  std::map<Key, const SweepRow*> best;
  std::map<MetricSource, double> standard;
  std::map<std::tuple<MetricSource, int, double>, double> one_d;
  for (const auto& r : rows) {
    auto& b = best[{r.policy, r.mode}];
    if (!b || r.expected_delay < b->expected_delay) b = &r;
    if (r.policy == sim::Policy::standard) {
      auto [it, fresh] = standard.emplace(r.mode, r.expected_delay);
      if (!fresh) it->second = std::min(it->second, r.expected_delay);
    }
    if (r.policy == sim::Policy::one_d) one_d[{r.mode, r.y, r.tau0}] = r.expected_delay;
  }

  auto pct = [](double value, double reference) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", 100.0 * (1.0 - value / reference));
    return std::string(buf);
  };

  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-11s %-9s %4s %8s %10s %12s %12s\n", "policy",
                "mode", "y", "tau0", "min E(D)", "vs standard", "vs one_d");
  out << line;
  for (const auto& [key, row] : best) {
    const auto std_it = standard.find(key.second);
    const auto one_it = one_d.find({key.second, row->y, row->tau0});
    const std::string vs_std = std_it != standard.end()
        ? pct(row->expected_delay, std_it->second) : "n/a";
    const std::string vs_one = one_it != one_d.end()
        ? pct(row->expected_delay, one_it->second) : "n/a";
    std::snprintf(line, sizeof line, "%-11s %-9s %4d %8s %10s %12s %12s\n",
                  std::string(sim::to_string(key.first)).c_str(),
                  std::string(to_string(key.second)).c_str(), row->y,
                  num(row->tau0).c_str(), num(row->expected_delay).c_str(),
                  vs_std.c_str(), vs_one.c_str());
    out << line;
  }
  return out.str();
}

}  // namespace pura
