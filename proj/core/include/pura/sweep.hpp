#pragma once

// Parameter sweeps over (y, tau0) producing CSV rows for every policy/mode.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pura/model.hpp"
#include "pura/sim.hpp"

namespace pura {

enum class SweepMode { analytic, simulate, both };

std::string_view to_string(SweepMode mode);
SweepMode parse_mode(std::string_view name);

struct SweepSpec {
  std::vector<int> y_values;
  std::vector<double> tau0_values;
  std::vector<sim::Policy> policies;
  SweepMode mode = SweepMode::analytic;
  std::size_t episodes = 200;
  std::uint64_t seed = 1;
  std::string output_path;  ///< empty = stdout
  unsigned threads = 1;     ///< sweep points evaluated concurrently; 0 = all cores
};

/// Throws ConfigError if a list is empty, some y >= sigma, some tau0 is
/// outside (0, T], or episodes is zero. Analytic rows also need every tau0
/// (two_d_pura) and tau_avg (one_d) to be at most sigma.
void validate(const SweepSpec& spec, const SchedulerConfig& config);

struct SweepRow {
  sim::Policy policy = sim::Policy::two_d_pura;
  MetricSource mode = MetricSource::analytic;
  int sigma = 0;
  int y = 0;
  double tau0 = 0.0;
  double T = 0.0;
  double v = 0.0;
  double lambda = 0.0;
  double expected_delay = 0.0;
  double sr_saving = 0.0;
  double wastage = 0.0;
  double ci_delay = 0.0;
  double ci_prob = 0.0;
  std::size_t episodes = 0;  ///< 0 for analytic rows
  std::uint64_t seed = 0;    ///< 0 for analytic rows
};

/// Analytic value of one policy at the config's (y, tau0). The one-to-one
/// baseline is evaluated at tau = tau_avg(lambda, v).
MetricsReport analytic_metrics(sim::Policy policy, const SchedulerConfig& config);

/// One row per (policy, y, tau0, mode), sorted by (policy, tau0, y, mode).
/// Every simulated point reuses spec.seed, so the output does not depend on
/// spec.threads.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, const SchedulerConfig& config);

/// Header: policy,mode,sigma,y,tau0,T,v,lambda,expected_delay,sr_saving,
/// wastage,ci_delay,ci_prob,episodes,seed. Reals use 6 significant digits.
std::string to_csv(const std::vector<SweepRow>& rows);

/// Per policy and mode: the minimizing (y, tau0), the minimum E(D), and the
/// saving against the standard policy (and the one-to-one baseline when
/// present) of the same mode.
std::string report_summary(const std::vector<SweepRow>& rows);

}  // namespace pura
