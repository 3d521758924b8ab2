// pura: sweeps, single-episode dumps and ring design for proactive uplink
// allocation.

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "pura/analytic.hpp"
#include "pura/model.hpp"
#include "pura/planner.hpp"
#include "pura/sim.hpp"
#include "pura/sweep.hpp"

namespace {

using namespace pura;

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = text.find(sep, start);
    out.push_back(text.substr(start, end - start));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

template <class T>
T parse_number(const std::string& token, const std::string& field) {
  T value{};
  const char* first = token.data();
  const char* last = first + token.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw ConfigError(field, "cannot parse '" + token + "'");
  }
  return value;
}

// Comma-separated values and inclusive unit-step ranges such as "1..39".
template <class T>
std::vector<T> parse_list(const std::string& text, const std::string& field) {
  std::vector<T> out;
  for (const auto& token : split(text, ',')) {
    const std::size_t dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_number<T>(token, field));
      continue;
    }
    const T lo = parse_number<T>(token.substr(0, dots), field);
    const T hi = parse_number<T>(token.substr(dots + 2), field);
    if (hi < lo) throw ConfigError(field, "empty range '" + token + "'");
    if (hi - lo > 100000) throw ConfigError(field, "range too long '" + token + "'");
    for (T v = lo; v <= hi; v += 1) out.push_back(v);
  }
  return out;
}

std::vector<sim::Policy> parse_policies(const std::string& text) {
  std::vector<sim::Policy> out;
  for (const auto& token : split(text, ',')) out.push_back(sim::parse_policy(token));
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  if (!out.flush()) throw std::runtime_error("write to '" + path + "' failed");
}

// Scalar config flags; each overrides the config file when given.
struct ConfigFlags {
  std::string config_path;
  std::optional<int> sigma;
  std::optional<double> beta, delta, T, v, lambda, n_max, tau_max;

  void add_to(CLI::App& app) {
    app.add_option("--config", config_path, "key=value config file supplying defaults")
        ->check(CLI::ExistingFile);
    app.add_option("--sigma", sigma, "SR period (subframes)");
    app.add_option("--beta", beta, "SR-to-grant delay (subframes)");
    app.add_option("--delta", delta, "buffer alignment plus grant-to-data delay (subframes)");
    app.add_option("--T", T, "disturbance spreading time (subframes)");
    app.add_option("--v", v, "disturbance speed (m/subframe)");
    app.add_option("--lambda", lambda, "device intensity (1/m^2)");
    app.add_option("--n_max", n_max, "max simultaneous uplink grants");
    app.add_option("--tau_max", tau_max, "max admissible ring-crossing time (subframes)");
  }

  SchedulerConfig resolve() const {
    SchedulerConfig c = config_path.empty() ? SchedulerConfig{} : load_config(config_path);
    if (sigma) c.sigma = *sigma;
    if (beta) c.beta = *beta;
    if (delta) c.delta = *delta;
    if (T) c.T = *T;
    if (v) c.v = *v;
    if (lambda) c.lambda = *lambda;
    if (n_max) c.n_max = *n_max;
    if (tau_max) c.tau_max = *tau_max;
    return c;
  }
};

struct SweepArgs {
  ConfigFlags flags;
  std::optional<std::string> y, tau0;
  std::string policies = "two_d_pura";
  std::string mode = "analytic";
  std::size_t episodes = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out;
  bool summary = false;
};

int run_sweep_command(const SweepArgs& a) {
  const SchedulerConfig config = a.flags.resolve();
  SweepSpec spec;
  spec.y_values = a.y ? parse_list<int>(*a.y, "y") : std::vector<int>{config.y};
  spec.tau0_values = a.tau0 ? parse_list<double>(*a.tau0, "tau0")
                            : std::vector<double>{config.tau0};
  spec.policies = parse_policies(a.policies);
  spec.mode = parse_mode(a.mode);
  spec.episodes = a.episodes;
  spec.seed = a.seed;
  spec.threads = a.threads;
  spec.output_path = a.out;

  // The swept values replace the config's own y and tau0.
  SchedulerConfig base = config;
  if (!spec.y_values.empty()) base.y = spec.y_values.front();
  if (!spec.tau0_values.empty()) base.tau0 = spec.tau0_values.front();

  const auto rows = run_sweep(spec, base);
  const std::string csv = to_csv(rows);
  if (spec.output_path.empty()) {
    std::cout << csv;
    if (a.summary) std::cerr << report_summary(rows);
  } else {
    write_text(spec.output_path, csv);
    if (a.summary) std::cout << report_summary(rows);
  }
  return 0;
}

struct EpisodeArgs {
  ConfigFlags flags;
  std::optional<int> y;
  std::optional<double> tau0;
  std::string policy = "two_d_pura";
  std::uint64_t seed = 1;
  std::uint64_t index = 0;
  std::string trace_out, plan_out;
};

int run_episode_command(const EpisodeArgs& a) {
  SchedulerConfig c = a.flags.resolve();
  if (a.y) c.y = *a.y;
  if (a.tau0) c.tau0 = *a.tau0;
  c = validate(c);
  const sim::Policy policy = sim::parse_policy(a.policy);

  sim::Rng rng = sim::RngPolicy(a.seed).stream(a.index);
  const DeviceField field = sim::sample_field(c.lambda, c.radius(), c.sigma, rng);
  const auto outcome = sim::run_episode(field, c, policy, rng);

  std::printf("policy %s, %zu devices in field, %zu with data\n",
              std::string(sim::to_string(policy)).c_str(), field.size(),
              outcome.device_count());
  std::printf("onset %.4f, origin SR at subframe %lld\n", outcome.onset,
              static_cast<long long>(outcome.origin_sr));
  std::printf("mean delay %.4f, proactive successes %zu, wasted grants %zu, idle grants %zu\n",
              outcome.device_count() ? outcome.mean_delay() : 0.0, outcome.success_count,
              outcome.waste_count, outcome.idle_grants);

  if (!a.trace_out.empty()) write_text(a.trace_out, sim::trace_to_csv(outcome));
  if (!a.plan_out.empty()) {
    if (!outcome.plan) {
      throw std::invalid_argument("--plan-out requires --policy two_d_pura");
    }
    write_text(a.plan_out, plan_to_csv(*outcome.plan));
  }
  return 0;
}

int run_design_command(const ConfigFlags& flags) {
  const SchedulerConfig c = validate(flags.resolve());
  const double d0 = analytic::optimal_ring_width(c);
  const double tau0 = d0 / c.v;
  const int rings = ring_count(tau0, c.T);
  std::printf("ring width d0        %.4f m\n", d0);
  std::printf("ring-crossing tau0   %.4f subframes\n", tau0);
  std::printf("ring count n         %d\n", rings);
  std::printf("region radius l      %.4f m\n", c.radius());
  std::printf("tau_avg              %.4f subframes\n", analytic::tau_avg(c.lambda, c.v));
  std::printf("expected ring population:\n");
  for (int k : {1, 2, 3}) {
    if (k >= rings) break;
    std::printf("  ring %-4d %.2f devices\n", k,
                analytic::expected_ring_population(k, d0, c.lambda));
  }
  // The outermost ring is clipped at the region radius.
  const double inner = (rings - 1) * d0;
  const double l = c.radius();
  std::printf("  ring %-4d %.2f devices (outermost, %.4f m wide)\n", rings,
              c.lambda * std::numbers::pi * (l * l - inner * inner), l - inner);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Proactive uplink resource allocation: sweeps, episodes, ring design"};
  app.require_subcommand(1);

  SweepArgs sweep;
  auto* s = app.add_subcommand("sweep", "Evaluate a (y, tau0) grid and emit CSV rows");
  sweep.flags.add_to(*s);
  s->add_option("--y", sweep.y, "thresholds, e.g. 1..39 or 1,5,10");
  s->add_option("--tau0", sweep.tau0, "ring-crossing times, e.g. 5,10,20");
  s->add_option("--policy", sweep.policies, "comma list of standard, one_d, two_d_pura")
      ->capture_default_str();
  s->add_option("--mode", sweep.mode, "analytic, simulate or both")->capture_default_str();
  s->add_option("--episodes", sweep.episodes, "episodes per simulated point")
      ->capture_default_str();
  s->add_option("--seed", sweep.seed, "master seed")->capture_default_str();
  s->add_option("--threads", sweep.threads, "sweep points in parallel; 0 = all cores")
      ->capture_default_str();
  s->add_option("--out", sweep.out, "CSV output path (default stdout)");
  s->add_flag("--summary", sweep.summary, "print the best point per policy");

  EpisodeArgs episode;
  auto* e = app.add_subcommand("episode", "Simulate one episode and dump its trace");
  episode.flags.add_to(*e);
  e->add_option("--y", episode.y, "threshold (subframes)");
  e->add_option("--tau0", episode.tau0, "ring-crossing time (subframes)");
  e->add_option("--policy", episode.policy, "standard, one_d or two_d_pura")
      ->capture_default_str();
  e->add_option("--seed", episode.seed, "master seed")->capture_default_str();
  e->add_option("--index", episode.index, "episode index within the seed's streams")
      ->capture_default_str();
  e->add_option("--trace-out", episode.trace_out, "per-device trace CSV path");
  e->add_option("--plan-out", episode.plan_out, "allocation plan CSV path");

  ConfigFlags design;
  auto* d = app.add_subcommand("design", "Ring width and population for a configuration");
  design.add_to(*d);

  CLI11_PARSE(app, argc, argv);

  try {
    if (s->parsed()) return run_sweep_command(sweep);
    if (e->parsed()) return run_episode_command(episode);
    return run_design_command(design);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
