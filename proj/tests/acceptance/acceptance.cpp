// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pura/analytic.hpp"
#include "pura/planner.hpp"
#include "pura/sim.hpp"
#include "pura/sweep.hpp"

using namespace pura;
namespace an = pura::analytic;
using sim::Policy;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const char* id, bool pass, const std::string& detail) {
  std::printf("[%s] %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += !pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double x, double lo, double hi) { return x >= lo && x <= hi; }

SchedulerConfig evaluation(int y, double tau0) {
  SchedulerConfig c;
  c.y = y;
  c.tau0 = tau0;
  return c;
}

SchedulerConfig sparse(int y, double tau0) {
  SchedulerConfig c = evaluation(y, tau0);
  c.lambda = 0.005;
  return c;
}

void a1() {
  const auto start = Clock::now();
  const double exact = an::standard_delay(40, 1, 4.5);
  const auto m = sim::monte_carlo(sparse(1, 10), Policy::standard, 200, 101);
  const double t = seconds_since(start);
  const bool pass = exact == 26.0 && m.samples >= 100000 &&
                    std::abs(m.expected_delay - 26.0) <= 0.1 && t < 60.0;
  report("A1", pass,
         fmt("standard delay %.17g; simulated %.4f over %zu device samples; %.1fs",
             exact, m.expected_delay, m.samples, t));
}

void a2() {
  const double d10 = an::region_metrics(evaluation(1, 10)).expected_delay;
  const double d40 = an::region_metrics(evaluation(1, 40)).expected_delay;
  report("A2", within(d10, 18.5, 19.1) && within(d40, 20.1, 20.7),
         fmt("E(D) %.4f at tau0=10 (want [18.5,19.1]); %.4f at tau0=40 (want [20.1,20.7])",
             d10, d40));
}

void a3() {
  const double d = an::region_metrics(evaluation(1, 10)).expected_delay;
  const double one_d =
      an::baseline_1d(an::tau_avg(0.11, 0.3), 1, 40, 1, 4.5).expected_delay;
  const double vs_std = 1.0 - d / 26.0;
  const double vs_1d = 1.0 - d / one_d;
  report("A3", within(vs_std, 0.26, 0.285) && within(vs_1d, 0.15, 0.18),
         fmt("saving %.2f%% vs standard (want [26,28.5]); %.2f%% vs one-to-one "
             "E(D*)=%.4f (want [15,18])",
             100 * vs_std, 100 * vs_1d, one_d));
}

void a4() {
  const double ps = an::region_metrics(evaluation(1, 5)).sr_saving;
  const double ps1 = an::baseline_1d(5, 1, 40, 1, 4.5).sr_saving;
  report("A4", within(ps, 0.47, 0.51) && within(ps1, 0.23, 0.25),
         fmt("P(S) %.4f at tau0=5 (want [0.47,0.51]); one-to-one P(SR*) %.4f (want [0.23,0.25])",
             ps, ps1));
}

void a5() {
  std::size_t points = 0, nonzero_analytic = 0, nonzero_sim = 0;
  std::size_t devices = 0;
  for (double tau0 : {5.0, 10.0, 20.0}) {
    for (int y = static_cast<int>(tau0); y <= 39; ++y) {
      ++points;
      nonzero_analytic += an::region_metrics(evaluation(y, tau0)).wastage != 0.0;
      const auto m = sim::monte_carlo(sparse(y, tau0), Policy::two_d_pura, 20,
                                      500 + static_cast<std::uint64_t>(points));
      nonzero_sim += m.wastage != 0.0;
      devices += m.samples;
    }
  }
  const double u10 = an::region_metrics(evaluation(1, 10)).wastage;
  const double u20 = an::region_metrics(evaluation(1, 20)).wastage;
  const double ratio = u20 / u10;
  const bool zero = nonzero_analytic == 0 && nonzero_sim == 0;
  const bool doubling = std::abs(ratio - 2.0) <= 0.2;
  report("A5", zero && doubling,
         fmt("zero wastage for y >= tau0: %zu points, %zu analytic and %zu simulated "
             "nonzero (%zu devices); P(U) %.5f at tau0=20 / %.5f at tau0=10 = %.4f "
             "(want 2 +/- 10%%)",
             points, nonzero_analytic, nonzero_sim, devices, u20, u10, ratio));
}

void a6() {
  const auto start = Clock::now();
  struct P {
    double tau;
    int y;
  };
  const std::vector<P> grid = {
      {0.0, 1},  {0.5, 5},  {2.5, 1},  {2.5, 20}, {5.0, 1},  {5.0, 5},  {5.0, 20},
      {7.3, 1},  {7.3, 5},  {10.0, 1}, {10.0, 5}, {12.5, 1}, {12.5, 20}, {20.0, 1},
      {20.0, 5}, {20.0, 20}, {30.7, 5}, {30.7, 20}, {39.5, 1}, {39.5, 38}};
  std::size_t bad = 0;
  double worst_z = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto [tau, y] = grid[i];
    const auto o = sim::single_device_oracle(tau, y, 40, 4.5, 1, 1000000, 900 + i);
    const double ps = an::prob_success_b(tau, y, 40);
    const double pu = an::prob_unsuccess_b(tau, y, 40);
    const double es = std::abs(o.p_success - ps), eu = std::abs(o.p_unsuccess - pu);
    bad += es > 3 * o.se_success;
    bad += eu > 3 * o.se_unsuccess;
    if (o.se_success > 0) worst_z = std::max(worst_z, es / o.se_success);
    if (o.se_unsuccess > 0) worst_z = std::max(worst_z, eu / o.se_unsuccess);
  }
  double worst_delay = 0.0;
  for (int y : {1, 5, 20}) {
    const auto o = sim::single_device_oracle(5, y, 40, 4.5, 1, 1000000, 950 + static_cast<std::uint64_t>(y));
    worst_delay = std::max(worst_delay,
                           std::abs(o.expected_delay - an::expected_delay_b(5, y, 40, 4.5)));
  }
  const double t = seconds_since(start);
  report("A6", bad == 0 && worst_delay <= 0.05 && t < 300.0,
         fmt("%zu-point grid: %zu probabilities beyond 3 SE (max |z| %.2f); max delay "
             "gap %.4f at tau=5 (want <= 0.05); %.1fs",
             grid.size(), bad, worst_z, worst_delay, t));
}

void a7() {
  const auto start = Clock::now();
  double worst_d = 0.0, worst_s = 0.0, worst_u = 0.0;
  for (int y : {1, 10, 39}) {
    for (double tau0 : {5.0, 10.0, 40.0}) {
      const auto c = sparse(y, tau0);
      const auto ana = an::region_metrics(c);
      const auto sim = sim::monte_carlo(c, Policy::two_d_pura, 200, 42);
      worst_d = std::max(worst_d, std::abs(sim.expected_delay - ana.expected_delay));
      worst_s = std::max(worst_s, std::abs(sim.sr_saving - ana.sr_saving));
      worst_u = std::max(worst_u, std::abs(sim.wastage - ana.wastage));
    }
  }
  const double t = seconds_since(start);
  report("A7", worst_d <= 0.5 && worst_s <= 0.01 && worst_u <= 0.01 && t < 600.0,
         fmt("9 points, 200 episodes: max |dE(D)| %.4f (want <= 0.5), max |dP(S)| %.4f, "
             "max |dP(U)| %.4f (want <= 0.01); %.1fs",
             worst_d, worst_s, worst_u, t));
}

struct PlanInput {
  DeviceField field;
  std::vector<DeviceState> states;
};

PlanInput make_plan_input(std::size_t devices, const SchedulerConfig& c, Subframe rx,
                          std::mt19937_64& rng) {
  const double radius = c.radius();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> off(1, c.sigma);
  std::vector<Point> pos(devices);
  std::vector<int> offsets(devices);
  std::vector<DeviceState> states(devices);
  for (std::size_t i = 0; i < devices; ++i) {
    const double r = radius * std::sqrt(u(rng)), th = 2 * 3.141592653589793 * u(rng);
    pos[i] = {r * std::cos(th), r * std::sin(th)};
    offsets[i] = off(rng);
    states[i].next_sr_opportunity = rx + off(rng) - 1;
  }
  return {DeviceField(std::move(pos), std::move(offsets), 0, c.sigma), std::move(states)};
}

// Best-of-25 cluster+plan time per size, with repetitions interleaved across
// sizes so every size sees the same allocator and cache conditions.
std::vector<double> time_cluster_plan(const std::vector<std::size_t>& sizes,
                                      std::mt19937_64& rng) {
  const SchedulerConfig c = evaluation(1, 10);
  const Subframe rx = 1000;
  std::vector<PlanInput> inputs;
  for (std::size_t n : sizes) inputs.push_back(make_plan_input(n, c, rx, rng));
  std::vector<double> best(sizes.size(), 1e300);
  std::size_t sink = 0;
  for (int rep = 0; rep < 25; ++rep) {
    for (std::size_t s = 0; s < inputs.size(); ++s) {
      const auto start = Clock::now();
      const auto partition = cluster(inputs[s].field, c.ring_width(), c.ring_count());
      const auto p = plan(partition, c, rx, inputs[s].states);
      best[s] = std::min(best[s], seconds_since(start));
      sink += p.targeted_count();
    }
  }
  if (sink == 0) std::printf("(no device targeted)\n");
  return best;
}

void a8() {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_sum = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double T = 1.0 + 5000.0 * u(rng);
    const double tau0 = T * (0.001 + 0.999 * u(rng));
    double sum = 0.0;
    for (const auto& r : an::ring_weights(tau0, T)) sum += r.weight;
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
  }
  double worst_jump = 0.0;
  for (int y = 1; y < 40; ++y) {
    const double at = an::expected_delay_b(y, y, 40, 4.5);
    const double above = an::expected_delay_b(std::nextafter(double(y), 100.0), y, 40, 4.5);
    worst_jump = std::max(worst_jump, std::abs(at - above));
  }
  const auto times = time_cluster_plan({10000, 20000, 40000}, rng);
  const double t1 = times[0], t2 = times[1], t4 = times[2];
  const double r1 = t2 / t1, r2 = t4 / t2;
  report("A8", worst_sum <= 1e-12 && worst_jump <= 1e-9 && r1 <= 2.5 && r2 <= 2.5,
         fmt("ring weights max |sum-1| %.2e; max jump at tau=y %.2e; cluster+plan "
             "%.3f/%.3f/%.3f ms for 1e4/2e4/4e4 devices, doubling ratios %.2f, %.2f "
             "(want <= 2.5)",
             worst_sum, worst_jump, 1e3 * t1, 1e3 * t2, 1e3 * t4, r1, r2));
}

void a9() {
  SchedulerConfig c;
  c.lambda = 0.005;
  SweepSpec spec;
  spec.y_values = {1, 5, 10, 39};
  spec.tau0_values = {5, 10, 40};
  spec.policies = {Policy::standard, Policy::one_d, Policy::two_d_pura};
  spec.mode = SweepMode::both;
  spec.episodes = 20;
  spec.seed = 2024;
  spec.threads = 1;
  const auto first = to_csv(run_sweep(spec, c));
  const auto second = to_csv(run_sweep(spec, c));
  spec.threads = 4;
  const auto parallel = to_csv(run_sweep(spec, c));
  const auto rows = std::count(first.begin(), first.end(), '\n') - 1;
  report("A9", first == second && first == parallel,
         fmt("%ld rows; repeat run %s; 1 vs 4 threads %s", static_cast<long>(rows),
             first == second ? "identical" : "differs",
             first == parallel ? "identical" : "differs"));
}

}  // namespace

int main() {
  const auto start = Clock::now();
  a1();
  a2();
  a3();
  a4();
  a5();
  a6();
  a7();
  a8();
  a9();
  std::printf("%d of 9 criteria failed (%.1fs)\n", failures, seconds_since(start));
  return failures == 0 ? 0 : 1;
}
