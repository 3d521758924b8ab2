#include <cmath>
#include <numbers>

#include "doctest.h"
#include "pura/analytic.hpp"
#include "pura/sim.hpp"

using namespace pura;
using namespace pura::sim;
using doctest::Approx;

namespace {

SchedulerConfig sparse_config(int y = 1, double tau0 = 10) {
  SchedulerConfig c;
  c.lambda = 0.005;
  c.y = y;
  c.tau0 = tau0;
  return c;
}

}  // namespace

TEST_CASE("policy names") {
  for (auto p : {Policy::standard, Policy::one_d, Policy::two_d_pura}) {
    CHECK(parse_policy(to_string(p)) == p);
  }
  CHECK(to_string(Policy::two_d_pura) == "two_d_pura");
  CHECK_THROWS_AS(parse_policy("2d"), std::invalid_argument);
}

TEST_CASE("next opportunity is strictly after") {
  CHECK(next_opportunity_after(0, 1, 40) == 1);
  CHECK(next_opportunity_after(1, 1, 40) == 41);
  CHECK(next_opportunity_after(40, 40, 40) == 80);
  CHECK(next_opportunity_after(39, 40, 40) == 40);
  CHECK(next_opportunity_after(-5, 3, 40) == 3);
  CHECK(next_opportunity_after(-45, 3, 40) == -37);
  for (Subframe t = -100; t < 100; ++t) {
    const Subframe s = next_opportunity_after(t, 7, 10);
    CHECK(s > t);
    CHECK(s - t <= 10);
    CHECK(((s - 7) % 10 + 10) % 10 == 0);
  }
}

TEST_CASE("rng streams") {
  const RngPolicy a(9), b(9), c(10);
  auto s1 = a.stream(3), s2 = b.stream(3), s3 = a.stream(4), s4 = c.stream(3);
  const auto v1 = s1(), v2 = s2(), v3 = s3(), v4 = s4();
  CHECK(v1 == v2);
  CHECK(v1 != v3);
  CHECK(v1 != v4);

  // Crude independence smoke test: correlation of uniforms across adjacent
  // streams stays near zero.
  double sxy = 0.0, sx = 0.0, sy = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    auto x = a.stream(static_cast<std::uint64_t>(2 * i));
    auto y = a.stream(static_cast<std::uint64_t>(2 * i + 1));
    const double u = std::uniform_real_distribution<double>(-1, 1)(x);
    const double w = std::uniform_real_distribution<double>(-1, 1)(y);
    sxy += u * w;
    sx += u;
    sy += w;
  }
  CHECK(std::abs(sxy / n) < 4.0 / (3.0 * std::sqrt(n)));
  CHECK(std::abs(sx / n) < 4.0 * std::sqrt(1.0 / 3.0 / n));
  CHECK(std::abs(sy / n) < 4.0 * std::sqrt(1.0 / 3.0 / n));
}

TEST_CASE("sample_field") {
  SUBCASE("mean count at evaluation density") {
    Rng rng = RngPolicy(1).stream(0);
    const double mean = 0.11 * std::numbers::pi * 300.0 * 300.0;
    CHECK(mean == Approx(31102).epsilon(1e-4));
    double sum = 0.0;
    const int draws = 100;
    for (int i = 0; i < draws; ++i) sum += static_cast<double>(sample_field(0.11, 300, 40, rng).size());
    CHECK(std::abs(sum / draws - mean) < 3.0 * std::sqrt(mean / draws));
  }
  SUBCASE("unit mean, conditioned on a non-empty field") {
    Rng rng = RngPolicy(2).stream(0);
    int empty = 0, draws = 20000;
    for (int i = 0; i < draws; ++i) {
      try {
        (void)sample_field(1.0 / std::numbers::pi, 1.0, 40, rng);
      } catch (const std::runtime_error&) {
        ++empty;
      }
    }
    const double p0 = std::exp(-1.0);
    CHECK(std::abs(empty / double(draws) - p0) < 4.0 * std::sqrt(p0 * (1 - p0) / draws));
  }
  SUBCASE("geometry and offsets") {
    Rng rng = RngPolicy(3).stream(0);
    std::vector<long> hist(41, 0);
    long total = 0;
    while (total < 100000) {
      const auto f = sample_field(0.11, 300, 40, rng);
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < f.size(); ++i) {
        const double r = distance(f.positions()[i], {0, 0});
        REQUIRE(r <= 300.0);
        best = std::min(best, r);
        ++hist[static_cast<std::size_t>(f.offsets()[i])];
        ++total;
      }
      CHECK(distance(f.origin(), {0, 0}) == best);
    }
    CHECK(hist[0] == 0);
    const double expect = total / 40.0;
    double chi2 = 0.0;
    for (int k = 1; k <= 40; ++k) chi2 += std::pow(hist[static_cast<std::size_t>(k)] - expect, 2) / expect;
    CHECK(chi2 < 62.43);  // 39 degrees of freedom, 1% level
  }
  Rng rng;
  CHECK_THROWS_AS(sample_field(0.0, 1.0, 40, rng), std::invalid_argument);
}

TEST_CASE("origin-only field yields empty metrics") {
  const DeviceField f({{0, 0}}, {5}, 0, 40);
  Rng rng(1);
  for (auto p : {Policy::standard, Policy::one_d, Policy::two_d_pura}) {
    const auto out = run_episode(f, sparse_config(), p, rng);
    CHECK(out.device_count() == 0);
    CHECK(out.success_count == 0);
    CHECK(out.waste_count == 0);
  }
}

TEST_CASE("devices beyond the disturbance radius get no data") {
  const DeviceField f({{0, 0}, {100, 0}, {400, 0}}, {5, 6, 7}, 0, 40);
  Rng rng(1);
  const auto out = run_episode(f, sparse_config(), Policy::standard, rng);
  REQUIRE(out.device_count() == 1);
  CHECK(out.records[0].device == 1);
  CHECK(out.records[0].arrival == Approx(out.onset + 100 / 0.3));
}

TEST_CASE("hand-built two-device episode") {
  // Origin offset 10 and a lead of 5.5 put t0 at 44.5 and the origin's SR at
  // 50. Ring width is 3 m, so every device below sits in ring 1 (grant at 51).
  SchedulerConfig c = sparse_config(1, 10);
  Rng rng(7);
  const EpisodeOptions lead{.origin_lead = 5.5};
  SUBCASE("grant after buffering succeeds") {
    const DeviceField f({{0, 0}, {0.6, 0}}, {10, 30}, 0, 40);
    const auto out = run_episode(f, c, Policy::two_d_pura, rng, lead);
    CHECK(out.onset == 44.5);
    CHECK(out.origin_sr == 50);
    REQUIRE(out.device_count() == 1);
    const auto& r = out.records[0];
    CHECK(r.arrival == Approx(46.5));
    CHECK(r.path == CompletionPath::proactive_success);
    CHECK_FALSE(r.sent_sr);
    CHECK(r.delay == Approx(8.5));
    CHECK(out.success_count == 1);
  }
  SUBCASE("grant before buffering is wasted") {
    const DeviceField f({{0, 0}, {2.7, 0}}, {10, 30}, 0, 40);
    const auto out = run_episode(f, c, Policy::two_d_pura, rng, lead);
    const auto& r = out.records[0];
    CHECK(r.arrival == Approx(53.5));
    CHECK(r.path == CompletionPath::proactive_waste_then_standard);
    CHECK(r.sent_sr);
    CHECK(r.delay == Approx(21.5));
    CHECK(out.waste_count == 1);
  }
  SUBCASE("device with an imminent opportunity is left alone") {
    const DeviceField f({{0, 0}, {0.6, 0}}, {10, 11}, 0, 40);
    const auto out = run_episode(f, c, Policy::two_d_pura, rng, lead);
    CHECK(out.records[0].path == CompletionPath::standard);
    CHECK(out.records[0].delay == Approx(9.5));
  }
  SUBCASE("standard policy ignores the plan") {
    const DeviceField f({{0, 0}, {0.6, 0}}, {10, 30}, 0, 40);
    const auto out = run_episode(f, c, Policy::standard, rng, lead);
    CHECK(out.records[0].delay == Approx(70 - 46.5 + 5));
  }
  SUBCASE("one-to-one policy predicts the nearest neighbor") {
    const DeviceField f({{0, 0}, {0.6, 0}, {1.2, 0}}, {10, 30, 30}, 0, 40);
    const auto out = run_episode(f, c, Policy::one_d, rng, lead);
    CHECK(out.records[0].path == CompletionPath::proactive_success);
    CHECK(out.records[1].path == CompletionPath::standard);
  }
  CHECK_THROWS(run_episode(DeviceField({{0, 0}}, {1}, 0, 40), c, Policy::standard, rng,
                           {.origin_lead = 41.0}));
  CHECK_THROWS(run_episode(DeviceField({{0, 0}}, {1}, 0, 40), c, Policy::standard, rng,
                           {.origin_lead = 1.0}));
}

TEST_CASE("episode invariants") {
  const RngPolicy streams(77);
  for (int y : {1, 5, 39}) {
    for (double tau0 : {5.0, 10.0, 40.0}) {
      for (auto policy : {Policy::standard, Policy::one_d, Policy::two_d_pura}) {
        const auto c = sparse_config(y, tau0);
        for (std::uint64_t e = 0; e < 4; ++e) {
          Rng rng = streams.stream(e);
          const auto field = sample_field(c.lambda, c.radius(), c.sigma, rng);
          const auto out = run_episode(field, c, policy, rng);
          std::size_t sent = 0, success = 0, waste = 0;
          for (const auto& r : out.records) {
            CHECK(r.delay > 0.0);
            CHECK(r.device != field.origin_index());
            sent += r.sent_sr;
            success += r.path == CompletionPath::proactive_success;
            waste += r.path == CompletionPath::proactive_waste_then_standard;
            CHECK(r.sent_sr == (r.path != CompletionPath::proactive_success));
          }
          CHECK(success + sent == out.device_count());
          CHECK(success == out.success_count);
          CHECK(waste == out.waste_count);
          CHECK(out.success_count + out.waste_count <= out.device_count());
          if (policy == Policy::standard) CHECK(success + waste == 0);
          if (policy == Policy::two_d_pura && y >= tau0) CHECK(out.waste_count == 0);
        }
      }
    }
  }
}

TEST_CASE("standard policy reproduces the standard delay") {
  const auto m = monte_carlo(sparse_config(), Policy::standard, 200, 5);
  CHECK(m.samples > 100000);
  CHECK(std::abs(m.expected_delay - 26.0) < 0.1);
  CHECK(m.sr_saving == 0.0);
  CHECK(m.wastage == 0.0);
}

TEST_CASE("monte carlo determinism and thread independence") {
  const auto c = sparse_config(1, 10);
  const auto a = monte_carlo(c, Policy::two_d_pura, 24, 99);
  const auto b = monte_carlo(c, Policy::two_d_pura, 24, 99);
  const auto p = monte_carlo(c, Policy::two_d_pura, 24, 99, {.threads = 3});
  CHECK(a == b);
  CHECK(a == p);
  CHECK(a.source == MetricSource::simulated);
  CHECK_FALSE(a == monte_carlo(c, Policy::two_d_pura, 24, 100));
  CHECK_THROWS(monte_carlo(c, Policy::two_d_pura, 0, 1));
}

TEST_CASE("confidence intervals shrink with the square root of the sample") {
  const auto c = sparse_config(1, 10);
  SUBCASE("one episode against two hundred") {
    const auto one = monte_carlo(c, Policy::standard, 1, 4);
    const auto many = monte_carlo(c, Policy::standard, 200, 4);
    const double ratio = one.ci_half_width_delay / many.ci_half_width_delay;
    CHECK(ratio == Approx(std::sqrt(200.0)).epsilon(0.15));
  }
  SUBCASE("phase-sharing policy across whole strata") {
    const auto few = monte_carlo(c, Policy::two_d_pura, 50, 4);
    const auto many = monte_carlo(c, Policy::two_d_pura, 200, 4);
    CHECK(few.ci_half_width_delay / many.ci_half_width_delay == Approx(2.0).epsilon(0.1));
    CHECK(few.ci_half_width_prob / many.ci_half_width_prob == Approx(2.0).epsilon(0.1));
  }
}

TEST_CASE("simulated region metrics track the analytic model") {
  const auto c = sparse_config(1, 10);
  const auto sim = monte_carlo(c, Policy::two_d_pura, 200, 42);
  const auto ana = analytic::region_metrics(c);
  CHECK(std::abs(sim.expected_delay - ana.expected_delay) < 0.5);
  CHECK(std::abs(sim.sr_saving - ana.sr_saving) < 0.01);
  CHECK(std::abs(sim.wastage - ana.wastage) < 0.01);
}

TEST_CASE("one-to-one policy beats the standard path") {
  const auto c = sparse_config(1, 10);
  const auto one = monte_carlo(c, Policy::one_d, 40, 8);
  const auto std_ = monte_carlo(c, Policy::standard, 40, 8);
  CHECK(one.expected_delay < std_.expected_delay);
  CHECK(one.sr_saving > 0.0);
  CHECK(one.sr_saving < 0.5);
}

TEST_CASE("single-device oracle") {
  const auto a = single_device_oracle(5, 1, 40, 4.5, 1, 200000, 11);
  CHECK(std::abs(a.p_success - analytic::prob_success_b(5, 1, 40)) < 4 * a.se_success);
  CHECK(std::abs(a.p_unsuccess - analytic::prob_unsuccess_b(5, 1, 40)) < 4 * a.se_unsuccess);
  CHECK(std::abs(a.expected_delay - analytic::expected_delay_b(5, 1, 40, 4.5)) < 4 * a.se_delay);
  const auto b = single_device_oracle(5, 5, 40, 4.5, 1, 50000, 11);
  CHECK(b.p_unsuccess == 0.0);
  CHECK(b.trials == 50000);
  CHECK_THROWS(single_device_oracle(5, 40, 40, 4.5, 1, 10, 1));
  CHECK_THROWS(single_device_oracle(5, 1, 40, 4.5, 1, 0, 1));
}

TEST_CASE("trace CSV") {
  const DeviceField f({{0, 0}, {0.6, 0}}, {10, 30}, 0, 40);
  Rng rng(7);
  const auto out = run_episode(f, sparse_config(), Policy::two_d_pura, rng, {.origin_lead = 5.5});
  const auto csv = trace_to_csv(out);
  CHECK(csv.rfind("device_id,distance,arrival,path,delay,sent_sr\n", 0) == 0);
  CHECK(csv.find("1,0.6,46.5,proactive-success,8.5,0\n") != std::string::npos);
  CHECK(csv.find("proactive-success") != std::string::npos);
}
