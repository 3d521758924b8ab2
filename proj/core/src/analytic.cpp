#include "pura/analytic.hpp"

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pura::analytic {

double standard_delay(double sigma, double beta, double delta) {
  return (1.0 + sigma) / 2.0 + beta + delta;
}

double pyramidal(double x) { return x * (x + 1.0) * (2.0 * x + 1.0) / 6.0; }

DelayCase delay_case(double tau, double y) {
  return y < tau ? DelayCase::one : DelayCase::two;
}

namespace {

void check_domain(double t, double y, double s, const char* who) {
  if (!(t >= 0.0) || !(t <= s) || !(y >= 1.0) || !(y < s)) {
    throw std::domain_error(std::string(who) +
                            ": require 0 <= tau <= sigma and 1 <= y < sigma");
  }
}

}  // namespace

GammaBreakdown gamma_terms(double tau, double y, double sigma, double delta) {
  return gamma_terms(tau, y, sigma, delta, delay_case(tau, y));
}

GammaBreakdown gamma_terms(double t, double y, double s, double d,
                           DelayCase which) {
  check_domain(t, y, s, "gamma_terms");
  if (which != delay_case(t, y)) {
    throw std::domain_error(which == DelayCase::one
                                ? "gamma_terms: case one requires y < tau"
                                : "gamma_terms: case two requires tau <= y");
  }

  const double s2 = s * s;
  const double k = 3.0 + 2.0 * d;  // standard-path constant with beta = 1
  GammaBreakdown g;
  g.which = which;
  if (which == DelayCase::one) {
    const double pyr = pyramidal(s + y - t) - pyramidal(y);
    g.gamma_s1 = y * (s - y - 1) * (y + 2 * d + 1) / (2 * s2) +
                 d * (s - t) / s +
                 (s - d) * (s - t) * (s + 2 * y - t + 1) / (2 * s2) - pyr / s2;
    g.gamma_u1 = (t - y) * (s - y - 1) * (s - t + 1) / (2 * s2) +
                 (t - y) * (t - y - 1) * s / (2 * s2) +
                 (t - y) * (s - y - 1) * (1 + d) / s2;
    g.gamma_npred1 = (y + 1) * (t - y) * (2 * s - t + k) / (2 * s2) +
                     y * (y + 1) * (s + k) / (2 * s2) +
                     k * (s - t) * (s + 2 * y - t + 1) / (4 * s2) +
                     pyr / (2 * s2);
  } else {
    const double pyr = pyramidal(s - 1) - pyramidal(y);
    g.gamma_s2 = t * (s - y - 1) * (2 * y - t + 2 * d + 1) / (2 * s2) +
                 d * (s - y - 1) / s +
                 (s - d) * (s - y - 1) * (s + y) / (2 * s2) - pyr / s2;
    g.gamma_npred2 = t * (y + 1) * (y - t + k) / (2 * s2) +
                     t * (t + 1) / (2 * s) +
                     k * (s - y - 1) * (s + y) / (4 * s2) + pyr / (2 * s2) +
                     (y - t + 1) * (s + k) / (2 * s);
  }
  return g;
}

double expected_delay_b(double tau, double y, double sigma, double delta) {
  return gamma_terms(tau, y, sigma, delta).total();
}

namespace {

double clamp_probability(double p) {
  assert(p >= -1e-12 && p <= 1.0 + 1e-12 && "probability formula out of range");
  return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double prob_success_b(double t, double y, double s) {
  check_domain(t, y, s, "prob_success_b");
  const double s2 = s * s;
  const double raw = y < t
      ? ((s - y - 1) * (s + y) - (t - y - 1) * (t - y)) / (2 * s2)
      : (s - y - 1) * (s + 2 * t - y) / (2 * s2);
  return clamp_probability(raw);
}

double prob_unsuccess_b(double t, double y, double s) {
  check_domain(t, y, s, "prob_unsuccess_b");
  if (t <= y) return 0.0;
  return clamp_probability((s - y - 1) * (t - y) / (s * s));
}

std::vector<RingWeight> ring_weights(double tau0, double T) {
  const int n = ring_count(tau0, T);
  std::vector<RingWeight> rings;
  rings.reserve(static_cast<std::size_t>(n));
  const double scale = 2.0 / (T * T);
  for (int k = 1; k <= n; ++k) {
    RingWeight r;
    r.k = k;
    r.lower = 0.0;
    r.upper = k < n ? tau0 : T - (n - 1) * tau0;
    // integral of ((k-1) tau0 + tau) over [0, upper]
    r.weight = scale * ((k - 1) * tau0 * r.upper + 0.5 * r.upper * r.upper);
    rings.push_back(r);
  }
  return rings;
}

namespace {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Legendre roots by Newton iteration from the Chebyshev guess.
GaussRule gauss_legendre(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[static_cast<std::size_t>(i)] = x;
    rule.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

struct Moments {
  double delay = 0.0;
  double success = 0.0;
  double unsuccess = 0.0;

  Moments& operator+=(const Moments& o) {
    delay += o.delay;
    success += o.success;
    unsuccess += o.unsuccess;
    return *this;
  }
};

// Integral over [a, b] of f(tau) * tau^power for the three per-device metrics.
Moments integrate_piece(const GaussRule& rule, double a, double b, int power,
                        const SchedulerConfig& c) {
  Moments m;
  if (!(b > a)) return m;
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  const double y = c.y, s = c.sigma;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = mid + half * rule.nodes[i];
    const double w = half * rule.weights[i] * (power == 0 ? 1.0 : t);
    m.delay += w * expected_delay_b(t, y, s, c.delta);
    m.success += w * prob_success_b(t, y, s);
    m.unsuccess += w * prob_unsuccess_b(t, y, s);
  }
  return m;
}

Moments integrate(const GaussRule& rule, double upper, int power,
                  const SchedulerConfig& c) {
  const double y = c.y;
  if (y > 0.0 && y < upper) {
    Moments m = integrate_piece(rule, 0.0, y, power, c);
    m += integrate_piece(rule, y, upper, power, c);
    return m;
  }
  return integrate_piece(rule, 0.0, upper, power, c);
}

}  // namespace

MetricsReport region_metrics(const SchedulerConfig& config, int gauss_nodes) {
  if (gauss_nodes < 1 || gauss_nodes > 10) {
    throw std::invalid_argument("region_metrics: gauss_nodes must be in [1, 10]");
  }
  const SchedulerConfig& c = config;
  if (!(c.tau0 <= c.sigma)) {
    throw std::domain_error("region_metrics: closed forms require tau0 <= sigma");
  }
  const GaussRule rule = gauss_legendre(gauss_nodes);
  const int n = c.ring_count();
  const double tau0 = c.tau0;
  const double last = c.T - (n - 1) * tau0;

  // Full rings k = 1..n-1 share the same local integrals; only the shift
  // (k-1) tau0 in the weight differs, so sum it in closed form.
  Moments total;
  if (n > 1) {
    const Moments base = integrate(rule, tau0, 0, c);
    const Moments lin = integrate(rule, tau0, 1, c);
    const double shift = tau0 * 0.5 * (n - 1.0) * (n - 2.0);
    const double count = n - 1.0;
    total.delay += shift * base.delay + count * lin.delay;
    total.success += shift * base.success + count * lin.success;
    total.unsuccess += shift * base.unsuccess + count * lin.unsuccess;
  }
  const Moments base = integrate(rule, last, 0, c);
  const Moments lin = integrate(rule, last, 1, c);
  const double shift = (n - 1.0) * tau0;
  total.delay += shift * base.delay + lin.delay;
  total.success += shift * base.success + lin.success;
  total.unsuccess += shift * base.unsuccess + lin.unsuccess;

  const double scale = 2.0 / (c.T * c.T);
  MetricsReport r;
  r.source = MetricSource::analytic;
  r.expected_delay = scale * total.delay;
  r.sr_saving = clamp_probability(scale * total.success);
  r.wastage = clamp_probability(scale * total.unsuccess);
  return r;
}

double optimal_ring_width(double tau_max, double v, double n_max,
                          double lambda, double T) {
  return std::min(tau_max * v,
                  n_max / (2.0 * lambda * std::numbers::pi * v * T));
}

double optimal_ring_width(const SchedulerConfig& c) {
  return optimal_ring_width(c.tau_max, c.v, c.n_max, c.lambda, c.T);
}

double expected_ring_population(int k, double d0, double lambda) {
  if (k < 1) throw std::invalid_argument("expected_ring_population: k must be >= 1");
  return lambda * std::numbers::pi * d0 * d0 * (2.0 * k - 1.0);
}

double tau_avg(double lambda, double v) {
  return 1.0 / (2.0 * std::sqrt(lambda)) / v;
}

MetricsReport baseline_1d(double tau, double y, double sigma, double beta,
                          double delta) {
  MetricsReport r;
  r.source = MetricSource::analytic;
  r.expected_delay = 0.5 * (standard_delay(sigma, beta, delta) +
                            expected_delay_b(tau, y, sigma, delta));
  r.sr_saving = 0.5 * prob_success_b(tau, y, sigma);
  r.wastage = 0.5 * prob_unsuccess_b(tau, y, sigma);
  return r;
}

}  // namespace pura::analytic
