#pragma once

// Closed-form performance model of proactive ring allocation.
//
// Per-device quantities are functions of tau, the time the disturbance needs
// to travel from the inner boundary of a device's ring to the device, given
// the threshold y and SR period sigma. The formulas assume beta = 1.
// Region-wide metrics integrate them over a device placed uniformly in the
// disturbance disc.

#include <vector>

#include "pura/model.hpp"

namespace pura::analytic {

/// E(D_std) = (1 + sigma)/2 + beta + delta.
double standard_delay(double sigma, double beta, double delta);

/// x(x+1)(2x+1)/6, i.e. the square pyramidal number extended to real x.
double pyramidal(double x);

/// Which branch of the per-device delay applies: y < tau (one) or
/// tau <= y < sigma (two).
enum class DelayCase { one, two };

DelayCase delay_case(double tau, double y);

/// Conditional-delay components of E(D_B). Only the components of `which`
/// are populated; the other branch's fields stay zero.
struct GammaBreakdown {
  DelayCase which = DelayCase::two;
  double gamma_s1 = 0.0;
  double gamma_u1 = 0.0;
  double gamma_npred1 = 0.0;
  double gamma_s2 = 0.0;
  double gamma_npred2 = 0.0;

  double total() const noexcept {
    return gamma_s1 + gamma_u1 + gamma_npred1 + gamma_s2 + gamma_npred2;
  }
};

/// Per-device functions below are defined for 0 <= tau <= sigma and
/// 1 <= y < sigma, and throw std::domain_error elsewhere.

/// Evaluates the branch selected by delay_case(tau, y).
GammaBreakdown gamma_terms(double tau, double y, double sigma, double delta);

/// Evaluates the requested branch. Throws std::domain_error if tau and y do
/// not satisfy its condition.
GammaBreakdown gamma_terms(double tau, double y, double sigma, double delta,
                           DelayCase which);

double expected_delay_b(double tau, double y, double sigma, double delta);
double prob_success_b(double tau, double y, double sigma);
double prob_unsuccess_b(double tau, double y, double sigma);

/// Geometric mass of ring k: (2/T^2) * integral over [lower, upper] of
/// ((k-1) tau0 + tau) dtau.
struct RingWeight {
  int k = 0;
  double lower = 0.0;
  double upper = 0.0;
  double weight = 0.0;
};

std::vector<RingWeight> ring_weights(double tau0, double T);

/// Region-wide E(D), P(S), P(U) for a device uniformly placed in the
/// disturbance disc. Each ring's integral is split at tau = y and evaluated
/// with `gauss_nodes`-point Gauss-Legendre (1..10); 5 nodes are exact for the
/// polynomial integrands. Throws std::domain_error if tau0 > sigma.
MetricsReport region_metrics(const SchedulerConfig& config, int gauss_nodes = 5);

/// min{tau_max v, N_max / (2 lambda pi v T)} in meters.
double optimal_ring_width(double tau_max, double v, double n_max,
                          double lambda, double T);
double optimal_ring_width(const SchedulerConfig& config);

/// N_k = lambda pi d0^2 (2k - 1).
double expected_ring_population(int k, double d0, double lambda);

/// Mean neighbor distance 1/(2 sqrt(lambda)) divided by speed v.
double tau_avg(double lambda, double v);

/// Best case of the one-to-one scheme, where only every other device can be
/// targeted: E(D*) = (E(D_std) + E(D_B))/2, P(SR*) = P(S_B)/2,
/// P(W*) = P(U_B)/2.
MetricsReport baseline_1d(double tau, double y, double sigma, double beta,
                          double delta);

}  // namespace pura::analytic
