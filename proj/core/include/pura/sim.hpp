#pragma once

// Discrete-event Monte Carlo simulation of a single disturbance episode.
//
// Timing model (all times in subframes):
//  * the disturbance starts at the origin device at a continuous time t0 and
//    reaches device i at t_i = t0 + distance_i / v, for distance_i <= v T;
//  * data becomes usable at the next subframe boundary b_i = ceil(t_i);
//  * device i may send an SR at subframes congruent to its offset mod sigma,
//    at the first such subframe strictly after b_i;
//  * an SR is answered after beta subframes, and data follows a grant after
//    delta - 0.5 subframes;
//  * a proactive grant at subframe g carries the data if b_i < g.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "pura/model.hpp"
#include "pura/planner.hpp"

namespace pura::sim {

enum class Policy { standard, one_d, two_d_pura };

std::string_view to_string(Policy policy);
/// Accepts "standard", "one_d", "two_d_pura".
Policy parse_policy(std::string_view name);

using Rng = std::mt19937_64;

/// Seeds independent per-episode streams from a master seed.
class RngPolicy {
 public:
  explicit RngPolicy(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  /// Stream for episode `index`; identical (seed, index) give identical
  /// streams.
  Rng stream(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
};

/// First SR opportunity strictly after subframe `after` for a device with
/// `offset` in [1, sigma].
Subframe next_opportunity_after(Subframe after, int offset, int sigma);

/// Homogeneous Poisson field on a disc of `radius` meters centered at the
/// coordinate origin, with i.i.d. offsets uniform on {1, ..., sigma}. The
/// event origin is the device nearest the center. Throws std::runtime_error
/// if no device is drawn.
DeviceField sample_field(double lambda, double radius, int sigma, Rng& rng);

enum class CompletionPath {
  proactive_success,
  proactive_waste_then_standard,
  standard,
};

std::string_view to_string(CompletionPath path);

struct DeviceRecord {
  std::size_t device = 0;
  double distance = 0.0;
  double arrival = 0.0;
  CompletionPath path = CompletionPath::standard;
  double delay = 0.0;
  bool sent_sr = true;
};

/// One record per non-origin device that receives data.
struct EpisodeOutcome {
  double onset = 0.0;         ///< t0
  Subframe origin_sr = 0;     ///< subframe of the origin's SR
  std::vector<DeviceRecord> records;
  std::size_t success_count = 0;
  std::size_t waste_count = 0;
  std::size_t idle_grants = 0;  ///< grants to ringed devices that never get data
  std::optional<AllocationPlan> plan;  ///< two_d_pura only

  std::size_t device_count() const noexcept { return records.size(); }
  double mean_delay() const;
};

struct EpisodeOptions {
  /// Forces the time from t0 to the origin's SR, in the open interval
  /// (1, sigma + 1). Unforced, it is uniform on that interval. The origin's
  /// SR then falls at subframe offset + sigma.
  std::optional<double> origin_lead;
};

EpisodeOutcome run_episode(const DeviceField& field,
                           const SchedulerConfig& config, Policy policy,
                           Rng& rng, const EpisodeOptions& options = {});

/// CSV with header device_id,distance,arrival,path,delay,sent_sr.
std::string trace_to_csv(const EpisodeOutcome& outcome);

struct MonteCarloOptions {
  /// Worker threads; 0 uses the hardware concurrency.
  unsigned threads = 1;
  /// Episode e of E draws its origin lead from the e-th of E equal strata
  /// of (1, sigma + 1), balancing the phase shared by all devices of an
  /// episode.
  bool stratify_origin = true;
};

/// Device-weighted estimates over `episodes` independent episodes on a field
/// of radius v T. The result depends only on (config, policy, episodes,
/// seed), never on the thread count.
MetricsReport monte_carlo(const SchedulerConfig& config, Policy policy,
                          std::size_t episodes, std::uint64_t seed,
                          const MonteCarloOptions& options = {});

struct OracleEstimate {
  double expected_delay = 0.0;
  double p_success = 0.0;
  double p_unsuccess = 0.0;
  double se_delay = 0.0;
  double se_success = 0.0;
  double se_unsuccess = 0.0;
  std::size_t trials = 0;
};

/// Brute-force estimate of the per-device metrics: a reference device whose
/// SR opens the prediction, and a target device whose data arrives tau
/// subframes after the reference's, granted y subframes after the
/// reference's SR when eligible and timely.
OracleEstimate single_device_oracle(double tau, int y, int sigma, double delta,
                                    double beta, std::size_t trials,
                                    std::uint64_t seed);

}  // namespace pura::sim
