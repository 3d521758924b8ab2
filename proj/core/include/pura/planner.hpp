#pragma once

// Ring clustering and proactive grant planning around an event origin.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pura/model.hpp"

namespace pura {

using Subframe = std::int64_t;

/// Devices of a field grouped into rings 1..n of width d0 around the origin.
/// Ring k holds devices with ceil(distance / d0) == k, in ascending id order.
struct RingPartition {
  double d0 = 0.0;
  int n = 0;
  std::vector<std::vector<std::size_t>> rings;  ///< rings[k-1] = G_k
  std::vector<std::size_t> excluded;            ///< ring index above n
  std::size_t origin = 0;
  std::vector<int> ring_index;  ///< per device; 0 for origin and excluded

  /// Ring of `device`, or 0 for the origin and excluded devices.
  int ring_of(std::size_t device) const { return ring_index.at(device); }
};

/// Single pass over the field. A non-origin device co-located with the origin
/// is placed in ring 1.
RingPartition cluster(const DeviceField& field, double d0, int n);

/// What the base station knows about a device when the origin's SR arrives.
struct DeviceState {
  /// Subframe of an SR about the current disturbance already received, if any.
  std::optional<Subframe> last_sr;
  /// First SR opportunity at or after the origin's SR reception.
  Subframe next_sr_opportunity = 0;
};

enum class PlanStatus { targeted, already_sent_sr, timing_criterion_failed };

std::string_view to_string(PlanStatus status);

struct PlanEntry {
  std::size_t device = 0;
  double y_k = 0.0;
  std::optional<Subframe> grant;  ///< set iff targeted
  int ring = 0;
  PlanStatus status = PlanStatus::targeted;
};

struct AllocationPlan {
  Subframe sr_rx_time = 0;
  std::vector<PlanEntry> entries;  ///< ring order, then partition order
  std::map<Subframe, std::size_t> grants_per_subframe;

  /// Per device: index into `entries`, or npos when the device is in no ring.
  std::vector<std::size_t> device_entry;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t targeted_count() const;
  /// Entry for `device`, or nullptr when it is not in any ring.
  const PlanEntry* find(std::size_t device) const;
};

/// Threshold of ring k: (k-1) tau0 + y.
double ring_threshold(int k, double tau0, int y);

/// Plans proactive grants for every ringed device.
///
/// A device in ring k is targeted when no SR about this disturbance has been
/// received from it and its next SR opportunity, taken at or after the ring's
/// reference time sr_rx_time + (k-1) tau0, lies more than y_k after
/// sr_rx_time. The grant goes to ceil(sr_rx_time + y_k).
///
/// `states` is indexed by device id; a ringed device without a state throws
/// std::out_of_range naming the device. A partition whose rings are not
/// ascending or disagree with ring_index throws std::invalid_argument.
AllocationPlan plan(const RingPartition& partition,
                    const SchedulerConfig& config, Subframe sr_rx_time,
                    std::span<const DeviceState> states);

/// CSV with header device_id,ring,y_k,grant_subframe,status. Non-targeted
/// rows leave grant_subframe empty.
std::string plan_to_csv(const AllocationPlan& plan);

}  // namespace pura
