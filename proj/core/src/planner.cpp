#include "pura/planner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pura {

RingPartition cluster(const DeviceField& field, double d0, int n) {
  if (!(d0 > 0.0)) throw std::invalid_argument("cluster: d0 must be positive");
  if (n < 1) throw std::invalid_argument("cluster: ring count must be >= 1");

  RingPartition p;
  p.d0 = d0;
  p.n = n;
  p.origin = field.origin_index();
  p.rings.resize(static_cast<std::size_t>(n));
  p.ring_index.assign(field.size(), 0);

  const Point a = field.origin();
  const auto& pos = field.positions();
  std::vector<std::size_t> sizes(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i == p.origin) continue;
    const double k_real = std::ceil(distance(pos[i], a) / d0);
    if (k_real > n) {
      p.excluded.push_back(i);
      continue;
    }
    const int k = std::max(1, static_cast<int>(k_real));
    p.ring_index[i] = k;
    ++sizes[static_cast<std::size_t>(k - 1)];
  }
  for (std::size_t r = 0; r < sizes.size(); ++r) p.rings[r].reserve(sizes[r]);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (const int k = p.ring_index[i]; k > 0) {
      p.rings[static_cast<std::size_t>(k - 1)].push_back(i);
    }
  }
  return p;
}

std::string_view to_string(PlanStatus status) {
  switch (status) {
    case PlanStatus::targeted: return "targeted";
    case PlanStatus::already_sent_sr: return "already-sent-SR";
    case PlanStatus::timing_criterion_failed: return "timing-criterion-failed";
  }
  return "unknown";
}

double ring_threshold(int k, double tau0, int y) { return (k - 1) * tau0 + y; }

std::size_t AllocationPlan::targeted_count() const {
  std::size_t count = 0;
  for (const auto& e : entries) count += e.status == PlanStatus::targeted;
  return count;
}

const PlanEntry* AllocationPlan::find(std::size_t device) const {
  if (device >= device_entry.size() || device_entry[device] == npos) return nullptr;
  return &entries[device_entry[device]];
}

AllocationPlan plan(const RingPartition& partition,
                    const SchedulerConfig& config, Subframe sr_rx_time,
                    std::span<const DeviceState> states) {
  const std::size_t devices = partition.ring_index.size();
  const auto rings = static_cast<std::size_t>(partition.n);
  if (partition.rings.size() != rings) {
    throw std::invalid_argument("plan: partition has the wrong number of rings");
  }

  // Entries go to ring-major slots; devices are visited in id order, which
  // matches each ring's order because rings list ids ascending.
  std::vector<std::size_t> cursor(rings + 1, 0);
  for (std::size_t r = 0; r < rings; ++r) {
    const auto& ring = partition.rings[r];
    for (std::size_t j = 0; j < ring.size(); ++j) {
      const std::size_t d = ring[j];
      if (d >= devices || partition.ring_index[d] != static_cast<int>(r + 1) ||
          (j > 0 && ring[j - 1] >= d)) {
        throw std::invalid_argument("plan: partition is inconsistent at device " +
                                    std::to_string(d));
      }
    }
    cursor[r + 1] = cursor[r] + ring.size();
  }

  AllocationPlan out;
  out.sr_rx_time = sr_rx_time;
  out.device_entry.assign(devices, AllocationPlan::npos);
  out.entries.resize(cursor[rings]);

  struct RingTiming {
    double y_k;
    double reference;
    Subframe grant;
    std::size_t granted;
  };
  const double sigma = config.sigma;
  const double rx = static_cast<double>(sr_rx_time);
  std::vector<RingTiming> timing(rings);
  for (std::size_t r = 0; r < rings; ++r) {
    const int k = static_cast<int>(r + 1);
    const double y_k = ring_threshold(k, config.tau0, config.y);
    // The ring is predicted from a virtual SR on its inner boundary,
    // (k-1) tau0 after the origin's.
    timing[r] = {y_k, rx + (k - 1) * config.tau0,
                 static_cast<Subframe>(std::ceil(rx + y_k)), 0};
  }

  for (std::size_t device = 0; device < devices; ++device) {
    const int k = partition.ring_index[device];
    if (k == 0) continue;
    if (device >= states.size()) {
      throw std::out_of_range("plan: no state for device " + std::to_string(device));
    }
    const auto r = static_cast<std::size_t>(k - 1);
    RingTiming& ring = timing[r];
    const DeviceState& st = states[device];
    PlanEntry e;
    e.device = device;
    e.ring = k;
    e.y_k = ring.y_k;

    double opportunity = static_cast<double>(st.next_sr_opportunity);
    if (opportunity < ring.reference) {
      opportunity += sigma * std::ceil((ring.reference - opportunity) / sigma);
    }

    if (st.last_sr && *st.last_sr <= sr_rx_time) {
      e.status = PlanStatus::already_sent_sr;
    } else if (opportunity - rx > ring.y_k) {
      e.status = PlanStatus::targeted;
      e.grant = ring.grant;
      ++ring.granted;
    } else {
      e.status = PlanStatus::timing_criterion_failed;
    }
    const std::size_t slot = cursor[r]++;
    out.device_entry[device] = slot;
    out.entries[slot] = e;
  }
  for (const auto& ring : timing) {
    if (ring.granted > 0) out.grants_per_subframe[ring.grant] += ring.granted;
  }
  return out;
}

std::string plan_to_csv(const AllocationPlan& plan) {
  std::ostringstream out;
  out << "device_id,ring,y_k,grant_subframe,status\n";
  for (const auto& e : plan.entries) {
    out << e.device << ',' << e.ring << ',' << e.y_k << ',';
    if (e.grant) out << *e.grant;
    out << ',' << to_string(e.status) << '\n';
  }
  return out.str();
}

}  // namespace pura
