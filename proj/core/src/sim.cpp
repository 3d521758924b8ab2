#include "pura/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "parallel.hpp"

namespace pura::sim {

std::string_view to_string(Policy policy) {
  switch (policy) {
    case Policy::standard: return "standard";
    case Policy::one_d: return "one_d";
    case Policy::two_d_pura: return "two_d_pura";
  }
  return "unknown";
}

Policy parse_policy(std::string_view name) {
  if (name == "standard") return Policy::standard;
  if (name == "one_d") return Policy::one_d;
  if (name == "two_d_pura") return Policy::two_d_pura;
  throw std::invalid_argument("unknown policy '" + std::string(name) +
                              "' (expected standard, one_d or two_d_pura)");
}

std::string_view to_string(CompletionPath path) {
  switch (path) {
    case CompletionPath::proactive_success: return "proactive-success";
    case CompletionPath::proactive_waste_then_standard:
      return "proactive-waste-then-standard";
    case CompletionPath::standard: return "standard";
  }
  return "unknown";
}

Rng RngPolicy::stream(std::uint64_t index) const {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(seed_), hi(seed_), lo(index), hi(index), 0x2d50u};
  return Rng(seq);
}

Subframe next_opportunity_after(Subframe after, int offset, int sigma) {
  const Subframe first = after + 1;
  Subframe shift = (offset - first) % sigma;
  if (shift < 0) shift += sigma;
  return first + shift;
}

DeviceField sample_field(double lambda, double radius, int sigma, Rng& rng) {
  if (!(lambda > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("sample_field: lambda and radius must be positive");
  }
  const double mean = lambda * std::numbers::pi * radius * radius;
  std::poisson_distribution<long> count_dist(mean);
  const long count = count_dist(rng);
  if (count <= 0) throw std::runtime_error("sample_field: no devices sampled");

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> offset_dist(1, sigma);
  std::vector<Point> positions;
  std::vector<int> offsets;
  positions.reserve(static_cast<std::size_t>(count));
  offsets.reserve(static_cast<std::size_t>(count));

  std::size_t origin = 0;
  double best = std::numeric_limits<double>::infinity();
  for (long i = 0; i < count; ++i) {
    const double r = radius * std::sqrt(unit(rng));
    const double theta = 2.0 * std::numbers::pi * unit(rng);
    positions.push_back({r * std::cos(theta), r * std::sin(theta)});
    offsets.push_back(offset_dist(rng));
    if (r < best) {
      best = r;
      origin = static_cast<std::size_t>(i);
    }
  }
  return DeviceField(std::move(positions), std::move(offsets), origin, sigma);
}

double EpisodeOutcome::mean_delay() const {
  if (records.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : records) sum += r.delay;
  return sum / static_cast<double>(records.size());
}

namespace {

// Bucket grid over device positions supporting removal and nearest-neighbor
// queries among the remaining devices.
class NeighborGrid {
 public:
  NeighborGrid(const std::vector<Point>& pos, double cell) : pos_(pos), cell_(cell) {
    min_x_ = min_y_ = std::numeric_limits<double>::infinity();
    double max_x = -min_x_, max_y = -min_y_;
    for (const auto& p : pos) {
      min_x_ = std::min(min_x_, p.x);
      min_y_ = std::min(min_y_, p.y);
      max_x = std::max(max_x, p.x);
      max_y = std::max(max_y, p.y);
    }
    nx_ = static_cast<int>((max_x - min_x_) / cell_) + 1;
    ny_ = static_cast<int>((max_y - min_y_) / cell_) + 1;
    cells_.resize(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_));
    slot_.assign(pos.size(), npos);
  }

  void insert(std::size_t i) {
    auto& c = cells_[cell_of(pos_[i])];
    slot_[i] = c.size();
    c.push_back(i);
  }

  void remove(std::size_t i) {
    if (slot_[i] == npos) return;
    auto& c = cells_[cell_of(pos_[i])];
    const std::size_t at = slot_[i];
    c[at] = c.back();
    slot_[c[at]] = at;
    c.pop_back();
    slot_[i] = npos;
  }

  std::optional<std::size_t> nearest(Point p) const {
    const int cx = clamp_x(p.x), cy = clamp_y(p.y);
    std::optional<std::size_t> best;
    double best_d2 = std::numeric_limits<double>::infinity();
    const int max_r = std::max(nx_, ny_);
    for (int r = 0; r <= max_r; ++r) {
      if (best) {
        const double reach = (r - 1) * cell_;
        if (reach > 0.0 && reach * reach > best_d2) break;
      }
      for (int gx = cx - r; gx <= cx + r; ++gx) {
        if (gx < 0 || gx >= nx_) continue;
        const bool edge_x = gx == cx - r || gx == cx + r;
        // Interior columns contribute only their top and bottom cells.
        const int step = edge_x || r == 0 ? 1 : 2 * r;
        for (int gy = cy - r; gy <= cy + r; gy += step) {
          if (gy < 0 || gy >= ny_) continue;
          for (std::size_t i : cells_[index(gx, gy)]) {
            const double dx = pos_[i].x - p.x, dy = pos_[i].y - p.y;
            const double d2 = dx * dx + dy * dy;
            if (d2 < best_d2 || (d2 == best_d2 && best && i < *best)) {
              best_d2 = d2;
              best = i;
            }
          }
        }
      }
    }
    return best;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  int clamp_x(double x) const {
    return std::clamp(static_cast<int>((x - min_x_) / cell_), 0, nx_ - 1);
  }
  int clamp_y(double y) const {
    return std::clamp(static_cast<int>((y - min_y_) / cell_), 0, ny_ - 1);
  }
  std::size_t index(int gx, int gy) const {
    return static_cast<std::size_t>(gy) * static_cast<std::size_t>(nx_) +
           static_cast<std::size_t>(gx);
  }
  std::size_t cell_of(Point p) const { return index(clamp_x(p.x), clamp_y(p.y)); }

  const std::vector<Point>& pos_;
  double cell_;
  double min_x_, min_y_;
  int nx_ = 1, ny_ = 1;
  std::vector<std::vector<std::size_t>> cells_;
  std::vector<std::size_t> slot_;
};

struct Timeline {
  std::vector<double> dist;
  std::vector<double> arrival;
  std::vector<Subframe> buffered;
  std::vector<Subframe> sr;  // standard-path SR subframe
  std::vector<char> has_data;
};

double draw_onset(const DeviceField& field, int sigma, Rng& rng,
                  const EpisodeOptions& options) {
  if (!options.origin_lead) {
    return std::uniform_real_distribution<double>(0.0, sigma)(rng);
  }
  const double lead = *options.origin_lead;
  if (!(lead > 1.0 && lead < sigma + 1.0)) {
    throw std::invalid_argument("run_episode: origin_lead outside (1, sigma + 1)");
  }
  const int offset = field.offsets()[field.origin_index()];
  return offset + sigma - lead;
}

void complete_standard(DeviceRecord& rec, const Timeline& tl,
                       const SchedulerConfig& c, CompletionPath path) {
  const std::size_t i = rec.device;
  rec.path = path;
  rec.sent_sr = true;
  rec.delay = static_cast<double>(tl.sr[i]) - tl.arrival[i] + c.beta + c.grant_to_data();
}

void complete_proactive(DeviceRecord& rec, const Timeline& tl,
                        const SchedulerConfig& c, Subframe grant) {
  rec.path = CompletionPath::proactive_success;
  rec.sent_sr = false;
  rec.delay = static_cast<double>(grant) - tl.arrival[rec.device] + c.grant_to_data();
}

void run_two_d(const DeviceField& field, const SchedulerConfig& c,
               const Timeline& tl, Subframe origin_sr,
               std::vector<DeviceRecord>& records,
               std::vector<std::size_t>& record_of, EpisodeOutcome& out) {
  const RingPartition partition = cluster(field, c.ring_width(), c.ring_count());

  std::vector<DeviceState> states(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (tl.has_data[i] && tl.sr[i] <= origin_sr) states[i].last_sr = tl.sr[i];
    states[i].next_sr_opportunity =
        next_opportunity_after(origin_sr - 1, field.offsets()[i], c.sigma);
  }
  out.plan = plan(partition, c, origin_sr, states);
  const AllocationPlan& allocation = *out.plan;

  for (const auto& entry : allocation.entries) {
    if (entry.status != PlanStatus::targeted) continue;
    const std::size_t i = entry.device;
    const Subframe g = *entry.grant;
    if (!tl.has_data[i]) {
      ++out.idle_grants;
      continue;
    }
    DeviceRecord& rec = records[record_of[i]];
    if (tl.sr[i] < g) {
      // SR reaches the BS first; the pending grant is dropped.
      complete_standard(rec, tl, c, CompletionPath::standard);
    } else if (tl.buffered[i] < g) {
      complete_proactive(rec, tl, c, g);
    } else {
      complete_standard(rec, tl, c, CompletionPath::proactive_waste_then_standard);
    }
  }
}

void run_one_d(const DeviceField& field, const SchedulerConfig& c,
               const Timeline& tl, Subframe origin_sr,
               std::vector<DeviceRecord>& records,
               std::vector<std::size_t>& record_of, EpisodeOutcome& out) {
  const auto& pos = field.positions();
  const std::size_t origin = field.origin_index();
  const double spacing =
      std::max(1e-9, 0.5 / std::sqrt(std::max(c.lambda, 1e-12)));
  NeighborGrid grid(pos, 2.0 * spacing);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i != origin) grid.insert(i);
  }

  using Event = std::pair<Subframe, std::size_t>;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  events.emplace(origin_sr, origin);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i != origin && tl.has_data[i]) events.emplace(tl.sr[i], i);
  }
  std::vector<char> served(pos.size(), 0);

  while (!events.empty()) {
    const auto [now, sender] = events.top();
    events.pop();
    if (served[sender]) continue;
    grid.remove(sender);

    const auto target = grid.nearest(pos[sender]);
    if (!target) continue;
    const std::size_t m = *target;
    grid.remove(m);

    const bool sent = tl.has_data[m] && tl.sr[m] <= now;
    const Subframe next = next_opportunity_after(now - 1, field.offsets()[m], c.sigma);
    if (sent || next - now <= c.y) continue;

    const Subframe g = now + c.y;
    if (!tl.has_data[m]) {
      ++out.idle_grants;
      continue;
    }
    DeviceRecord& rec = records[record_of[m]];
    if (tl.sr[m] < g) {
      complete_standard(rec, tl, c, CompletionPath::standard);
    } else if (tl.buffered[m] < g) {
      complete_proactive(rec, tl, c, g);
      served[m] = 1;
    } else {
      complete_standard(rec, tl, c, CompletionPath::proactive_waste_then_standard);
    }
  }
}

}  // namespace

EpisodeOutcome run_episode(const DeviceField& field, const SchedulerConfig& config,
                           Policy policy, Rng& rng, const EpisodeOptions& options) {
  const SchedulerConfig& c = config;
  const std::size_t n = field.size();
  const std::size_t origin = field.origin_index();
  const Point a = field.origin();
  const double l = c.radius();

  EpisodeOutcome out;
  out.onset = draw_onset(field, c.sigma, rng, options);
  out.origin_sr = next_opportunity_after(
      static_cast<Subframe>(std::ceil(out.onset)), field.offsets()[origin], c.sigma);

  Timeline tl;
  tl.dist.resize(n);
  tl.arrival.assign(n, std::numeric_limits<double>::infinity());
  tl.buffered.assign(n, std::numeric_limits<Subframe>::max());
  tl.sr.assign(n, std::numeric_limits<Subframe>::max());
  tl.has_data.assign(n, 0);

  std::vector<DeviceRecord> records;
  std::vector<std::size_t> record_of(n, static_cast<std::size_t>(-1));
  for (std::size_t i = 0; i < n; ++i) {
    tl.dist[i] = distance(field.positions()[i], a);
    if (i == origin || tl.dist[i] > l) continue;
    tl.has_data[i] = 1;
    tl.arrival[i] = out.onset + tl.dist[i] / c.v;
    tl.buffered[i] = static_cast<Subframe>(std::ceil(tl.arrival[i]));
    tl.sr[i] = next_opportunity_after(tl.buffered[i], field.offsets()[i], c.sigma);

    DeviceRecord rec;
    rec.device = i;
    rec.distance = tl.dist[i];
    rec.arrival = tl.arrival[i];
    record_of[i] = records.size();
    records.push_back(rec);
  }
  for (auto& rec : records) complete_standard(rec, tl, c, CompletionPath::standard);

  switch (policy) {
    case Policy::standard:
      break;
    case Policy::two_d_pura:
      run_two_d(field, c, tl, out.origin_sr, records, record_of, out);
      break;
    case Policy::one_d:
      run_one_d(field, c, tl, out.origin_sr, records, record_of, out);
      break;
  }

  for (const auto& rec : records) {
    out.success_count += rec.path == CompletionPath::proactive_success;
    out.waste_count += rec.path == CompletionPath::proactive_waste_then_standard;
  }
  out.records = std::move(records);
  return out;
}

std::string trace_to_csv(const EpisodeOutcome& outcome) {
  std::ostringstream out;
  out.precision(10);
  out << "device_id,distance,arrival,path,delay,sent_sr\n";
  for (const auto& r : outcome.records) {
    out << r.device << ',' << r.distance << ',' << r.arrival << ','
        << to_string(r.path) << ',' << r.delay << ',' << (r.sent_sr ? 1 : 0)
        << '\n';
  }
  return out.str();
}

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      carry += (sum - t) + x;
    } else {
      carry += (x - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + carry; }
};

struct EpisodeTally {
  std::size_t devices = 0;
  std::size_t success = 0;
  std::size_t waste = 0;
  double delay_sum = 0.0;
  double delay_sq_sum = 0.0;
};

}  // namespace

MetricsReport monte_carlo(const SchedulerConfig& config, Policy policy,
                          std::size_t episodes, std::uint64_t seed,
                          const MonteCarloOptions& options) {
  if (episodes < 1) throw std::invalid_argument("monte_carlo: episodes must be >= 1");
  const SchedulerConfig c = validate(config);
  const RngPolicy streams(seed);

  std::vector<EpisodeTally> tallies(episodes);
  detail::parallel_for(episodes, options.threads, [&](std::size_t e) {
    Rng rng = streams.stream(e);
    std::optional<DeviceField> field;
    try {
      field.emplace(sample_field(c.lambda, c.radius(), c.sigma, rng));
    } catch (const std::runtime_error&) {
      return;  // empty field: nothing to measure
    }
    EpisodeOptions opts;
    if (options.stratify_origin) {
      std::uniform_real_distribution<double> within(0.0, 1.0);
      double u = within(rng);
      if (u == 0.0) u = 0.5;
      opts.origin_lead = 1.0 + c.sigma * (static_cast<double>(e) + u) /
                                   static_cast<double>(episodes);
    }
    const EpisodeOutcome outcome = run_episode(*field, c, policy, rng, opts);

    EpisodeTally t;
    t.devices = outcome.device_count();
    t.success = outcome.success_count;
    t.waste = outcome.waste_count;
    CompensatedSum s, sq;
    for (const auto& r : outcome.records) {
      s.add(r.delay);
      sq.add(r.delay * r.delay);
    }
    t.delay_sum = s.value();
    t.delay_sq_sum = sq.value();
    tallies[e] = t;
  });

  std::size_t devices = 0, success = 0, waste = 0;
  CompensatedSum delay, delay_sq;
  for (const auto& t : tallies) {
    devices += t.devices;
    success += t.success;
    waste += t.waste;
    delay.add(t.delay_sum);
    delay_sq.add(t.delay_sq_sum);
  }

  MetricsReport r;
  r.source = MetricSource::simulated;
  r.samples = devices;
  if (devices == 0) return r;
  const double n = static_cast<double>(devices);
  r.expected_delay = delay.value() / n;
  r.sr_saving = static_cast<double>(success) / n;
  r.wastage = static_cast<double>(waste) / n;
  const double var = std::max(0.0, delay_sq.value() / n - r.expected_delay * r.expected_delay);
  constexpr double z = 1.959963984540054;
  r.ci_half_width_delay = z * std::sqrt(var / n);
  const double p_var = std::max(r.sr_saving * (1.0 - r.sr_saving),
                                r.wastage * (1.0 - r.wastage));
  r.ci_half_width_prob = z * std::sqrt(p_var / n);
  return r;
}

OracleEstimate single_device_oracle(double tau, int y, int sigma, double delta,
                                    double beta, std::size_t trials,
                                    std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("single_device_oracle: trials must be >= 1");
  if (sigma < 2 || y < 1 || y >= sigma || !(tau >= 0.0)) {
    throw std::invalid_argument("single_device_oracle: require 1 <= y < sigma, tau >= 0");
  }
  Rng rng = RngPolicy(seed).stream(0);
  std::uniform_int_distribution<int> offset(1, sigma);
  std::uniform_real_distribution<double> phase(0.0, sigma);
  const double gap = delta - 0.5;

  CompensatedSum d_sum, d_sq;
  std::size_t success = 0, unsuccess = 0;
  for (std::size_t k = 0; k < trials; ++k) {
    const int ref_offset = offset(rng);
    const int dev_offset = offset(rng);
    const double onset = phase(rng);

    const auto ref_sr = next_opportunity_after(
        static_cast<Subframe>(std::ceil(onset)), ref_offset, sigma);
    const double arrival = onset + tau;
    const auto buffered = static_cast<Subframe>(std::ceil(arrival));
    const auto dev_sr = next_opportunity_after(buffered, dev_offset, sigma);
    const auto next = next_opportunity_after(ref_sr - 1, dev_offset, sigma);

    const bool targeted = dev_sr >= ref_sr && next - ref_sr > y;
    const Subframe grant = ref_sr + y;
    double delay;
    if (targeted && buffered < grant) {
      ++success;
      delay = static_cast<double>(grant) - arrival + gap;
    } else {
      unsuccess += targeted;
      delay = static_cast<double>(dev_sr) - arrival + beta + gap;
    }
    d_sum.add(delay);
    d_sq.add(delay * delay);
  }

  const double n = static_cast<double>(trials);
  OracleEstimate est;
  est.trials = trials;
  est.expected_delay = d_sum.value() / n;
  est.p_success = static_cast<double>(success) / n;
  est.p_unsuccess = static_cast<double>(unsuccess) / n;
  const double var = std::max(0.0, d_sq.value() / n - est.expected_delay * est.expected_delay);
  est.se_delay = std::sqrt(var / n);
  est.se_success = std::sqrt(est.p_success * (1.0 - est.p_success) / n);
  est.se_unsuccess = std::sqrt(est.p_unsuccess * (1.0 - est.p_unsuccess) / n);
  return est;
}

}  // namespace pura::sim
