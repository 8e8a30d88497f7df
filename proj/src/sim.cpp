#include "prt/sim.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace prt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::int64_t sector_key(int seg, int sector) {
  return (static_cast<std::int64_t>(seg) << 24) | sector;
}
}  // namespace

// ---------------------------------------------------------------------------
// Kinematics
// ---------------------------------------------------------------------------

CrossStep sector_step(double v_in, double sector_len, double a_max, double d_max, double v_limit,
                      double stop_dist) {
  const double L = sector_len;
  double v_exit_cap = v_limit;
  if (std::isfinite(stop_dist)) {
    const double brake = std::sqrt(std::max(0.0, 2.0 * d_max * (stop_dist - L)));
    v_exit_cap = std::min(v_exit_cap, brake);
  }
  const double v_acc_max = std::sqrt(v_in * v_in + 2.0 * a_max * L);

  CrossStep out;
  if (v_exit_cap >= std::min(v_acc_max, v_limit)) {
    // No braking inside this sector.
    if (v_acc_max <= v_limit) {
      out.v_exit = v_acc_max;
      out.dt = (out.v_exit - v_in) / a_max;
    } else {
      const double d_acc = (v_limit * v_limit - v_in * v_in) / (2.0 * a_max);
      out.v_exit = v_limit;
      out.dt = (v_limit - v_in) / a_max + (L - d_acc) / v_limit;
    }
    return out;
  }

  const double v_exit = v_exit_cap;
  if (v_exit < v_in) {
    const double need = (v_in * v_in - v_exit * v_exit) / (2.0 * L);
    if (need >= d_max) {
      // Entry speed was already at the braking envelope: pure deceleration.
      out.v_exit = v_exit;
      out.dt = 2.0 * L / (v_in + v_exit);
      return out;
    }
  }
  // Accelerate to a peak, then brake to v_exit within the sector.
  double peak_sq =
      (2.0 * a_max * d_max * L + d_max * v_in * v_in + a_max * v_exit * v_exit) / (a_max + d_max);
  double peak = std::sqrt(std::max(peak_sq, 0.0));
  if (peak <= v_limit) {
    out.v_exit = v_exit;
    out.dt = (peak - v_in) / a_max + (peak - v_exit) / d_max;
  } else {
    const double d_acc = (v_limit * v_limit - v_in * v_in) / (2.0 * a_max);
    const double d_dec = (v_limit * v_limit - v_exit * v_exit) / (2.0 * d_max);
    out.v_exit = v_exit;
    out.dt = (v_limit - v_in) / a_max + (L - d_acc - d_dec) / v_limit +
             (v_limit - v_exit) / d_max;
  }
  return out;
}

// ---------------------------------------------------------------------------
// World access for the EVM engine
// ---------------------------------------------------------------------------

class SimWorld : public WorldAccess {
 public:
  explicit SimWorld(Simulation& sim) : sim_(sim) {}
  StationSnapshot snapshot(int node) override { return sim_.snapshot_of(node); }
  int movable_empties(int node) override { return sim_.movable_empties_at(node); }
  int pick_movable_empty(int node) override {
    std::vector<int> ids;
    const StationRt& st = sim_.stations_[node];
    for (int vid : st.berth)
      if (vid >= 0 && sim_.vehicles_[vid].phase == VehPhase::IdleBerth) ids.push_back(vid);
    if (ids.empty()) return -1;
    const int pick = sim_.control_rng_[node].uniform_int(0, static_cast<int>(ids.size()) - 1);
    return ids[pick];
  }

 private:
  Simulation& sim_;
};

// ---------------------------------------------------------------------------
// Construction
// ---------------------------------------------------------------------------

Simulation::Simulation(std::shared_ptr<const Network> net,
                       std::shared_ptr<const DistanceTable> dist, OdmMatrix odm,
                       DemandProfile profile, EvmConfig evm, SimConfig cfg)
    : net_(std::move(net)),
      dist_(std::move(dist)),
      odm_(std::move(odm)),
      profile_(std::move(profile)),
      evm_(evm),
      cfg_(cfg) {
  const int n = static_cast<int>(net_->nodes.size());
  if (net_->sector_length_m > cfg_.veh.separation_m / 2.0)
    throw std::invalid_argument("sector length must be at most half the separation distance");
  lookahead_ = static_cast<int>(std::ceil(cfg_.veh.separation_m / net_->sector_length_m));

  station_pos_.assign(n, -1);
  for (size_t i = 0; i < net_->stations.size(); ++i)
    station_pos_[net_->stations[i]] = static_cast<int>(i);

  stations_.resize(n);
  for (int v : net_->stations) {
    stations_[v].berth.assign(net_->nodes[v].berths, -1);
    if (net_->nodes[v].entry_buffer < 1 || net_->nodes[v].exit_buffer < 1)
      throw std::invalid_argument(net_->nodes[v].name + ": entry/exit buffers must hold >= 1");
  }
  for (int v : net_->capacitors) {
    stations_[v].berth.assign(net_->nodes[v].berths, -1);
    if (net_->nodes[v].entry_buffer < 1 || net_->nodes[v].exit_buffer < 1)
      throw std::invalid_argument(net_->nodes[v].name + ": entry/exit buffers must hold >= 1");
  }

  occupancy_.resize(net_->segments.size());
  for (size_t s = 0; s < net_->segments.size(); ++s)
    occupancy_[s].assign(net_->segments[s].sectors, -1);
  seg_density_.assign(net_->segments.size(), 0);
  join_queue_.resize(n);

  std::vector<double> fallback(n, 1e9);
  for (size_t i = 0; i < net_->stations.size(); ++i) {
    const double r = profile_.rate_gps[i];
    fallback[net_->stations[i]] = r > 0 ? 1.0 / r : 1e9;
  }
  stats_ = HistoricalStats(n, std::move(fallback));

  demand_rng_.reserve(n);
  service_rng_.reserve(n);
  control_rng_.reserve(n);
  for (int i = 0; i < n; ++i) {
    demand_rng_.emplace_back(derive_seed(cfg_.seed, i, 1));
    service_rng_.emplace_back(derive_seed(cfg_.seed, i, 2));
    control_rng_.emplace_back(derive_seed(cfg_.seed, i, 3));
  }

  route_ctx_.d_av = dist_->d_av;
  route_ctx_.free_time_av = dist_->free_time_av;
  route_ctx_.fleet_size = cfg_.fleet_size;
  route_ctx_.density = &seg_density_;

  warmup_end_ = cfg_.warmup_s;
  t_end_ = cfg_.warmup_s + cfg_.duration_s;
  world_ = std::make_unique<SimWorld>(*this);

  place_initial_vehicles();

  if (!cfg_.saturated) {
    for (size_t i = 0; i < net_->stations.size(); ++i)
      if (profile_.rate_gps[i] > 0) schedule_next_arrival(net_->stations[i]);
  }

  const bool evm_active = cfg_.evm_enabled && !cfg_.saturated;
  if (evm_active) {
    std::vector<int> tick_nodes = net_->stations;
    tick_nodes.insert(tick_nodes.end(), net_->capacitors.begin(), net_->capacitors.end());
    std::sort(tick_nodes.begin(), tick_nodes.end());
    const double period = evm_.balancing_period_s;
    for (size_t k = 0; k < tick_nodes.size(); ++k)
      schedule(period * static_cast<double>(k) / tick_nodes.size(), kBalanceTick, tick_nodes[k]);
    for (Vehicle& v : vehicles_)
      if (v.phase == VehPhase::IdleBerth && station_pos_[v.node] >= 0)
        schedule(clock_ + evm_.withdraw_timeout_s, kWithdrawCheck, v.id,
                 static_cast<int>(v.wd_epoch & 0x7fffffff));
  }

  if (cfg_.saturated) {
    for (int s : net_->stations) {
      StationRt& st = stations_[s];
      for (size_t b = 0; b < st.berth.size(); ++b)
        if (st.berth[b] >= 0 && vehicles_[st.berth[b]].phase == VehPhase::IdleBerth) {
          // Saturated queues: a fresh group is always waiting.
          GroupRec rec;
          rec.g = sample_group(odm_, station_list_index(s), 0.0, demand_rng_[s]);
          rec.origin_node = s;
          rec.dest_node = net_->stations[rec.g.destination];
          groups_.push_back(rec);
          ++tallies_.generated;
          st.queue.push_back(static_cast<int>(groups_.size()) - 1);
          start_boarding(s, static_cast<int>(b));
        }
    }
  }
}

void Simulation::place_initial_vehicles() {
  vehicles_.resize(cfg_.fleet_size);
  for (int i = 0; i < cfg_.fleet_size; ++i) vehicles_[i].id = i;

  std::vector<std::pair<int, int>> plan;  // (node, count)
  if (!cfg_.explicit_placement.empty()) {
    plan = cfg_.explicit_placement;
  } else {
    std::vector<int> primary = cfg_.placement == SimConfig::Placement::Stations
                                   ? net_->stations
                                   : net_->capacitors;
    std::vector<int> overflow = cfg_.placement == SimConfig::Placement::Stations
                                    ? net_->capacitors
                                    : net_->stations;
    std::vector<int> order = primary;
    order.insert(order.end(), overflow.begin(), overflow.end());
    std::vector<int> count(net_->nodes.size(), 0);
    int placed = 0;
    bool progress = true;
    while (placed < cfg_.fleet_size && progress) {
      progress = false;
      for (int node : order) {
        if (placed >= cfg_.fleet_size) break;
        if (count[node] < net_->nodes[node].berths) {
          ++count[node];
          ++placed;
          progress = true;
        }
      }
    }
    if (placed < cfg_.fleet_size)
      throw std::runtime_error("fleet does not fit into the network's berths");
    for (size_t node = 0; node < count.size(); ++node)
      if (count[node] > 0) plan.emplace_back(static_cast<int>(node), count[node]);
  }

  int vid = 0;
  for (auto [node, cnt] : plan) {
    StationRt& st = stations_[node];
    for (int c = 0; c < cnt; ++c) {
      if (vid >= cfg_.fleet_size) break;
      int slot = -1;
      for (size_t b = 0; b < st.berth.size(); ++b)
        if (st.berth[b] < 0) {
          slot = static_cast<int>(b);
          break;
        }
      if (slot < 0) throw std::runtime_error("initial placement exceeds berths at node");
      Vehicle& v = vehicles_[vid];
      v.phase = VehPhase::IdleBerth;
      v.node = node;
      v.slot = slot;
      v.idle_since = 0;
      st.berth[slot] = vid;
      ++vid;
    }
  }
  if (vid < cfg_.fleet_size) throw std::runtime_error("initial placement places too few vehicles");
}

// ---------------------------------------------------------------------------
// Event machinery
// ---------------------------------------------------------------------------

void Simulation::schedule(double t, std::uint8_t kind, int a, int b, std::uint64_t token) {
  heap_.push_back(Event{t, seq_++, kind, a, b, token});
  std::push_heap(heap_.begin(), heap_.end());
}

void Simulation::run() { run_until(t_end_); }

void Simulation::run_until(double t_end) {
  while (!heap_.empty()) {
    if (heap_.front().t > t_end) break;
    std::pop_heap(heap_.begin(), heap_.end());
    Event e = heap_.back();
    heap_.pop_back();
    clock_ = e.t;
    handle(e);
    if (cfg_.audit) check_invariants();
  }
  if (heap_.empty()) {
    long long waiting = 0, riding = 0;
    for (const GroupRec& g : groups_) {
      if (g.state == GroupRec::State::Queued) ++waiting;
      if (g.state == GroupRec::State::Riding || g.state == GroupRec::State::Boarding) ++riding;
    }
    if (waiting + riding > 0) {
      std::ostringstream os;
      os << "simulation deadlock at t=" << clock_ << ": no pending events with " << waiting
         << " queued and " << riding << " in-service groups";
      throw std::runtime_error(os.str());
    }
  }
  clock_ = t_end;
}

void Simulation::handle(const Event& e) {
  switch (e.kind) {
    case kArrival:
      on_group_arrival(e.a);
      break;
    case kCross:
    case kWake: {
      Vehicle& v = vehicles_[e.a];
      if (e.token != v.move_token) return;  // superseded
      if (v.phase == VehPhase::Track) {
        try_move(e.a);
      } else if (v.phase == VehPhase::ExitBuffer) {
        try_depart(v.node);
      }
      break;
    }
    case kHopDone:
      on_hop_done(e.a);
      break;
    case kBoardDone:
      on_board_done(e.a);
      break;
    case kAlightDone:
      on_alight_done(e.a);
      break;
    case kBalanceTick:
      schedule(clock_ + evm_.balancing_period_s, kBalanceTick, e.a);
      on_balancing_tick(e.a);
      break;
    case kWithdrawCheck:
      on_withdraw_check(e.a, static_cast<std::uint64_t>(e.b));
      break;
    default:
      break;
  }
}

void Simulation::log_event(const char* kind, int vehicle, const std::string& where,
                           const std::string& detail) {
  if (!event_log_) return;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", clock_);
  (*event_log_) << buf << ',' << kind << ',' << vehicle << ',' << where << ',' << detail << '\n';
}

// ---------------------------------------------------------------------------
// Demand
// ---------------------------------------------------------------------------

void Simulation::schedule_next_arrival(int station_node) {
  const double rate = profile_.rate_gps[station_list_index(station_node)];
  const double dt = sample_interarrival(rate, demand_rng_[station_node]);
  if (std::isfinite(dt)) schedule(clock_ + dt, kArrival, station_node);
}

void Simulation::on_group_arrival(int station_node) {
  schedule_next_arrival(station_node);

  GroupRec rec;
  rec.g = sample_group(odm_, station_list_index(station_node), clock_, demand_rng_[station_node]);
  rec.origin_node = station_node;
  rec.dest_node = net_->stations[rec.g.destination];
  groups_.push_back(rec);
  const int gid = static_cast<int>(groups_.size()) - 1;
  ++tallies_.generated;
  stats_.record_arrival(station_node, clock_);
  StationRt& st = stations_[station_node];
  st.queue.push_back(gid);
  log_event("arrival", -1, net_->nodes[station_node].name, std::to_string(rec.g.size));

  const int slot = idle_in_berth_lowest(station_node);
  if (slot >= 0) {
    start_boarding(station_node, slot);
  } else if (cfg_.evm_enabled && count_idle_L(station_node) == 0) {
    on_calling_event(station_node);
  }
}

// ---------------------------------------------------------------------------
// Track movement
// ---------------------------------------------------------------------------

double Simulation::speed_cap(const Segment& seg) const {
  const double veh_cap = seg.kind == SegmentKind::Highway ? cfg_.veh.v_highway : cfg_.veh.v_road;
  return std::min(seg.speed_mps, veh_cap);
}

double Simulation::stop_distance_from(const Vehicle& v, int sector_index_entering) const {
  const Segment& seg = net_->segments[v.seg];
  return (seg.sectors - sector_index_entering) * net_->sector_length_m + v.rem_after_seg;
}

void Simulation::subscribe(int seg, int sector, int vid) {
  sector_subs_[sector_key(seg, sector)].push_back(vid);
}

void Simulation::wake_subscribers(int seg, int sector) {
  auto it = sector_subs_.find(sector_key(seg, sector));
  if (it == sector_subs_.end()) return;
  std::vector<int> waiters = std::move(it->second);
  sector_subs_.erase(it);
  for (int vid : waiters)
    schedule(clock_, kWake, vid, 0, vehicles_[vid].move_token);
}

void Simulation::leave_sector(int seg, int sector) {
  occupancy_[seg][sector] = -1;
  wake_subscribers(seg, sector);
}

bool Simulation::window_free(const Vehicle& v, int* blocking_seg, int* blocking_sector) const {
  // Sectors v.sector+1 .. v.sector+lookahead_ along the route must be free.
  int seg = v.seg;
  int sector = v.sector;
  int rpos = v.route_pos;
  for (int k = 0; k < lookahead_; ++k) {
    ++sector;
    while (sector >= net_->segments[seg].sectors) {
      if (rpos + 1 >= static_cast<int>(v.route.size())) return true;  // station boundary
      sector = 0;
      ++rpos;
      seg = v.route[rpos];
    }
    if (occupancy_[seg][sector] >= 0) {
      if (blocking_seg) *blocking_seg = seg;
      if (blocking_sector) *blocking_sector = sector;
      return false;
    }
  }
  return true;
}

void Simulation::join_register(int node, int vid) {
  auto& q = join_queue_[node];
  for (const auto& [t, id] : q)
    if (id == vid) return;
  // Insertion sorted by (arrival time, id); arrival time is "now".
  auto pos = q.end();
  while (pos != q.begin()) {
    auto prev = std::prev(pos);
    if (prev->first < clock_ || (prev->first == clock_ && prev->second < vid)) break;
    pos = prev;
  }
  q.insert(pos, {clock_, vid});
}

bool Simulation::join_is_head(int node, int vid) const {
  const auto& q = join_queue_[node];
  return !q.empty() && q.front().second == vid;
}

void Simulation::join_pop(int node, int vid) {
  auto& q = join_queue_[node];
  if (!q.empty() && q.front().second == vid) {
    q.pop_front();
    if (!q.empty())
      schedule(clock_, kWake, q.front().second, 0, vehicles_[q.front().second].move_token);
  }
}

void Simulation::try_move(int vid) {
  Vehicle& v = vehicles_[vid];
  const Segment& seg = net_->segments[v.seg];
  const bool last_sector = v.sector == seg.sectors - 1;
  const bool final_segment = v.route_pos + 1 >= static_cast<int>(v.route.size());

  if (last_sector && final_segment) {
    arrive_at_station(vid);
    return;
  }

  const bool crossing_node = last_sector;
  int next_seg = v.seg, next_sector = v.sector + 1;
  if (crossing_node) {
    next_seg = v.route[v.route_pos + 1];
    next_sector = 0;
    const int node = seg.to;
    if (net_->nodes[node].kind == NodeKind::Join) {
      join_register(node, vid);
      if (!join_is_head(node, vid)) {
        v.speed = 0;  // waits for the join grant
        return;
      }
    }
  }

  int bseg = -1, bsec = -1;
  if (!window_free(v, &bseg, &bsec)) {
    v.speed = 0;
    subscribe(bseg, bsec, vid);
    return;
  }

  if (crossing_node) {
    const int node = seg.to;
    if (net_->nodes[node].kind == NodeKind::Join) join_pop(node, vid);
    leave_sector(v.seg, v.sector);
    --seg_density_[v.seg];
    ++seg_density_[next_seg];
    ++v.route_pos;
    v.seg = next_seg;
    v.sector = 0;
    v.rem_after_seg -= net_->segments[next_seg].length_m;
    occupancy_[next_seg][0] = vid;
    log_event("seg", vid, net_->nodes[net_->segments[next_seg].from].name + "->" +
                              net_->nodes[net_->segments[next_seg].to].name, "");
    if (v.route_pos + 1 == static_cast<int>(v.route.size()))
      try_make_room(v.trip_dest, v.group >= 0);
  } else {
    leave_sector(v.seg, v.sector);
    v.sector = next_sector;
    occupancy_[v.seg][v.sector] = vid;
  }

  const Segment& cur = net_->segments[v.seg];
  double v_limit = speed_cap(cur);
  // Entering the last sector of a segment caps the exit speed at the next
  // segment's limit (all segments are long enough to brake within).
  if (v.sector == cur.sectors - 1 && v.route_pos + 1 < static_cast<int>(v.route.size()))
    v_limit = std::min(v_limit, speed_cap(net_->segments[v.route[v.route_pos + 1]]));
  const CrossStep step = sector_step(v.speed, net_->sector_length_m, cfg_.veh.a_max,
                                     cfg_.veh.d_max, v_limit, stop_distance_from(v, v.sector));
  v.speed = step.v_exit;
  ++v.move_token;
  schedule(clock_ + step.dt, kCross, vid, 0, v.move_token);
}

void Simulation::place_on_segment(int vid, int seg) {
  Vehicle& v = vehicles_[vid];
  v.phase = VehPhase::Track;
  v.seg = seg;
  v.sector = 0;
  v.speed = 0;
  v.node = -1;
  v.slot = -1;
  occupancy_[seg][0] = vid;
  ++seg_density_[seg];
  double rem = 0;
  for (int i = v.route_pos + 1; i < static_cast<int>(v.route.size()); ++i)
    rem += net_->segments[v.route[i]].length_m;
  v.rem_after_seg = rem;
  log_event("depart", vid, net_->nodes[net_->segments[seg].from].name, "");
  const Segment& cur = net_->segments[seg];
  double v_limit = speed_cap(cur);
  if (cur.sectors == 1 && v.route_pos + 1 < static_cast<int>(v.route.size()))
    v_limit = std::min(v_limit, speed_cap(net_->segments[v.route[v.route_pos + 1]]));
  const CrossStep step = sector_step(0, net_->sector_length_m, cfg_.veh.a_max, cfg_.veh.d_max,
                                     v_limit, stop_distance_from(v, 0));
  v.speed = step.v_exit;
  ++v.move_token;
  schedule(clock_ + step.dt, kCross, vid, 0, v.move_token);
  if (v.route_pos + 1 == static_cast<int>(v.route.size()))
    try_make_room(v.trip_dest, v.group >= 0);
}

// ---------------------------------------------------------------------------
// Station internals
// ---------------------------------------------------------------------------

void Simulation::arrive_at_station(int vid) {
  Vehicle& v = vehicles_[vid];
  const int node = v.trip_dest;
  StationRt& st = stations_[node];
  if (static_cast<int>(st.entry_buf.size()) < net_->nodes[node].entry_buffer) {
    leave_sector(v.seg, v.sector);
    --seg_density_[v.seg];
    v.phase = VehPhase::EntryBuffer;
    v.node = node;
    v.seg = -1;
    v.sector = -1;
    v.speed = 0;
    v.has_trip = false;
    --st.inbound;
    st.entry_buf.push_back(vid);
    log_event("arrive", vid, net_->nodes[node].name, v.group >= 0 ? "full" : "empty");
    try_advance_entry(node);
  } else {
    v.speed = 0;
    if (std::find(st.track_waiters.begin(), st.track_waiters.end(), vid) ==
        st.track_waiters.end()) {
      st.track_waiters.push_back(vid);
      log_event("wait_entry", vid, net_->nodes[node].name, "");
    }
    try_make_room(node, v.group >= 0);
  }
}

void Simulation::admit_from_track(int node) {
  StationRt& st = stations_[node];
  while (!st.track_waiters.empty() &&
         static_cast<int>(st.entry_buf.size()) < net_->nodes[node].entry_buffer) {
    const int vid = st.track_waiters.front();
    st.track_waiters.pop_front();
    arrive_at_station(vid);
  }
}

void Simulation::try_advance_entry(int node) {
  StationRt& st = stations_[node];
  while (!st.entry_buf.empty()) {
    int slot = -1;
    for (size_t b = 0; b < st.berth.size(); ++b)
      if (st.berth[b] < 0) {
        slot = static_cast<int>(b);
        break;
      }
    if (slot < 0) break;
    const int vid = st.entry_buf.front();
    st.entry_buf.pop_front();
    Vehicle& v = vehicles_[vid];
    st.berth[slot] = vid;
    v.slot = slot;
    v.phase = VehPhase::HopToBerth;
    schedule(clock_ + cfg_.station_hop_s, kHopDone, vid);
  }
  admit_from_track(node);
}

void Simulation::on_hop_done(int vid) {
  Vehicle& v = vehicles_[vid];
  const int node = v.node;
  if (v.phase == VehPhase::HopToBerth) {
    log_event("berth", vid, net_->nodes[node].name, std::to_string(v.slot));
    if (v.group >= 0) {
      v.phase = VehPhase::Alighting;
      const double dt = sample_service_time(profile_.alighting, service_rng_[node]);
      log_event("alight_start", vid, net_->nodes[node].name, "");
      schedule(clock_ + dt, kAlightDone, vid);
    } else {
      on_idle_empty(vid);
    }
  } else if (v.phase == VehPhase::HopToExit) {
    StationRt& st = stations_[node];
    --st.exit_reserved;
    st.exit_buf.push_back(vid);
    v.phase = VehPhase::ExitBuffer;
    try_depart(node);
  }
}

void Simulation::start_boarding(int node, int berth_slot) {
  StationRt& st = stations_[node];
  const int vid = st.berth[berth_slot];
  Vehicle& v = vehicles_[vid];
  assert(v.phase == VehPhase::IdleBerth && !st.queue.empty());
  const int gid = st.queue.front();
  st.queue.pop_front();
  GroupRec& g = groups_[gid];
  g.state = GroupRec::State::Boarding;
  g.board_start = clock_;
  v.group = gid;
  v.phase = VehPhase::Boarding;
  ++v.wd_epoch;
  const double dt = sample_service_time(profile_.boarding, service_rng_[node]);
  log_event("board_start", vid, net_->nodes[node].name, std::to_string(gid));
  schedule(clock_ + dt, kBoardDone, vid);
}

void Simulation::on_board_done(int vid) {
  Vehicle& v = vehicles_[vid];
  GroupRec& g = groups_[v.group];
  g.state = GroupRec::State::Riding;
  if (g.g.arrival_time >= warmup_end_ && !cfg_.saturated) {
    tallies_.waits_s.push_back(g.board_start - g.g.arrival_time);
    ++tallies_.full_trips;
  }
  log_event("board_end", vid, net_->nodes[v.node].name, "");
  begin_trip(vid, g.dest_node, false);
}

void Simulation::on_alight_done(int vid) {
  Vehicle& v = vehicles_[vid];
  GroupRec& g = groups_[v.group];
  g.state = GroupRec::State::Served;
  ++tallies_.served;
  if (clock_ >= warmup_end_) ++tallies_.completed_in_window;
  log_event("alight_end", vid, net_->nodes[v.node].name, "");
  v.group = -1;
  on_idle_empty(vid);
}

void Simulation::on_idle_empty(int vid) {
  Vehicle& v = vehicles_[vid];
  const int node = v.node;
  StationRt& st = stations_[node];
  v.phase = VehPhase::IdleBerth;
  v.idle_since = clock_;
  ++v.wd_epoch;

  const bool is_station = station_pos_[node] >= 0;
  if (is_station && !st.queue.empty()) {
    start_boarding(node, v.slot);
    return;
  }
  if (cfg_.saturated && is_station) {
    GroupRec rec;
    rec.g = sample_group(odm_, station_list_index(node), clock_, demand_rng_[node]);
    rec.origin_node = node;
    rec.dest_node = net_->stations[rec.g.destination];
    groups_.push_back(rec);
    ++tallies_.generated;
    st.queue.push_back(static_cast<int>(groups_.size()) - 1);
    start_boarding(node, v.slot);
    return;
  }
  if (cfg_.evm_enabled && !cfg_.saturated) {
    if (is_station)
      schedule(clock_ + evm_.withdraw_timeout_s, kWithdrawCheck, vid,
               static_cast<int>(v.wd_epoch & 0x7fffffff));
    calling_reevaluation(node);
  }
}

void Simulation::try_to_exit(int node) {
  StationRt& st = stations_[node];
  while (!st.await_exit.empty() &&
         static_cast<int>(st.exit_buf.size()) + st.exit_reserved <
             net_->nodes[node].exit_buffer) {
    const int vid = st.await_exit.front();
    st.await_exit.pop_front();
    Vehicle& v = vehicles_[vid];
    st.berth[v.slot] = -1;
    v.slot = -1;
    v.phase = VehPhase::HopToExit;
    ++st.exit_reserved;
    schedule(clock_ + cfg_.station_hop_s, kHopDone, vid);
    try_advance_entry(node);
  }
}

void Simulation::try_depart(int node) {
  StationRt& st = stations_[node];
  if (st.exit_buf.empty()) return;
  const int vid = st.exit_buf.front();
  Vehicle& v = vehicles_[vid];
  const int out_seg = net_->out_segs[node][0];
  const std::vector<int>& occ = occupancy_[out_seg];
  const int window = std::min(lookahead_, net_->segments[out_seg].sectors);
  for (int s = 0; s < window; ++s) {
    if (occ[s] >= 0) {
      ++v.move_token;
      subscribe(out_seg, s, vid);
      return;
    }
  }
  st.exit_buf.pop_front();
  place_on_segment(vid, out_seg);
  if (!st.exit_buf.empty())
    schedule(clock_, kWake, st.exit_buf.front(), 0, vehicles_[st.exit_buf.front()].move_token);
}

void Simulation::begin_trip(int vid, int dest_node, bool empty) {
  Vehicle& v = vehicles_[vid];
  const int node = v.node;
  if (dest_node == node) {
    log_event("warn", vid, net_->nodes[node].name, "trip to current node ignored");
    return;
  }
  Route route = plan_route(*net_, node, dest_node, cfg_.routing, route_ctx_);
  v.route = std::move(route.segments);
  v.route_pos = 0;
  v.has_trip = true;
  v.empty_trip = empty;
  v.trip_origin = node;
  v.trip_dest = dest_node;
  v.dispatch_time = clock_;
  ++v.wd_epoch;
  ++stations_[dest_node].inbound;
  if (empty && clock_ >= warmup_end_) {
    ++tallies_.net;
    tallies_.etm_km += route.total_length_m / 1000.0;
  }
  v.phase = VehPhase::AwaitExit;
  stations_[node].await_exit.push_back(vid);
  try_to_exit(node);
}

// ---------------------------------------------------------------------------
// EVM triggers
// ---------------------------------------------------------------------------

StationSnapshot Simulation::snapshot_of(int node) {
  const StationRt& st = stations_[node];
  StationSnapshot s;
  s.node = node;
  s.berths = net_->nodes[node].berths;
  s.is_capacitor = net_->nodes[node].kind == NodeKind::Capacitor;
  s.queue = s.is_capacitor ? 0 : static_cast<int>(st.queue.size());
  s.in_berths = static_cast<int>(std::count_if(st.berth.begin(), st.berth.end(),
                                               [](int b) { return b >= 0; }));
  s.idle_empties = count_idle_L(node);
  s.inbound = st.inbound;
  s.mean_interarrival_s = s.is_capacitor ? 1e9 : stats_.mean_interarrival(node, clock_);
  return s;
}

int Simulation::movable_empties_at(int node) const {
  const StationRt& st = stations_[node];
  int n = 0;
  for (int vid : st.berth)
    if (vid >= 0 && vehicles_[vid].phase == VehPhase::IdleBerth) ++n;
  return n;
}

int Simulation::count_idle_L(int node) const {
  const StationRt& st = stations_[node];
  int n = movable_empties_at(node);
  for (int vid : st.entry_buf)
    if (vehicles_[vid].group < 0) ++n;
  return n;
}

int Simulation::idle_in_berth_lowest(int node) const {
  const StationRt& st = stations_[node];
  for (size_t b = 0; b < st.berth.size(); ++b)
    if (st.berth[b] >= 0 && vehicles_[st.berth[b]].phase == VehPhase::IdleBerth)
      return static_cast<int>(b);
  return -1;
}

void Simulation::execute_decision(const Decision& d) {
  decisions_.push_back(d);
  switch (d.task) {
    case EvmTask::Balancing: ++tallies_.decisions_b; break;
    case EvmTask::Calling: ++tallies_.decisions_c; break;
    case EvmTask::Expelling: ++tallies_.decisions_e; break;
    case EvmTask::Withdrawing: ++tallies_.decisions_w; break;
  }
  if (decision_log_) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%.3f,%c,%d,%s,%s,%.6f\n", d.time,
                  static_cast<char>(d.task), d.vehicle, net_->nodes[d.from].name.c_str(),
                  net_->nodes[d.to].name.c_str(), d.score);
    (*decision_log_) << buf;
  }
  dispatch_empty_trip(d.vehicle, d.to, d.task, d.score);
}

void Simulation::dispatch_empty_trip(int vid, int dest, EvmTask task, double) {
  Vehicle& v = vehicles_[vid];
  assert(v.phase == VehPhase::IdleBerth);
  (void)task;
  begin_trip(vid, dest, true);
}

void Simulation::on_balancing_tick(int node) {
  if (!cfg_.evm_enabled || cfg_.saturated) return;
  auto d = select_target(node, EvmTask::Balancing, *world_, evm_.balancing, *dist_, *net_,
                         evm_.convention, clock_, &audit_);
  if (d) execute_decision(*d);
}

void Simulation::on_calling_event(int station_node) {
  auto d = select_target(station_node, EvmTask::Calling, *world_, evm_.calling, *dist_, *net_,
                         evm_.convention, clock_, &audit_);
  if (d) execute_decision(*d);
}

void Simulation::calling_reevaluation(int idle_node) {
  // A vehicle became idle at idle_node; stations with unserved queues that
  // could reach it re-run their calling procedure (ascending id).
  const TaskParams& p = evm_.calling;
  for (int s : net_->stations) {
    if (s == idle_node) continue;
    const StationRt& st = stations_[s];
    const int unserved = static_cast<int>(st.queue.size()) - count_idle_L(s) - st.inbound;
    if (unserved < 1) continue;
    if (p.t_nd > 0) {
      const double d = dist_->at(s, idle_node);
      if (!(d > 0) || dist_->d_av / d < p.t_nd) continue;
    }
    on_calling_event(s);
  }
}

void Simulation::try_make_room(int node, bool approaching_full) {
  if (!cfg_.evm_enabled || cfg_.saturated) return;
  StationRt& st = stations_[node];
  const int berths = net_->nodes[node].berths;
  for (;;) {
    int empties_in_buf = 0;
    for (int vid : st.entry_buf)
      if (vehicles_[vid].group < 0) ++empties_in_buf;
    const int occupied = static_cast<int>(
        std::count_if(st.berth.begin(), st.berth.end(), [](int b) { return b >= 0; }));
    const int leaving = static_cast<int>(st.await_exit.size());
    const int free_eff = berths - occupied + leaving;
    int need = 0;
    if (approaching_full)
      need = empties_in_buf + 1;
    else if (static_cast<int>(st.entry_buf.size()) >= net_->nodes[node].entry_buffer)
      need = 1;
    if (free_eff >= need) return;
    auto d = select_target(node, EvmTask::Expelling, *world_, evm_.expelling, *dist_, *net_,
                           evm_.convention, clock_, &audit_);
    if (!d) return;
    execute_decision(*d);
  }
}

void Simulation::on_withdraw_check(int vid, std::uint64_t epoch) {
  Vehicle& v = vehicles_[vid];
  if ((v.wd_epoch & 0x7fffffff) != epoch || v.phase != VehPhase::IdleBerth) return;
  const int node = v.node;
  if (station_pos_[node] < 0) return;
  auto d = select_target(node, EvmTask::Withdrawing, *world_, evm_.withdrawing, *dist_, *net_,
                         evm_.convention, clock_, &audit_, vid);
  if (d) {
    execute_decision(*d);
  } else {
    schedule(clock_ + evm_.withdraw_timeout_s, kWithdrawCheck, vid,
             static_cast<int>(v.wd_epoch & 0x7fffffff));
  }
}

// ---------------------------------------------------------------------------
// Invariant audit
// ---------------------------------------------------------------------------

void Simulation::check_invariants() const {
  auto fail = [this](const std::string& msg) {
    throw std::logic_error("invariant violation at t=" + std::to_string(clock_) + ": " + msg);
  };

  if (static_cast<int>(vehicles_.size()) != cfg_.fleet_size) fail("fleet size changed");

  // Position consistency and occupancy backing.
  std::vector<int> z_count(net_->nodes.size(), 0);
  long long trips = 0;
  for (const Vehicle& v : vehicles_) {
    if (v.has_trip) {
      ++trips;
      ++z_count[v.trip_dest];
    }
    switch (v.phase) {
      case VehPhase::Track:
        if (occupancy_[v.seg][v.sector] != v.id) fail("occupancy grid mismatch");
        break;
      case VehPhase::IdleBerth:
      case VehPhase::Boarding:
      case VehPhase::Alighting:
      case VehPhase::AwaitExit:
      case VehPhase::HopToBerth:
        if (stations_[v.node].berth[v.slot] != v.id) fail("berth assignment mismatch");
        break;
      default:
        break;
    }
  }
  for (size_t seg = 0; seg < occupancy_.size(); ++seg) {
    int last = -1000;
    for (int s = 0; s < static_cast<int>(occupancy_[seg].size()); ++s) {
      const int vid = occupancy_[seg][s];
      if (vid < 0) continue;
      const Vehicle& v = vehicles_[vid];
      if (v.seg != static_cast<int>(seg) || v.sector != s) fail("stale occupancy cell");
      if (last >= 0 && s - last < lookahead_) fail("separation violated");
      last = s;
    }
  }
  for (size_t node = 0; node < net_->nodes.size(); ++node)
    if (stations_[node].inbound != z_count[node])
      fail("Z mismatch at " + net_->nodes[node].name);

  long long queued = 0, boarding = 0, riding = 0, served = 0;
  for (const GroupRec& g : groups_) {
    switch (g.state) {
      case GroupRec::State::Queued: ++queued; break;
      case GroupRec::State::Boarding: ++boarding; break;
      case GroupRec::State::Riding: ++riding; break;
      case GroupRec::State::Served: ++served; break;
    }
  }
  long long in_queues = 0;
  for (const StationRt& st : stations_) in_queues += static_cast<long long>(st.queue.size());
  if (in_queues != queued) fail("queue bookkeeping mismatch");
  (void)boarding;
  if (served != tallies_.served) fail("served tally mismatch");
  if (queued + boarding + riding + served != tallies_.generated)
    fail("passenger conservation violated");
}

}  // namespace prt
