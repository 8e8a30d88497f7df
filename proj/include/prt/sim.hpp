#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <vector>

#include "prt/demand.hpp"
#include "prt/evm.hpp"
#include "prt/network.hpp"
#include "prt/routing.hpp"
#include "prt/rng.hpp"

namespace prt {

struct VehicleParams {
  double a_max = 2.0;        // m/s^2
  double d_max = 2.0;        // m/s^2
  double separation_m = 6.0;
  double v_road = 10.0;      // vehicle caps on top of segment limits
  double v_highway = 15.0;
};

struct SimConfig {
  int fleet_size = 48;
  VehicleParams veh;
  double station_hop_s = 3.0;  // buffer->berth and berth->exit transfer time
  enum class Placement { Stations, Capacitors };
  Placement placement = Placement::Stations;
  std::vector<std::pair<int, int>> explicit_placement;  // (node, count) overrides
  double warmup_s = 3600;
  double duration_s = 28800;
  std::uint64_t seed = 1;
  bool evm_enabled = true;
  bool saturated = false;  // ridership estimation: queues never empty, EVM off
  bool audit = false;      // run invariant checks after every event
  CostWeights routing;
};

// Exact constant-acceleration step across one sector: given the entry speed,
// returns traversal time and exit speed, respecting the speed limit, the
// acceleration bound, and a braking cap so the vehicle can stop within
// stop_dist (measured from the sector start).
struct CrossStep {
  double dt;
  double v_exit;
};
CrossStep sector_step(double v_in, double sector_len, double a_max, double d_max, double v_limit,
                      double stop_dist);

enum class VehPhase : std::uint8_t {
  IdleBerth,      // empty, uncommitted, movable
  Boarding,       // group assigned, boarding in progress
  Alighting,      // passengers leaving
  AwaitExit,      // trip assigned, waiting for an exit buffer slot (in berth)
  HopToBerth,     // entry buffer -> berth transfer
  HopToExit,      // berth -> exit buffer transfer
  ExitBuffer,     // waiting to join traffic
  Track,          // on a segment
  EntryBuffer,    // waiting for a berth
};

struct Vehicle {
  int id = -1;
  VehPhase phase = VehPhase::IdleBerth;
  int seg = -1, sector = -1;  // Track
  int node = -1, slot = -1;   // station context (slot = berth index, -1 in buffers)
  double speed = 0;
  int group = -1;  // passenger group index; -1 when empty
  // Trip bookkeeping (active from dispatch until the vehicle enters the
  // destination's internals).
  bool has_trip = false;
  bool empty_trip = false;
  int trip_origin = -1, trip_dest = -1;
  double dispatch_time = 0;
  std::vector<int> route;
  int route_pos = 0;
  double rem_after_seg = 0;  // route length remaining beyond the current segment
  double idle_since = -1;
  std::uint64_t wd_epoch = 0;  // withdraw-timer validity token
  std::uint64_t move_token = 0;
};

struct GroupRec {
  PassengerGroup g;
  int origin_node = -1, dest_node = -1;
  enum class State : std::uint8_t { Queued, Boarding, Riding, Served } state = State::Queued;
  double board_start = -1;
};

struct StationRt {
  std::vector<int> berth;      // vehicle id per berth, -1 free
  std::deque<int> entry_buf;   // vehicle ids, front oldest
  std::deque<int> exit_buf;
  int exit_reserved = 0;       // slots promised to vehicles hopping over
  std::deque<int> queue;       // group indices, FIFO
  std::deque<int> await_exit;  // vehicles in berths waiting for an exit slot
  std::deque<int> track_waiters;  // vehicles stopped on the approach track
  int inbound = 0;             // Z
};

struct Tallies {
  long long generated = 0;
  long long served = 0;           // alighting completed, whole run
  long long completed_in_window = 0;
  std::vector<double> waits_s;    // full-trip waits inside the window
  long long net = 0;              // empty trips dispatched inside the window
  double etm_km = 0;
  long long full_trips = 0;       // full trips dispatched inside the window
  long long decisions_b = 0, decisions_c = 0, decisions_e = 0, decisions_w = 0;
};

// One deterministic discrete-event run. Owns all mutable state; a fixed
// (scenario, seed) pair reproduces the event sequence byte for byte.
class Simulation {
 public:
  Simulation(std::shared_ptr<const Network> net, std::shared_ptr<const DistanceTable> dist,
             OdmMatrix odm, DemandProfile profile, EvmConfig evm, SimConfig cfg);

  void run();                    // warmup + measurement window
  void run_until(double t_end);  // processes events with time <= t_end

  double clock() const { return clock_; }
  const Tallies& tallies() const { return tallies_; }
  const std::vector<Decision>& decisions() const { return decisions_; }
  const QueryAudit& query_audit() const { return audit_; }
  const Network& network() const { return *net_; }

  void set_event_log(std::ostream* os) { event_log_ = os; }
  void set_decision_log(std::ostream* os) { decision_log_ = os; }

  // Test access.
  const Vehicle& vehicle(int id) const { return vehicles_[id]; }
  const StationRt& station(int node) const { return stations_[node]; }
  int movable_empties_at(int node) const;
  void dispatch_empty_trip(int vehicle, int dest, EvmTask task, double decision_score);
  StationSnapshot snapshot_of(int node);
  void check_invariants() const;  // throws on violation

 private:
  friend class SimWorld;

  struct Event {
    double t;
    std::uint64_t seq;
    std::uint8_t kind;
    int a, b;
    std::uint64_t token;
    bool operator<(const Event& o) const {
      return t != o.t ? t > o.t : seq > o.seq;  // min-heap via std::priority_queue
    }
  };

  enum EvKind : std::uint8_t {
    kArrival,        // a = station node
    kCross,          // a = vehicle
    kHopDone,        // a = vehicle
    kBoardDone,      // a = vehicle
    kAlightDone,     // a = vehicle
    kBalanceTick,    // a = node
    kWithdrawCheck,  // a = vehicle, b = epoch low bits
    kWake,           // a = vehicle
  };

  void schedule(double t, std::uint8_t kind, int a, int b = 0, std::uint64_t token = 0);
  void handle(const Event& e);

  // Demand.
  void schedule_next_arrival(int station_node);
  void on_group_arrival(int station_node);

  // Track movement.
  int lookahead_sectors() const { return lookahead_; }
  bool window_free(const Vehicle& v, int* blocking_seg, int* blocking_sector) const;
  void try_move(int vid);
  void place_on_segment(int vid, int seg);
  void leave_sector(int seg, int sector);
  void subscribe(int seg, int sector, int vid);
  void wake_subscribers(int seg, int sector);
  double stop_distance_from(const Vehicle& v, int sector_index_entering) const;
  double speed_cap(const Segment& seg) const;

  // Joins.
  void join_register(int node, int vid);
  bool join_is_head(int node, int vid) const;
  void join_pop(int node, int vid);

  // Station internals.
  void arrive_at_station(int vid);
  void admit_from_track(int node);
  void try_advance_entry(int node);
  void on_hop_done(int vid);
  void start_boarding(int node, int berth_slot);
  void on_board_done(int vid);
  void on_alight_done(int vid);
  void on_idle_empty(int vid);
  void try_to_exit(int node);
  void try_depart(int node);
  void begin_trip(int vid, int dest_node, bool empty);

  // EVM triggers.
  void on_balancing_tick(int node);
  void on_calling_event(int station_node);
  void calling_reevaluation(int idle_node);
  void try_make_room(int node, bool approaching_full);
  void on_withdraw_check(int vid, std::uint64_t epoch);
  void execute_decision(const Decision& d);

  int station_list_index(int node) const { return station_pos_[node]; }
  int idle_in_berth_lowest(int node) const;  // lowest berth index holding a movable empty
  int count_idle_L(int node) const;          // L: idle empties in berths + entry buffer

  void log_event(const char* kind, int vehicle, const std::string& where,
                 const std::string& detail);
  void place_initial_vehicles();
  Rng& demand_rng(int node) { return demand_rng_[node]; }
  Rng& service_rng(int node) { return service_rng_[node]; }
  Rng& control_rng(int node) { return control_rng_[node]; }

  std::shared_ptr<const Network> net_;
  std::shared_ptr<const DistanceTable> dist_;
  OdmMatrix odm_;
  DemandProfile profile_;
  HistoricalStats stats_;
  EvmConfig evm_;
  SimConfig cfg_;
  RouteContext route_ctx_;

  double clock_ = 0;
  std::uint64_t seq_ = 0;
  std::vector<Event> heap_;
  std::vector<Vehicle> vehicles_;
  std::vector<GroupRec> groups_;
  std::vector<StationRt> stations_;   // indexed by node id (empty for intersections)
  std::vector<std::vector<int>> occupancy_;  // per segment, vehicle id per sector or -1
  std::vector<int> seg_density_;             // vehicles per segment (routing hook)
  std::unordered_map<std::int64_t, std::vector<int>> sector_subs_;
  std::vector<std::deque<std::pair<double, int>>> join_queue_;  // per node
  std::vector<int> station_pos_;  // node -> station-list index or -1

  std::vector<Rng> demand_rng_, service_rng_, control_rng_;
  int lookahead_ = 3;
  double warmup_end_ = 0, t_end_ = 0;

  Tallies tallies_;
  std::vector<Decision> decisions_;
  QueryAudit audit_;
  std::ostream* event_log_ = nullptr;
  std::ostream* decision_log_ = nullptr;
  std::unique_ptr<WorldAccess> world_;
};

}  // namespace prt
