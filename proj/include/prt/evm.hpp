#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prt/network.hpp"

namespace prt {

// The four empty-vehicle-management tasks share one eligibility + scoring +
// argmax procedure; they differ in parameter vectors, candidate sets, trip
// direction and triggers.
enum class EvmTask : char {
  Balancing = 'B',
  Calling = 'C',
  Expelling = 'E',
  Withdrawing = 'W',
};

// Reading of the empty-vehicle-fraction condition. The literal formula
// compares candidate minus evaluator; the default compares the node vehicles
// leave minus the node they go to, which is what the prose describes.
enum class EvSign { PaperLiteral, SourceMinusDestination };

// Per-node state tuple exchanged between station controllers. Plain value so
// the interface stays serialization-friendly.
struct StationSnapshot {
  int node = -1;
  int berths = 0;                     // H
  int queue = 0;                      // Q: waiting passenger groups
  int in_berths = 0;                  // K: vehicles occupying berths
  int idle_empties = 0;               // L: uncommitted empties in berths + entry buffer
  int inbound = 0;                    // Z: vehicles on a trip here
  double mean_interarrival_s = 1e9;   // PI
  bool is_capacitor = false;
};

struct TaskParams {
  double f_q = 0, f_eb = 0, f_nd = 0, f_ai = 0;
  // Absolute thresholds, used when relative_thresholds is false. When true,
  // T_Q = -H_i + 1 and T_EB = 1/H_i per candidate station.
  double t_q = 0, t_eb = 0;
  bool relative_thresholds = true;
  double t_ev = 0;
  double t_nd = 1;  // inverse horizon; 0 means infinite horizon
  double t = 0;     // total function threshold; +-inf allowed
};

struct EvmConfig {
  TaskParams balancing, calling, expelling, withdrawing;
  double balancing_period_s = 300;
  double withdraw_timeout_s = 600;
  EvSign convention = EvSign::SourceMinusDestination;
};

// Balancing parameters for a 4-bit tag (BF_EB, BF_Q, BF_ND, BF_AI); enabled
// factors take value 1 except F_AI = 5. Fixed thresholds: relative T_Q/T_EB,
// T_ND = 1, T_EV = 0, T = 1.
TaskParams balancing_tag_params(const std::string& tag);

// The ten-configuration set: all off, all on, each factor alone, each factor
// left out.
std::vector<std::string> standard_tag_set();

// Full paper setup: tagged balancing plus the fixed calling/expelling
// parameters and withdrawing switched off.
EvmConfig paper_default_config(const std::string& balancing_tag);

struct Decision {
  EvmTask task;
  int vehicle = -1;
  int from = -1;
  int to = -1;
  double score = 0;
  double time = 0;
};

// Message boundary between a station controller and the rest of the world.
// The engine only ever queries nodes inside the querying station's horizon.
class WorldAccess {
 public:
  virtual ~WorldAccess() = default;
  virtual StationSnapshot snapshot(int node) = 0;
  virtual int movable_empties(int node) = 0;
  virtual int pick_movable_empty(int node) = 0;  // -1 when none
};

// Instrumentation: every remote snapshot query is reported here together with
// the querying node's horizon threshold.
struct QueryAudit {
  long long queries = 0;
  long long out_of_horizon = 0;
  void report(double nd, double t_nd) {
    ++queries;
    if (nd < t_nd) ++out_of_horizon;
  }
};

enum class CandidateKind { Stations, Capacitors, Both };
CandidateKind candidate_kind(EvmTask task);

// Candidates i != x with ND_xi >= t_nd (t_nd == 0 admits everything
// reachable), restricted to the requested node kind; ascending node id.
std::vector<int> horizon_view(int x, double t_nd, const DistanceTable& table,
                              const Network& net, CandidateKind kind);

// The four gate conditions. Conditions on queue and empty berths test the
// candidate snapshot; the empty-vehicle-fraction condition depends on the
// trip direction and the configured convention. candidate_is_destination is
// true for balancing/expelling/withdrawing (trip x -> i) and false for
// calling (trip i -> x).
bool eligible(const StationSnapshot& x, const StationSnapshot& i, double nd_xi,
              const TaskParams& p, EvSign convention, bool candidate_is_destination);

// Weighted task function: F_Q*(Q-L-Z) + F_EB*(H-K+Q-Z) + F_ND*ND + F_AI/PI.
double score(const StationSnapshot& i, double nd_xi, const TaskParams& p);

// One run of the generic procedure at node x. Ties break on smaller D_xi,
// then smaller node id. Returns nothing when no candidate is eligible, the
// best score falls below the total threshold, or no movable vehicle exists at
// the source.
std::optional<Decision> select_target(int x, EvmTask task, WorldAccess& world,
                                      const TaskParams& p, const DistanceTable& table,
                                      const Network& net, EvSign convention, double now,
                                      QueryAudit* audit = nullptr, int forced_vehicle = -1);

}  // namespace prt
