#include "prt/evm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace prt {

TaskParams balancing_tag_params(const std::string& tag) {
  if (tag.size() != 4 || tag.find_first_not_of("01") != std::string::npos)
    throw std::invalid_argument("tag must be four binary digits, got: " + tag);
  TaskParams p;
  p.f_eb = tag[0] == '1' ? 1.0 : 0.0;
  p.f_q = tag[1] == '1' ? 1.0 : 0.0;
  p.f_nd = tag[2] == '1' ? 1.0 : 0.0;
  p.f_ai = tag[3] == '1' ? 5.0 : 0.0;
  p.relative_thresholds = true;
  p.t_ev = 0.0;
  p.t_nd = 1.0;
  p.t = 1.0;
  return p;
}

std::vector<std::string> standard_tag_set() {
  return {"0000", "1000", "0100", "0010", "0001", "0111", "1011", "1101", "1110", "1111"};
}

EvmConfig paper_default_config(const std::string& balancing_tag) {
  EvmConfig cfg;
  cfg.balancing = balancing_tag_params(balancing_tag);

  // Calling: deliver to a waiting group, nearest donor preferred.
  cfg.calling = TaskParams{};
  cfg.calling.f_nd = 5.0;
  cfg.calling.relative_thresholds = true;
  cfg.calling.t_nd = 1.0;
  cfg.calling.t = 0.0;

  // Expelling: executed whenever needed, so the total threshold is -inf.
  cfg.expelling = TaskParams{};
  cfg.expelling.f_eb = 1.0;
  cfg.expelling.f_q = 1.0;
  cfg.expelling.f_nd = 1.0;
  cfg.expelling.relative_thresholds = true;
  cfg.expelling.t_nd = 1.0;
  cfg.expelling.t = -std::numeric_limits<double>::infinity();

  // Withdrawing off: the total threshold can never be reached.
  cfg.withdrawing = TaskParams{};
  cfg.withdrawing.f_nd = 1.0;
  cfg.withdrawing.relative_thresholds = true;
  cfg.withdrawing.t_nd = 1.0;
  cfg.withdrawing.t = std::numeric_limits<double>::infinity();

  return cfg;
}

CandidateKind candidate_kind(EvmTask task) {
  switch (task) {
    case EvmTask::Balancing:
    case EvmTask::Calling:
      return CandidateKind::Stations;
    case EvmTask::Withdrawing:
      return CandidateKind::Capacitors;
    case EvmTask::Expelling:
      return CandidateKind::Both;
  }
  return CandidateKind::Stations;
}

std::vector<int> horizon_view(int x, double t_nd, const DistanceTable& table,
                              const Network& net, CandidateKind kind) {
  std::vector<int> out;
  auto consider = [&](int i) {
    if (i == x) return;
    const double d = table.at(x, i);
    if (!std::isfinite(d) || d <= 0.0) return;
    if (t_nd > 0.0 && table.d_av / d < t_nd) return;
    out.push_back(i);
  };
  if (kind == CandidateKind::Stations || kind == CandidateKind::Both)
    for (int s : net.stations) consider(s);
  if (kind == CandidateKind::Capacitors || kind == CandidateKind::Both)
    for (int g : net.capacitors) consider(g);
  if (kind == CandidateKind::Both) std::sort(out.begin(), out.end());
  return out;
}

namespace {

double empty_fraction(const StationSnapshot& s) {
  return static_cast<double>(s.idle_empties + s.inbound - s.queue) / s.berths;
}

}  // namespace

bool eligible(const StationSnapshot& x, const StationSnapshot& i, double nd_xi,
              const TaskParams& p, EvSign convention, bool candidate_is_destination) {
  const double t_q = p.relative_thresholds ? -static_cast<double>(i.berths) + 1.0 : p.t_q;
  const double t_eb = p.relative_thresholds ? 1.0 / i.berths : p.t_eb;

  if (i.queue - i.idle_empties - i.inbound < t_q) return false;
  if (static_cast<double>(i.berths - i.in_berths + i.queue - i.inbound) / i.berths < t_eb)
    return false;
  if (nd_xi < p.t_nd) return false;

  double ev_diff;
  if (convention == EvSign::PaperLiteral) {
    ev_diff = empty_fraction(i) - empty_fraction(x);
  } else {
    const StationSnapshot& src = candidate_is_destination ? x : i;
    const StationSnapshot& dst = candidate_is_destination ? i : x;
    ev_diff = empty_fraction(src) - empty_fraction(dst);
  }
  return ev_diff >= p.t_ev;
}

double score(const StationSnapshot& i, double nd_xi, const TaskParams& p) {
  return p.f_q * (i.queue - i.idle_empties - i.inbound) +
         p.f_eb * (i.berths - i.in_berths + i.queue - i.inbound) + p.f_nd * nd_xi +
         p.f_ai / i.mean_interarrival_s;
}

std::optional<Decision> select_target(int x, EvmTask task, WorldAccess& world,
                                      const TaskParams& p, const DistanceTable& table,
                                      const Network& net, EvSign convention, double now,
                                      QueryAudit* audit, int forced_vehicle) {
  const bool to_candidate = task != EvmTask::Calling;
  if (to_candidate && forced_vehicle < 0 && world.movable_empties(x) == 0) return std::nullopt;

  const StationSnapshot snap_x = world.snapshot(x);  // local state, not a remote query
  const std::vector<int> candidates = horizon_view(x, p.t_nd, table, net, candidate_kind(task));

  int best = -1;
  double best_score = 0, best_dist = 0;
  for (int i : candidates) {
    if (!to_candidate && world.movable_empties(i) == 0) continue;
    const double d_xi = table.at(x, i);
    const double nd = table.d_av / d_xi;
    if (audit) audit->report(nd, p.t_nd);
    const StationSnapshot snap_i = world.snapshot(i);
    if (!eligible(snap_x, snap_i, nd, p, convention, to_candidate)) continue;
    const double s = score(snap_i, nd, p);
    if (best < 0 || s > best_score ||
        (s == best_score && (d_xi < best_dist || (d_xi == best_dist && i < best)))) {
      best = i;
      best_score = s;
      best_dist = d_xi;
    }
  }
  if (best < 0 || !(best_score >= p.t)) return std::nullopt;

  const int source = to_candidate ? x : best;
  int vehicle = forced_vehicle;
  if (vehicle < 0) vehicle = world.pick_movable_empty(source);
  if (vehicle < 0) return std::nullopt;

  Decision d;
  d.task = task;
  d.vehicle = vehicle;
  d.from = source;
  d.to = to_candidate ? best : x;
  d.score = best_score;
  d.time = now;
  return d;
}

}  // namespace prt
