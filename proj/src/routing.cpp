#include "prt/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace prt {

double segment_cost(const Segment& seg, const CostWeights& w, const RouteContext& ctx,
                    int density_on_seg) {
  double cost = 0.0;
  if (w.w_length != 0.0) cost += w.w_length * seg.length_m / ctx.d_av;
  if (w.w_freetime != 0.0) cost += w.w_freetime * (seg.length_m / seg.speed_mps) / ctx.free_time_av;
  if (w.w_density != 0.0 && ctx.fleet_size > 0)
    cost += w.w_density * static_cast<double>(density_on_seg) / ctx.fleet_size;
  return cost;
}

Route plan_route(const Network& net, int from, int to, const CostWeights& w,
                 const RouteContext& ctx) {
  if (w.w_length + w.w_freetime + w.w_density <= 0.0)
    throw std::invalid_argument("routing weights must not all be zero");

  const int n = static_cast<int>(net.nodes.size());
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(n, kInf);
  std::vector<int> via_seg(n, -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  cost[from] = 0.0;
  pq.emplace(0.0, from);
  while (!pq.empty()) {
    auto [c, u] = pq.top();
    pq.pop();
    if (c > cost[u]) continue;
    if (u == to) break;
    for (int sid : net.out_segs[u]) {
      const Segment& seg = net.segments[sid];
      const int dens = ctx.density ? (*ctx.density)[sid] : 0;
      const double nc = c + segment_cost(seg, w, ctx, dens);
      // Strict improvement plus a deterministic tie rule on the predecessor.
      if (nc < cost[seg.to] ||
          (nc == cost[seg.to] && via_seg[seg.to] >= 0 && u < net.segments[via_seg[seg.to]].from)) {
        cost[seg.to] = nc;
        via_seg[seg.to] = sid;
        pq.emplace(nc, seg.to);
      }
    }
  }
  if (cost[to] == kInf)
    throw std::runtime_error("no route from " + net.nodes[from].name + " to " +
                             net.nodes[to].name);

  Route r;
  for (int v = to; v != from;) {
    int sid = via_seg[v];
    r.segments.push_back(sid);
    r.total_length_m += net.segments[sid].length_m;
    v = net.segments[sid].from;
  }
  std::reverse(r.segments.begin(), r.segments.end());
  return r;
}

}  // namespace prt
