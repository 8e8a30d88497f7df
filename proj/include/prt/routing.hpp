#pragma once

#include <vector>

#include "prt/network.hpp"

namespace prt {

struct CostWeights {
  double w_length = 1.0;
  double w_freetime = 1.0;
  double w_density = 0.0;  // dynamic routing hook; unused by default
};

struct Route {
  std::vector<int> segments;  // ordered segment ids, origin -> destination
  double total_length_m = 0.0;
};

// Normalizers for the three cost components.
struct RouteContext {
  double d_av = 1.0;          // [m]
  double free_time_av = 1.0;  // [s]
  int fleet_size = 1;         // J
  const std::vector<int>* density = nullptr;  // vehicles per segment, optional
};

// cost = w_l * len/D_av + w_f * (len/speed)/T_free_av + w_d * density/J
double segment_cost(const Segment& seg, const CostWeights& w, const RouteContext& ctx,
                    int density_on_seg);

// Minimum-cost path under segment_cost with the density snapshot taken at call
// time. Throws if `to` is unreachable from `from` or the weights are all zero.
Route plan_route(const Network& net, int from, int to, const CostWeights& w,
                 const RouteContext& ctx);

}  // namespace prt
