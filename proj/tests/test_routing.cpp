#include <algorithm>
#include <vector>

#include "doctest.h"
#include "prt/routing.hpp"
#include "prt/rng.hpp"
#include "support.hpp"

using namespace prt;

namespace {

// Exhaustive simple-path enumeration: minimum cost over all paths from -> to.
double brute_force_min_cost(const Network& net, int from, int to, const CostWeights& w,
                            const RouteContext& ctx) {
  double best = std::numeric_limits<double>::infinity();
  std::vector<char> visited(net.nodes.size(), 0);
  std::vector<int> stack;
  auto rec = [&](auto&& self, int u, double cost) -> void {
    if (u == to) {
      best = std::min(best, cost);
      return;
    }
    visited[u] = 1;
    for (int sid : net.out_segs[u]) {
      const Segment& s = net.segments[sid];
      if (visited[s.to]) continue;
      self(self, s.to, cost + segment_cost(s, w, ctx, 0));
    }
    visited[u] = 0;
  };
  rec(rec, from, 0.0);
  return best;
}

}  // namespace

TEST_CASE("segment cost normalization identities") {
  Segment seg;
  seg.length_m = 1500;
  seg.speed_mps = 10;
  RouteContext ctx;
  ctx.d_av = 1500;
  ctx.free_time_av = 150;
  ctx.fleet_size = 48;

  CHECK(segment_cost(seg, {1, 0, 0}, ctx, 0) == doctest::Approx(1.0));
  // length = D_av and length/speed = T_free_av together give cost 2.
  CHECK(segment_cost(seg, {1, 1, 0}, ctx, 0) == doctest::Approx(2.0));
  CHECK(segment_cost(seg, {0, 0, 1}, ctx, 0) == doctest::Approx(0.0));
  CHECK(segment_cost(seg, {0, 0, 1}, ctx, 12) == doctest::Approx(0.25));
}

TEST_CASE("plan_route rejects an all-zero weight vector") {
  Network net = test::ring_net({100, 100, 100});
  RouteContext ctx;
  CHECK_THROWS(plan_route(net, net.stations[0], net.stations[1], {0, 0, 0}, ctx));
}

TEST_CASE("plan_route returns the forced path on a ring") {
  Network net = test::ring_net({120, 250, 310});
  DistanceTable t = shortest_distances(net);
  RouteContext ctx{t.d_av, t.free_time_av, 10, nullptr};
  Route r = plan_route(net, net.stations[0], net.stations[1], {1, 0, 0}, ctx);
  REQUIRE_FALSE(r.segments.empty());
  CHECK(net.segments[r.segments.front()].from == net.stations[0]);
  CHECK(net.segments[r.segments.back()].to == net.stations[1]);
  for (size_t i = 1; i < r.segments.size(); ++i)
    CHECK(net.segments[r.segments[i]].from == net.segments[r.segments[i - 1]].to);
}

TEST_CASE("shorter of two parallel paths wins under pure length weights") {
  // Two stations joined by a short and a long branch.
  Network net;
  Node a, b, f, j;
  a.name = "A";
  a.kind = NodeKind::Station;
  a.berths = 2;
  a.entry_buffer = 1;
  a.exit_buffer = 1;
  b = a;
  b.name = "B";
  f.name = "f";
  f.kind = NodeKind::Fork;
  j.name = "j";
  j.kind = NodeKind::Join;
  int ia = net.add_node(a), ib = net.add_node(b), fi = net.add_node(f), ji = net.add_node(j);
  net.add_segment(ia, fi, SegmentKind::Road, 50, 10);
  net.add_segment(fi, ji, SegmentKind::Road, 900, 10);   // short branch
  net.add_segment(fi, ji, SegmentKind::Road, 1100, 10);  // long branch
  net.add_segment(ji, ib, SegmentKind::Road, 50, 10);
  net.add_segment(ib, ia, SegmentKind::Road, 400, 10);
  net.finalize();

  RouteContext ctx{1000, 100, 10, nullptr};
  Route r = plan_route(net, ia, ib, {1, 0, 0}, ctx);
  CHECK(r.total_length_m == doctest::Approx(1000));
}

TEST_CASE("route cost equals the exhaustive-enumeration minimum on random rings") {
  Rng rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> gaps;
    const int n = 3 + static_cast<int>(rng.next_u64() % 2);
    for (int i = 0; i < n; ++i) gaps.push_back(80 + rng.uniform01() * 300);
    Network net = test::ring_net(gaps, 4, 2, 2, 1);
    DistanceTable t = shortest_distances(net);
    RouteContext ctx{t.d_av, t.free_time_av, 8, nullptr};
    CostWeights w{0.5 + rng.uniform01(), rng.uniform01(), 0};
    for (int a : net.stations)
      for (int b : net.stations) {
        if (a == b) continue;
        Route r = plan_route(net, a, b, w, ctx);
        double cost = 0;
        for (int sid : r.segments) cost += segment_cost(net.segments[sid], w, ctx, 0);
        CHECK(cost == doctest::Approx(brute_force_min_cost(net, a, b, w, ctx)).epsilon(1e-9));
      }
  }
}

TEST_CASE("pure-length routes reproduce the distance table") {
  Network net = test::ring_net({150, 220, 330, 110});
  DistanceTable t = shortest_distances(net);
  RouteContext ctx{t.d_av, t.free_time_av, 8, nullptr};
  for (int a : net.stations)
    for (int b : net.stations) {
      if (a == b) continue;
      Route r = plan_route(net, a, b, {1, 0, 0}, ctx);
      CHECK(r.total_length_m == doctest::Approx(t.at(a, b)));
    }
}

TEST_CASE("route choice is invariant under uniform weight scaling") {
  Network net = test::ring_net({150, 220, 330});
  DistanceTable t = shortest_distances(net);
  RouteContext ctx{t.d_av, t.free_time_av, 8, nullptr};
  for (int a : net.stations)
    for (int b : net.stations) {
      if (a == b) continue;
      Route r1 = plan_route(net, a, b, {1, 1, 0}, ctx);
      Route r2 = plan_route(net, a, b, {7, 7, 0}, ctx);
      CHECK(r1.segments == r2.segments);
    }
}
