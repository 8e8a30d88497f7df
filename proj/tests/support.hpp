#pragma once

// Test-only helpers: independent oracles and small constructed networks.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "prt/network.hpp"
#include "prt/rng.hpp"

namespace prt::test {

// Independent all-pairs oracle for shortest_distances.
inline std::vector<double> floyd_warshall(const Network& net) {
  const int n = static_cast<int>(net.nodes.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d(static_cast<size_t>(n) * n, inf);
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i) * n + i] = 0.0;
  for (const Segment& s : net.segments) {
    double& cell = d[static_cast<size_t>(s.from) * n + s.to];
    cell = std::min(cell, s.length_m);
  }
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        const double via = d[static_cast<size_t>(i) * n + k] + d[static_cast<size_t>(k) * n + j];
        double& cell = d[static_cast<size_t>(i) * n + j];
        if (via < cell) cell = via;
      }
  return d;
}

// One-way ring of `n` off-line stations. ring_gaps[i] is the road length from
// station i's rejoin point to station i+1's branch point. Strongly connected
// and validator-clean; distances are asymmetric (forward only).
//
// Layout per station: ... -> F_i -> (bypass) -> J_i -> gap -> F_{i+1} ...
//                              \-> S_i -------/
inline Network ring_net(const std::vector<double>& ring_gaps, int berths = 4, int entry = 2,
                        int exit = 2, int capacitors = 0, double cap_gap = 150.0) {
  Network net;
  const int n = static_cast<int>(ring_gaps.size());
  std::vector<int> forks(n), joins(n), stations(n);
  for (int i = 0; i < n; ++i) {
    Node f, j, s;
    f.name = "f" + std::to_string(i);
    f.kind = NodeKind::Fork;
    j.name = "j" + std::to_string(i);
    j.kind = NodeKind::Join;
    s.name = "S" + std::to_string(i);
    s.kind = NodeKind::Station;
    s.berths = berths;
    s.entry_buffer = entry;
    s.exit_buffer = exit;
    forks[i] = net.add_node(f);
    joins[i] = net.add_node(j);
    stations[i] = net.add_node(s);
  }
  std::vector<int> caps(capacitors);
  std::vector<int> cap_forks(capacitors), cap_joins(capacitors);
  for (int c = 0; c < capacitors; ++c) {
    Node f, j, g;
    f.name = "gf" + std::to_string(c);
    f.kind = NodeKind::Fork;
    j.name = "gj" + std::to_string(c);
    j.kind = NodeKind::Join;
    g.name = "g" + std::to_string(c);
    g.kind = NodeKind::Capacitor;
    g.berths = 8;
    g.entry_buffer = 1;
    g.exit_buffer = 1;
    cap_forks[c] = net.add_node(f);
    cap_joins[c] = net.add_node(j);
    caps[c] = net.add_node(g);
  }
  const double v = 10.0;
  for (int i = 0; i < n; ++i) {
    net.add_segment(forks[i], stations[i], SegmentKind::Road, 40, v);
    net.add_segment(stations[i], joins[i], SegmentKind::Road, 40, v);
    net.add_segment(forks[i], joins[i], SegmentKind::Road, 80, v);  // bypass
    const bool last = i == n - 1;
    const int next_fork = last && capacitors > 0 ? cap_forks[0] : forks[(i + 1) % n];
    net.add_segment(joins[i], next_fork, SegmentKind::Road, ring_gaps[i], v);
  }
  for (int c = 0; c < capacitors; ++c) {
    net.add_segment(cap_forks[c], caps[c], SegmentKind::Road, 30, v);
    net.add_segment(caps[c], cap_joins[c], SegmentKind::Road, 30, v);
    net.add_segment(cap_forks[c], cap_joins[c], SegmentKind::Road, 60, v);
    const bool last = c == capacitors - 1;
    const int next = last ? forks[0] : cap_forks[c + 1];
    net.add_segment(cap_joins[c], next, SegmentKind::Road, cap_gap, v);
  }
  net.finalize();
  return net;
}

}  // namespace prt::test
