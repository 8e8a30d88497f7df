#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace prt {

enum class NodeKind { Station, Capacitor, Fork, Join };
enum class SegmentKind { Road, Highway };

const char* to_string(NodeKind k);
const char* to_string(SegmentKind k);

struct Node {
  std::string name;
  NodeKind kind = NodeKind::Fork;
  int berths = 0;        // stations and capacitors
  int entry_buffer = 0;  // stations (capacitors get a single working slot)
  int exit_buffer = 0;
  double x = 0.0, y = 0.0;
};

struct Segment {
  int from = -1;
  int to = -1;
  SegmentKind kind = SegmentKind::Road;
  double length_m = 0.0;   // snapped to a whole number of sectors by finalize()
  double speed_mps = 0.0;
  int sectors = 0;
};

// Directed track graph. Immutable once finalized; safe to share between
// concurrently running simulations.
struct Network {
  double sector_length_m = 2.0;
  std::vector<Node> nodes;
  std::vector<Segment> segments;

  // Derived by finalize().
  std::vector<int> stations;    // node indices, ascending
  std::vector<int> capacitors;  // node indices, ascending
  std::vector<std::vector<int>> out_segs;
  std::vector<std::vector<int>> in_segs;

  int add_node(Node n);
  void add_segment(int from, int to, SegmentKind kind, double length_m, double speed_mps);
  int node_index(const std::string& name) const;  // -1 if absent

  // Snaps segment lengths to whole sectors and rebuilds the derived views.
  void finalize();

  bool is_stop_node(int node) const {
    NodeKind k = nodes[node].kind;
    return k == NodeKind::Station || k == NodeKind::Capacitor;
  }
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
};

// Structural checks: degree rules, berth counts, highway adjacency, positive
// lengths/speeds, connectivity. Report-valued; an empty report means valid.
ValidationReport validate_network(const Network& net);

struct DistanceTable {
  int n = 0;
  std::vector<double> d;        // n*n shortest track distances [m]; +inf if unreachable
  double d_av = 0.0;            // mean over ordered pairs of distinct stations [m]
  double free_time_av = 0.0;    // mean free-flow travel time over the same pairs [s]

  double at(int from, int to) const { return d[static_cast<size_t>(from) * n + to]; }
};

// All-pairs shortest distances via repeated Dijkstra. Throws if any ordered
// pair of distinct stations/capacitors is unreachable.
DistanceTable shortest_distances(const Network& net);

// ND_xi = D_av / D_xi. Throws for x == i.
double normalized_inverse_distance(const DistanceTable& table, int x, int i);

// Synthetic City-like benchmark: 12 stations (4 central, 8 peripheral),
// 4 capacitors, a two-way 3 km diameter highway ring modeled as two one-way
// rings, one-way road loops hanging off the ring, ~33 km of track.
Network build_city_reference();

Network load_network_file(const std::string& path);
Network parse_network(const std::string& text, const std::string& origin = "<network>");
void write_network_file(const Network& net, std::ostream& os);

}  // namespace prt
