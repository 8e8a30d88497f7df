#include "prt/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace prt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Station: return "station";
    case NodeKind::Capacitor: return "capacitor";
    case NodeKind::Fork: return "fork";
    case NodeKind::Join: return "join";
  }
  return "?";
}

const char* to_string(SegmentKind k) {
  return k == SegmentKind::Highway ? "highway" : "road";
}

int Network::add_node(Node n) {
  nodes.push_back(std::move(n));
  return static_cast<int>(nodes.size()) - 1;
}

void Network::add_segment(int from, int to, SegmentKind kind, double length_m, double speed_mps) {
  Segment s;
  s.from = from;
  s.to = to;
  s.kind = kind;
  s.length_m = length_m;
  s.speed_mps = speed_mps;
  segments.push_back(s);
}

int Network::node_index(const std::string& name) const {
  for (size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

void Network::finalize() {
  stations.clear();
  capacitors.clear();
  out_segs.assign(nodes.size(), {});
  in_segs.assign(nodes.size(), {});
  for (size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].kind == NodeKind::Station) stations.push_back(static_cast<int>(i));
    if (nodes[i].kind == NodeKind::Capacitor) capacitors.push_back(static_cast<int>(i));
  }
  for (size_t s = 0; s < segments.size(); ++s) {
    Segment& seg = segments[s];
    seg.sectors = std::max(1, static_cast<int>(std::lround(seg.length_m / sector_length_m)));
    seg.length_m = seg.sectors * sector_length_m;
    if (seg.from >= 0 && seg.from < static_cast<int>(nodes.size()))
      out_segs[seg.from].push_back(static_cast<int>(s));
    if (seg.to >= 0 && seg.to < static_cast<int>(nodes.size()))
      in_segs[seg.to].push_back(static_cast<int>(s));
  }
}

ValidationReport validate_network(const Network& net) {
  ValidationReport rep;
  auto issue = [&rep](const std::string& s) { rep.issues.push_back(s); };

  if (net.stations.size() < 2) issue("network must contain at least 2 stations");

  for (size_t i = 0; i < net.nodes.size(); ++i) {
    const Node& n = net.nodes[i];
    const int din = static_cast<int>(net.in_segs[i].size());
    const int dout = static_cast<int>(net.out_segs[i].size());
    switch (n.kind) {
      case NodeKind::Station:
      case NodeKind::Capacitor:
        if (din != 1 || dout != 1)
          issue(n.name + ": " + to_string(n.kind) + " must have exactly one entry and one exit (has " +
                std::to_string(din) + " in, " + std::to_string(dout) + " out)");
        if (n.berths < 1) issue(n.name + ": berth count must be at least 1");
        break;
      case NodeKind::Fork:
        if (din != 1 || dout != 2)
          issue(n.name + ": fork must have 1 in / 2 out (has " + std::to_string(din) + " in, " +
                std::to_string(dout) + " out)");
        break;
      case NodeKind::Join:
        if (din != 2 || dout != 1)
          issue(n.name + ": join must have 2 in / 1 out (has " + std::to_string(din) + " in, " +
                std::to_string(dout) + " out)");
        break;
    }
  }

  for (const Segment& s : net.segments) {
    const std::string where = net.nodes[s.from].name + "->" + net.nodes[s.to].name;
    if (s.length_m <= 0) issue(where + ": segment length must be positive");
    if (s.speed_mps <= 0) issue(where + ": segment speed limit must be positive");
    if (s.kind == SegmentKind::Highway) {
      if (s.speed_mps > 15.0) issue(where + ": highway speed limit above 15 m/s");
      for (int end : {s.from, s.to}) {
        NodeKind k = net.nodes[end].kind;
        if (k == NodeKind::Station || k == NodeKind::Capacitor)
          issue(where + ": highway segment touches " + net.nodes[end].name +
                " (highways connect intersections only)");
      }
    } else {
      if (s.speed_mps > 10.0) issue(where + ": road speed limit above 10 m/s");
    }
  }

  // Reachability: every node must be reachable from every station, and every
  // node must be able to reach every station.
  const int n = static_cast<int>(net.nodes.size());
  auto bfs = [&](int start, const std::vector<std::vector<int>>& adj, bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int sid : adj[u]) {
        int v = forward ? net.segments[sid].to : net.segments[sid].from;
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    return seen;
  };
  for (int s : net.stations) {
    std::vector<char> fwd = bfs(s, net.out_segs, true);
    std::vector<char> bwd = bfs(s, net.in_segs, false);
    for (int v = 0; v < n; ++v) {
      if (!fwd[v])
        issue(net.nodes[v].name + " unreachable from station " + net.nodes[s].name);
      if (!bwd[v])
        issue("station " + net.nodes[s].name + " unreachable from " + net.nodes[v].name);
    }
  }
  return rep;
}

namespace {

// Dijkstra over segment weights; deterministic (ties resolved by node index
// via the heap ordering).
std::vector<double> dijkstra(const Network& net, int src, bool by_time) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<double> dist(n, kInf);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  dist[src] = 0.0;
  pq.emplace(0.0, src);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u]) continue;
    for (int sid : net.out_segs[u]) {
      const Segment& seg = net.segments[sid];
      const double w = by_time ? seg.length_m / seg.speed_mps : seg.length_m;
      if (dist[u] + w < dist[seg.to]) {
        dist[seg.to] = dist[u] + w;
        pq.emplace(dist[seg.to], seg.to);
      }
    }
  }
  return dist;
}

}  // namespace

DistanceTable shortest_distances(const Network& net) {
  const int n = static_cast<int>(net.nodes.size());
  DistanceTable t;
  t.n = n;
  t.d.assign(static_cast<size_t>(n) * n, kInf);
  for (int u = 0; u < n; ++u) {
    std::vector<double> row = dijkstra(net, u, false);
    for (int v = 0; v < n; ++v) t.d[static_cast<size_t>(u) * n + v] = row[v];
    t.d[static_cast<size_t>(u) * n + u] = 0.0;
  }

  // Unreachable station/capacitor pairs make the network unusable.
  std::vector<int> hubs = net.stations;
  hubs.insert(hubs.end(), net.capacitors.begin(), net.capacitors.end());
  for (int a : hubs)
    for (int b : hubs)
      if (a != b && !std::isfinite(t.at(a, b)))
        throw std::runtime_error("no path from " + net.nodes[a].name + " to " + net.nodes[b].name);

  double sum = 0.0;
  long long pairs = 0;
  for (int a : net.stations)
    for (int b : net.stations)
      if (a != b) {
        sum += t.at(a, b);
        ++pairs;
      }
  t.d_av = pairs ? sum / pairs : 0.0;

  double tsum = 0.0;
  for (int a : net.stations) {
    std::vector<double> row = dijkstra(net, a, true);
    for (int b : net.stations)
      if (a != b) tsum += row[b];
  }
  t.free_time_av = pairs ? tsum / pairs : 0.0;
  return t;
}

double normalized_inverse_distance(const DistanceTable& table, int x, int i) {
  if (x == i) throw std::invalid_argument("normalized inverse distance undefined for x == i");
  return table.d_av / table.at(x, i);
}

// ---------------------------------------------------------------------------
// City-like reference model.
//
// Two one-way highway rings (radius ~1.5 km) carry the traffic; sixteen
// off-line complexes hang off them: eight peripheral stations outside the
// ring, four central stations and four capacitors inside. Each complex is a
// one-way road loop fork -> merge join -> node -> split fork -> join.
// ---------------------------------------------------------------------------

namespace {

struct CityBuilder {
  Network net;
  static constexpr double kRingCw = 1503.0;
  static constexpr double kRingCcw = 1497.0;
  static constexpr double kHalfGapDeg = 2.0;
  static constexpr double kSpurHalfDeg = 1.0;
  static constexpr double kVHighway = 15.0;
  static constexpr double kVRoad = 10.0;

  static double rad(double deg) { return deg * std::numbers::pi / 180.0; }

  int polar_node(const std::string& name, NodeKind kind, double r, double deg, int berths = 0,
                 int entry = 0, int exit = 0) {
    Node n;
    n.name = name;
    n.kind = kind;
    n.berths = berths;
    n.entry_buffer = entry;
    n.exit_buffer = exit;
    n.x = r * std::cos(rad(deg));
    n.y = r * std::sin(rad(deg));
    return net.add_node(std::move(n));
  }

  static double dist(const Node& a, const Node& b) { return std::hypot(a.x - b.x, a.y - b.y); }

  void road(int a, int b) {
    net.add_segment(a, b, SegmentKind::Road, dist(net.nodes[a], net.nodes[b]), kVRoad);
  }

  void highway_arc(int a, int b, double radius, double deg_from, double deg_to, bool cw) {
    double sweep = cw ? deg_to - deg_from : deg_from - deg_to;
    while (sweep <= 0) sweep += 360.0;
    net.add_segment(a, b, SegmentKind::Highway, radius * rad(sweep), kVHighway);
  }

  // One off-line complex: ramps from both rings merge, feed the node, and its
  // exit splits back to both rings.
  void complex_site(const std::string& node_name, NodeKind kind, double theta, double r_mid,
                    double r_node, int berths, int entry, int exit, int fc, int fd, int jc,
                    int jd) {
    const std::string tag = node_name;
    int jm = polar_node("jm_" + tag, NodeKind::Join, r_mid, theta - kSpurHalfDeg);
    int fs = polar_node("fs_" + tag, NodeKind::Fork, r_mid, theta + kSpurHalfDeg);
    int s = polar_node(node_name, kind, r_node, theta, berths, entry, exit);
    road(fc, jm);
    road(fd, jm);
    road(jm, s);
    road(s, fs);
    road(fs, jc);
    road(fs, jd);
  }
};

}  // namespace

Network build_city_reference() {
  CityBuilder b;

  struct Site {
    double theta;
    std::string name;
    NodeKind kind;
    double r_mid, r_node;
    int berths, entry, exit;
  };

  // 8 peripheral stations E..L every 45 deg, 4 central stations A..D and
  // 4 capacitors g1..g4 interleaved between them.
  std::vector<Site> sites;
  const char* suburb_names[] = {"E", "F", "G", "H", "I", "J", "K", "L"};
  for (int k = 0; k < 8; ++k)
    sites.push_back({45.0 * k, suburb_names[k], NodeKind::Station, 1670.0, 1750.0, 6, 3, 2});
  const char* central_names[] = {"A", "B", "C", "D"};
  for (int j = 0; j < 4; ++j)
    sites.push_back(
        {22.5 + 90.0 * j, central_names[j], NodeKind::Station, 1330.0, 1250.0, 6, 3, 2});
  for (int j = 0; j < 4; ++j)
    sites.push_back({67.5 + 90.0 * j, "g" + std::to_string(j + 1), NodeKind::Capacitor, 1330.0,
                     1250.0, 12, 1, 1});
  std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& c) { return a.theta < c.theta; });

  const int ns = static_cast<int>(sites.size());
  std::vector<int> fc(ns), jc(ns), fd(ns), jd(ns);
  for (int i = 0; i < ns; ++i) {
    const Site& s = sites[i];
    fc[i] = b.polar_node("fcw_" + s.name, NodeKind::Fork, CityBuilder::kRingCw,
                         s.theta - CityBuilder::kHalfGapDeg);
    jc[i] = b.polar_node("jcw_" + s.name, NodeKind::Join, CityBuilder::kRingCw,
                         s.theta + CityBuilder::kHalfGapDeg);
    fd[i] = b.polar_node("fccw_" + s.name, NodeKind::Fork, CityBuilder::kRingCcw,
                         s.theta + CityBuilder::kHalfGapDeg);
    jd[i] = b.polar_node("jccw_" + s.name, NodeKind::Join, CityBuilder::kRingCcw,
                         s.theta - CityBuilder::kHalfGapDeg);
  }

  for (int i = 0; i < ns; ++i) {
    const Site& s = sites[i];
    // Clockwise ring runs in increasing angle: fork -> join inside the site,
    // join -> next site's fork between sites.
    b.highway_arc(fc[i], jc[i], CityBuilder::kRingCw, s.theta - CityBuilder::kHalfGapDeg,
                  s.theta + CityBuilder::kHalfGapDeg, true);
    const Site& nx = sites[(i + 1) % ns];
    b.highway_arc(jc[i], fc[(i + 1) % ns], CityBuilder::kRingCw,
                  s.theta + CityBuilder::kHalfGapDeg, nx.theta - CityBuilder::kHalfGapDeg, true);
    // Counter-clockwise ring runs in decreasing angle.
    b.highway_arc(fd[i], jd[i], CityBuilder::kRingCcw, s.theta + CityBuilder::kHalfGapDeg,
                  s.theta - CityBuilder::kHalfGapDeg, false);
    const Site& pv = sites[(i + ns - 1) % ns];
    b.highway_arc(jd[i], fd[(i + ns - 1) % ns], CityBuilder::kRingCcw,
                  s.theta - CityBuilder::kHalfGapDeg, pv.theta + CityBuilder::kHalfGapDeg, false);
  }

  for (int i = 0; i < ns; ++i) {
    const Site& s = sites[i];
    b.complex_site(s.name, s.kind, s.theta, s.r_mid, s.r_node, s.berths, s.entry, s.exit, fc[i],
                   fd[i], jc[i], jd[i]);
  }

  b.net.sector_length_m = 2.0;
  b.net.finalize();
  return b.net;
}

// ---------------------------------------------------------------------------
// Network file format
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

}  // namespace

Network parse_network(const std::string& text, const std::string& origin) {
  Network net;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  enum class Section { None, Nodes, Segments } section = Section::None;
  std::map<std::string, int> names;

  auto fail = [&](const std::string& msg) {
    throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "}") {
      section = Section::None;
      continue;
    }
    if (tok[0] == "nodes" || tok[0] == "segments") {
      if (tok.size() != 2 || tok[1] != "{") fail("expected '" + tok[0] + " {'");
      section = tok[0] == "nodes" ? Section::Nodes : Section::Segments;
      continue;
    }
    if (section == Section::None) {
      if (tok.size() == 3 && tok[0] == "sector_length_m" && tok[1] == "=") {
        net.sector_length_m = std::stod(tok[2]);
        continue;
      }
      fail("unexpected line outside a section: " + tok[0]);
    }
    if (section == Section::Nodes) {
      if (tok.size() < 2) fail("node line needs: name kind [key=value ...]");
      Node n;
      n.name = tok[0];
      if (tok[1] == "station")
        n.kind = NodeKind::Station;
      else if (tok[1] == "capacitor")
        n.kind = NodeKind::Capacitor;
      else if (tok[1] == "fork")
        n.kind = NodeKind::Fork;
      else if (tok[1] == "join")
        n.kind = NodeKind::Join;
      else
        fail("unknown node kind: " + tok[1]);
      if (n.kind == NodeKind::Station) {
        n.berths = 6;
        n.entry_buffer = 3;
        n.exit_buffer = 2;
      } else if (n.kind == NodeKind::Capacitor) {
        n.berths = 12;
        n.entry_buffer = 1;
        n.exit_buffer = 1;
      }
      for (size_t i = 2; i < tok.size(); ++i) {
        auto eq = tok[i].find('=');
        if (eq == std::string::npos) fail("expected key=value, got: " + tok[i]);
        std::string key = tok[i].substr(0, eq);
        double val = std::stod(tok[i].substr(eq + 1));
        if (key == "berths")
          n.berths = static_cast<int>(val);
        else if (key == "entry")
          n.entry_buffer = static_cast<int>(val);
        else if (key == "exit")
          n.exit_buffer = static_cast<int>(val);
        else if (key == "x")
          n.x = val;
        else if (key == "y")
          n.y = val;
        else
          fail("unknown node attribute: " + key);
      }
      if (names.count(n.name)) fail("duplicate node name: " + n.name);
      const std::string node_name = n.name;
      names[node_name] = net.add_node(std::move(n));
      continue;
    }
    // Segments: from to kind length_m speed_mps
    if (tok.size() != 5) fail("segment line needs: from to kind length_m speed_mps");
    auto fi = names.find(tok[0]);
    auto ti = names.find(tok[1]);
    if (fi == names.end()) fail("unknown node: " + tok[0]);
    if (ti == names.end()) fail("unknown node: " + tok[1]);
    SegmentKind kind;
    if (tok[2] == "road")
      kind = SegmentKind::Road;
    else if (tok[2] == "highway")
      kind = SegmentKind::Highway;
    else {
      fail("unknown segment kind: " + tok[2]);
      return net;
    }
    net.add_segment(fi->second, ti->second, kind, std::stod(tok[3]), std::stod(tok[4]));
  }
  net.finalize();
  return net;
}

Network load_network_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_network(ss.str(), path);
}

void write_network_file(const Network& net, std::ostream& os) {
  char buf[256];
  os << "sector_length_m = " << net.sector_length_m << "\n\nnodes {\n";
  for (const Node& n : net.nodes) {
    std::snprintf(buf, sizeof buf, "  %-10s %-9s", n.name.c_str(), to_string(n.kind));
    os << buf;
    if (n.kind == NodeKind::Station || n.kind == NodeKind::Capacitor) {
      os << " berths=" << n.berths << " entry=" << n.entry_buffer << " exit=" << n.exit_buffer;
    }
    std::snprintf(buf, sizeof buf, " x=%.2f y=%.2f\n", n.x, n.y);
    os << buf;
  }
  os << "}\n\nsegments {\n";
  for (const Segment& s : net.segments) {
    std::snprintf(buf, sizeof buf, "  %-10s %-10s %-8s %9.2f %5.1f\n",
                  net.nodes[s.from].name.c_str(), net.nodes[s.to].name.c_str(), to_string(s.kind),
                  s.length_m, s.speed_mps);
    os << buf;
  }
  os << "}\n";
}

}  // namespace prt
