#include "prt/demand.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace prt {

void OdmMatrix::rebuild_cdf() {
  row_cdf.assign(p.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += at(i, j);
      row_cdf[static_cast<size_t>(i) * n + j] = acc;
    }
  }
}

int OdmMatrix::sample_destination(int origin, Rng& rng) const {
  const double u = rng.uniform01();
  const size_t base = static_cast<size_t>(origin) * n;
  for (int j = 0; j < n; ++j)
    if (u < row_cdf[base + j]) return j;
  // Guard against accumulated rounding in the last cell.
  for (int j = n - 1; j >= 0; --j)
    if (p[base + j] > 0.0) return j;
  return (origin + 1) % n;
}

OdmMatrix normalize_odm(int n, std::vector<double> raw) {
  if (static_cast<int>(raw.size()) != n * n)
    throw std::invalid_argument("ODM raw matrix must be N x N");
  OdmMatrix m;
  m.n = n;
  m.p = std::move(raw);
  for (int i = 0; i < n; ++i) {
    m.p[static_cast<size_t>(i) * n + i] = 0.0;
    double sum = 0.0;
    for (int j = 0; j < n; ++j) {
      double v = m.p[static_cast<size_t>(i) * n + j];
      if (v < 0.0) throw std::invalid_argument("ODM raw entries must be nonnegative");
      sum += v;
    }
    if (sum <= 0.0)
      throw std::invalid_argument("ODM row " + std::to_string(i) +
                                  " has no positive off-diagonal entry");
    for (int j = 0; j < n; ++j) m.p[static_cast<size_t>(i) * n + j] /= sum;
  }
  m.rebuild_cdf();
  return m;
}

OdmMatrix uniform_odm(int n) {
  std::vector<double> raw(static_cast<size_t>(n) * n, 1.0);
  return normalize_odm(n, std::move(raw));
}

OdmMatrix random_odm(int n, std::uint64_t seed) {
  Rng rng(derive_seed(seed, 13, 0));
  std::vector<double> raw(static_cast<size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) raw[static_cast<size_t>(i) * n + j] = rng.uniform01();
  return normalize_odm(n, std::move(raw));
}

namespace {

OdmMatrix mask_columns(OdmMatrix base, bool (*keep)(int)) {
  const int n = base.n;
  std::vector<double> raw = base.p;
  for (int j = 0; j < n; ++j) {
    if (keep(j)) continue;
    for (int i = 0; i < n; ++i) raw[static_cast<size_t>(i) * n + j] = 0.0;
  }
  return normalize_odm(n, std::move(raw));
}

}  // namespace

OdmMatrix odm2(int n, std::uint64_t seed) {
  // Columns are 1-indexed in the experiment naming; odd columns zeroed.
  return mask_columns(random_odm(n, seed), [](int j) { return (j + 1) % 2 == 0; });
}

OdmMatrix odm4(int n, std::uint64_t seed) {
  return mask_columns(random_odm(n, seed), [](int j) { return (j + 1) % 4 == 0; });
}

double Triangular::sample(Rng& rng) const {
  if (!(lo <= mode && mode <= hi))
    throw std::invalid_argument("triangular distribution requires min <= mode <= max");
  return rng.triangular(lo, mode, hi);
}

double DemandProfile::total_gps() const {
  double s = 0.0;
  for (double r : rate_gps) s += r;
  return s;
}

DemandProfile make_station_rates(double lambda_total_gph, int n_stations,
                                 const std::vector<double>* tier_multipliers) {
  DemandProfile prof;
  prof.rate_gps.assign(n_stations, 0.0);
  const double avg_gps = lambda_total_gph / 3600.0 / n_stations;
  if (tier_multipliers) {
    if (static_cast<int>(tier_multipliers->size()) != n_stations)
      throw std::invalid_argument("tier vector size must equal the station count");
    double sum = 0.0;
    for (double t : *tier_multipliers) sum += t;
    if (n_stations > 0 && std::abs(sum - n_stations) > 1e-9 * n_stations)
      throw std::invalid_argument("tier multipliers must average to 1");
    for (int i = 0; i < n_stations; ++i) prof.rate_gps[i] = (*tier_multipliers)[i] * avg_gps;
  } else {
    if (n_stations % 3 != 0)
      throw std::invalid_argument(
          "station count not divisible by 3; supply an explicit tier vector");
    static const double tiers[3] = {2.0 / 3.0, 1.0, 4.0 / 3.0};
    for (int i = 0; i < n_stations; ++i) prof.rate_gps[i] = tiers[i % 3] * avg_gps;
  }
  return prof;
}

double sample_interarrival(double rate_gps, Rng& rng) { return rng.exponential(rate_gps); }

PassengerGroup sample_group(const OdmMatrix& odm, int origin, double clock, Rng& rng) {
  PassengerGroup g;
  g.origin = origin;
  g.size = rng.uniform_int(1, 4);
  g.destination = odm.sample_destination(origin, rng);
  g.arrival_time = clock;
  return g;
}

double sample_service_time(const Triangular& dist, Rng& rng) { return dist.sample(rng); }

HistoricalStats::HistoricalStats(int n_nodes, std::vector<double> fallback_pi_s)
    : n_(n_nodes), fallback_(std::move(fallback_pi_s)) {
  buckets_.assign(static_cast<size_t>(n_) * 24, Bucket{});
}

void HistoricalStats::fold(Bucket& b, int today) const {
  if (b.open_day >= 0 && b.open_day < today) {
    if (b.open_count >= 2) {
      b.gap_sum += b.open_last - b.open_first;
      b.gaps += b.open_count - 1;
    }
    b.open_day = -1;
    b.open_count = 0;
  }
}

void HistoricalStats::record_arrival(int node, double clock) {
  const int day = static_cast<int>(clock / 86400.0);
  const int hour = static_cast<int>(std::fmod(clock, 86400.0) / 3600.0);
  Bucket& b = buckets_[static_cast<size_t>(node) * 24 + hour];
  fold(b, day);
  if (b.open_day != day) {
    b.open_day = day;
    b.open_first = clock;
    b.open_count = 0;
  }
  b.open_last = clock;
  ++b.open_count;
}

double HistoricalStats::mean_interarrival(int node, double clock) const {
  const int day = static_cast<int>(clock / 86400.0);
  const int hour = static_cast<int>(std::fmod(clock, 86400.0) / 3600.0);
  Bucket& b = buckets_[static_cast<size_t>(node) * 24 + hour];
  fold(b, day);
  if (b.gaps > 0) return b.gap_sum / static_cast<double>(b.gaps);
  double fb = node < static_cast<int>(fallback_.size()) ? fallback_[node] : 1e9;
  return fb > 0.0 ? fb : 1e9;
}

}  // namespace prt
