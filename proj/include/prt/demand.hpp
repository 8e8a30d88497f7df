#pragma once

#include <cstdint>
#include <vector>

#include "prt/rng.hpp"

namespace prt {

// Row-stochastic destination distribution over the stations of a network.
// Indices here are station-list positions (0..N-1), not node ids.
struct OdmMatrix {
  int n = 0;
  std::vector<double> p;        // row-major probabilities, zero diagonal
  std::vector<double> row_cdf;  // per-row cumulative sums

  double at(int i, int j) const { return p[static_cast<size_t>(i) * n + j]; }
  int sample_destination(int origin, Rng& rng) const;
  void rebuild_cdf();
};

// Zeroes the diagonal and divides each row by its sum. Throws if a row has no
// positive off-diagonal entry.
OdmMatrix normalize_odm(int n, std::vector<double> raw);

OdmMatrix uniform_odm(int n);
OdmMatrix random_odm(int n, std::uint64_t seed);  // iid U(0,1) cells, then normalized
OdmMatrix odm2(int n, std::uint64_t seed);        // random with odd columns zeroed, renormalized
OdmMatrix odm4(int n, std::uint64_t seed);        // only every fourth column kept, renormalized

struct Triangular {
  double lo = 0, mode = 0, hi = 0;
  double mean() const { return (lo + mode + hi) / 3.0; }
  double sample(Rng& rng) const;  // validates lo <= mode <= hi
};

struct DemandProfile {
  std::vector<double> rate_gps;  // groups/second per station (station-list order)
  Triangular boarding{4, 8, 20};
  Triangular alighting{4, 6, 15};
  double total_gps() const;
};

// Tiered per-station rates: lambda_i = tier_i * (lambda_total / N). With no
// explicit tiers, N must be divisible by 3 and stations are assigned 2/3, 1,
// 4/3 of the average in round-robin order.
DemandProfile make_station_rates(double lambda_total_gph, int n_stations,
                                 const std::vector<double>* tier_multipliers = nullptr);

struct PassengerGroup {
  int origin = -1;       // station-list index
  int destination = -1;  // station-list index
  int size = 0;          // 1..4 persons
  double arrival_time = 0;
};

double sample_interarrival(double rate_gps, Rng& rng);
PassengerGroup sample_group(const OdmMatrix& odm, int origin, double clock, Rng& rng);
double sample_service_time(const Triangular& dist, Rng& rng);

// Per-node arrival history bucketed by hour of day. PI_i is the mean
// inter-arrival time among arrivals recorded in the same hour-of-day bucket on
// simulated days strictly before the current one; with no such history it
// falls back to the configured mean.
class HistoricalStats {
 public:
  HistoricalStats() = default;
  HistoricalStats(int n_nodes, std::vector<double> fallback_pi_s);

  void record_arrival(int node, double clock);
  double mean_interarrival(int node, double clock) const;  // PI_i, always > 0

 private:
  struct Bucket {
    double gap_sum = 0;  // closed-day inter-arrival totals
    long long gaps = 0;
    int open_day = -1;  // current-day scratch, folded in once the day passes
    double open_first = 0, open_last = 0;
    int open_count = 0;
  };
  void fold(Bucket& b, int today) const;

  int n_ = 0;
  std::vector<double> fallback_;
  mutable std::vector<Bucket> buckets_;  // n_nodes * 24
};

}  // namespace prt
