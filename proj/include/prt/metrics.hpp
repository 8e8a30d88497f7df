#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "prt/scenario.hpp"

namespace prt {

struct RunSummary {
  std::string tag;
  int fleet = 0;
  double lambda_gph = 0;
  std::uint64_t seed = 0;
  double aswt_s = 0;
  double awt_s = 0;
  long long net = 0;
  double etm_km = 0;
  double qc = 0;
  long long served = 0;
  long long generated = 0;
  long long full_trips = 0;
  double rho = 0;          // 0 when M unknown
  double wall_time_s = 0;  // not serialized: keeps summaries byte-reproducible
};

// Root mean square of the waiting times; 0 (with a warning on stderr) for an
// empty sample.
double aswt(const std::vector<double>& waits_s);
double awt(const std::vector<double>& waits_s);
double qc(double aswt_s, long long net);
double rho(double lambda_gph, double m_gph);  // throws for M <= 0
double improvement_pct(double base, double x);

struct RunOutputs {
  std::ostream* events = nullptr;
  std::ostream* decisions = nullptr;
};

RunSummary run_experiment(const Scenario& sc, std::uint64_t seed, RunOutputs* outs = nullptr);

// Saturated-demand estimate of the maximum ridership M [groups/h]: queues
// never empty, uniform ODM, no empty trips.
double estimate_ridership(const Scenario& base, int fleet, std::uint64_t seed,
                          double warmup_s = 1800, double window_s = 7200);

struct SweepSpec {
  Scenario base;
  enum class Study { Tags, Horizon, Sensitivity, Fleet };
  Study study = Study::Tags;
  std::vector<std::string> tags;       // Tags study; defaults to the 10-tag set
  std::vector<double> lambdas_gph;
  std::vector<int> fleets;
  int replications = 5;
  std::uint64_t base_seed = 1000;
  std::vector<std::pair<int, double>> ridership;  // (J, M) for the rho column
  std::vector<double> t_nds{2.0, 1.0, 2.0 / 3.0, 0.0};  // Horizon study
  double sensitivity_delta = 0.30;                      // Sensitivity study
  double fleet_aswt_threshold_s = 300;                  // Fleet study
  int fleet_min = 20, fleet_max = 80, fleet_step = 2;
};

SweepSpec load_sweep_spec(const std::string& path);

struct SweepCell {
  std::string label;  // tag or variant name
  int fleet = 0;
  double lambda_gph = 0;
  double aswt_mean = 0, awt_mean = 0, net_mean = 0, etm_mean = 0, qc_mean = 0;
  int runs = 0;
  bool is_base = false, is_best = false, is_suggested = false;
  double aswt_improvement_pct = 0;  // vs the base cell of the same (J, lambda)
  double net_change_pct = 0;
};

struct SweepResult {
  std::vector<RunSummary> runs;
  std::vector<SweepCell> cells;
};

SweepResult run_sweep(const SweepSpec& spec, int jobs = 0);

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& runs);
std::vector<RunSummary> read_summary_csv(std::istream& is);
void write_cells_csv(std::ostream& os, const std::vector<SweepCell>& cells);

// Rebuilds per-cell aggregates (base/best/suggested marks included) from raw
// run rows.
std::vector<SweepCell> aggregate_cells(const std::vector<RunSummary>& runs);

// Fleet study readout: per demand level, the smallest fleet whose mean ASWT
// stays below the threshold (-1 when no fleet in the scan qualifies).
std::vector<std::pair<double, int>> fleet_minimums(const std::vector<SweepCell>& cells,
                                                   double aswt_threshold_s);

}  // namespace prt
