#include "prt/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace prt {

double aswt(const std::vector<double>& waits_s) {
  if (waits_s.empty()) {
    std::cerr << "warning: ASWT over an empty sample, defined as 0\n";
    return 0.0;
  }
  double sq = 0.0;
  for (double w : waits_s) sq += w * w;
  return std::sqrt(sq / static_cast<double>(waits_s.size()));
}

double awt(const std::vector<double>& waits_s) {
  if (waits_s.empty()) return 0.0;
  double s = 0.0;
  for (double w : waits_s) s += w;
  return s / static_cast<double>(waits_s.size());
}

double qc(double aswt_s, long long net) { return aswt_s * static_cast<double>(net); }

double rho(double lambda_gph, double m_gph) {
  if (m_gph <= 0.0) throw std::invalid_argument("rho requires a positive maximum ridership");
  return lambda_gph / m_gph;
}

double improvement_pct(double base, double x) { return (base - x) / base * 100.0; }

RunSummary run_experiment(const Scenario& sc, std::uint64_t seed, RunOutputs* outs) {
  const auto start = std::chrono::steady_clock::now();
  std::unique_ptr<Simulation> sim = make_simulation(sc, seed);
  if (outs && outs->events) sim->set_event_log(outs->events);
  if (outs && outs->decisions) sim->set_decision_log(outs->decisions);
  sim->run();

  RunSummary r;
  r.tag = sc.tag;
  r.fleet = sc.sim.fleet_size;
  r.lambda_gph = sc.lambda_total_gph;
  r.seed = seed;
  const Tallies& t = sim->tallies();
  r.aswt_s = aswt(t.waits_s);
  r.awt_s = awt(t.waits_s);
  if (r.aswt_s + 1e-12 < r.awt_s)
    throw std::logic_error("ASWT below AWT: the RMS-mean inequality failed");
  r.net = t.net;
  r.etm_km = t.etm_km;
  r.qc = qc(r.aswt_s, r.net);
  r.served = t.served;
  r.generated = t.generated;
  r.full_trips = t.full_trips;
  r.rho = sc.m_gph > 0 ? rho(sc.lambda_total_gph, sc.m_gph) : 0.0;
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

double estimate_ridership(const Scenario& base, int fleet, std::uint64_t seed, double warmup_s,
                          double window_s) {
  if (fleet <= 0) return 0.0;
  Scenario sc = base;
  resolve_network(sc);
  sc.sim.fleet_size = fleet;
  sc.sim.saturated = true;
  sc.sim.evm_enabled = false;
  sc.sim.placement = SimConfig::Placement::Stations;
  sc.sim.warmup_s = warmup_s;
  sc.sim.duration_s = window_s;
  sc.odm_spec = "uniform";
  std::unique_ptr<Simulation> sim = make_simulation(sc, seed);
  sim->run();
  if (sim->tallies().net != 0)
    throw std::logic_error("saturated ridership run issued empty trips");
  return static_cast<double>(sim->tallies().completed_in_window) / (window_s / 3600.0);
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace {

struct Job {
  Scenario sc;
  std::uint64_t seed;
};

std::vector<RunSummary> run_jobs(std::vector<Job> jobs, int workers) {
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers <= 0) workers = 1;
  std::vector<RunSummary> out(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      out[i] = run_experiment(jobs[i].sc, jobs[i].seed);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::min<int>(workers, static_cast<int>(jobs.size())); ++w)
    pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  return out;
}

double m_for_fleet(const SweepSpec& spec, int fleet) {
  for (const auto& [j, m] : spec.ridership)
    if (j == fleet) return m;
  return 0.0;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int jobs_n) {
  std::vector<Job> jobs;
  auto push_cell = [&](const Scenario& cell_sc) {
    for (int r = 0; r < spec.replications; ++r) {
      jobs.push_back({cell_sc, spec.base_seed + static_cast<std::uint64_t>(r)});
    }
  };

  std::vector<double> lambdas = spec.lambdas_gph;
  if (lambdas.empty()) lambdas.push_back(spec.base.lambda_total_gph);
  std::vector<int> fleets = spec.fleets;
  if (fleets.empty()) fleets.push_back(spec.base.sim.fleet_size);

  if (spec.study == SweepSpec::Study::Tags) {
    std::vector<std::string> tags = spec.tags.empty() ? standard_tag_set() : spec.tags;
    for (int j : fleets)
      for (double l : lambdas)
        for (const std::string& tag : tags) {
          Scenario sc = spec.base;
          sc.sim.fleet_size = j;
          sc.lambda_total_gph = l;
          sc.tag = tag;
          sc.evm.balancing = balancing_tag_params(tag);
          sc.m_gph = m_for_fleet(spec, j);
          push_cell(sc);
        }
  } else if (spec.study == SweepSpec::Study::Horizon) {
    for (int j : fleets)
      for (double l : lambdas)
        for (double t_nd : spec.t_nds) {
          Scenario sc = spec.base;
          sc.sim.fleet_size = j;
          sc.lambda_total_gph = l;
          // The horizon is a system-wide communication limit: applied to all
          // four tasks.
          sc.evm.balancing.t_nd = t_nd;
          sc.evm.calling.t_nd = t_nd;
          sc.evm.expelling.t_nd = t_nd;
          sc.evm.withdrawing.t_nd = t_nd;
          char label[32];
          std::snprintf(label, sizeof label, "tnd=%g", t_nd);
          sc.tag = label;
          sc.m_gph = m_for_fleet(spec, j);
          push_cell(sc);
        }
  } else if (spec.study == SweepSpec::Study::Sensitivity) {
    for (int j : fleets)
      for (double l : lambdas) {
        struct Var {
          const char* name;
          double TaskParams::*field;
        };
        static const Var vars[] = {{"F_EB", &TaskParams::f_eb},
                                   {"F_Q", &TaskParams::f_q},
                                   {"F_ND", &TaskParams::f_nd},
                                   {"F_AI", &TaskParams::f_ai}};
        for (const Var& var : vars)
          for (double sign : {+1.0, -1.0}) {
            Scenario sc = spec.base;
            sc.sim.fleet_size = j;
            sc.lambda_total_gph = l;
            sc.evm.balancing = balancing_tag_params("1111");
            sc.evm.balancing.*var.field *= 1.0 + sign * spec.sensitivity_delta;
            char label[32];
            std::snprintf(label, sizeof label, "%s%+.0f%%", var.name,
                          sign * spec.sensitivity_delta * 100.0);
            sc.tag = label;
            sc.m_gph = m_for_fleet(spec, j);
            push_cell(sc);
          }
      }
  } else {  // Fleet sizing
    for (double l : lambdas)
      for (int j = spec.fleet_min; j <= spec.fleet_max; j += spec.fleet_step) {
        Scenario sc = spec.base;
        sc.sim.fleet_size = j;
        sc.lambda_total_gph = l;
        sc.m_gph = m_for_fleet(spec, j);
        push_cell(sc);
      }
  }

  SweepResult res;
  res.runs = run_jobs(std::move(jobs), jobs_n);
  res.cells = aggregate_cells(res.runs);
  return res;
}

std::vector<SweepCell> aggregate_cells(const std::vector<RunSummary>& runs) {
  std::map<std::tuple<int, double, std::string>, SweepCell> by_key;
  std::vector<std::tuple<int, double, std::string>> order;
  for (const RunSummary& r : runs) {
    auto key = std::make_tuple(r.fleet, r.lambda_gph, r.tag);
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      SweepCell c;
      c.label = r.tag;
      c.fleet = r.fleet;
      c.lambda_gph = r.lambda_gph;
      it = by_key.emplace(key, c).first;
      order.push_back(key);
    }
    SweepCell& c = it->second;
    c.aswt_mean += r.aswt_s;
    c.awt_mean += r.awt_s;
    c.net_mean += static_cast<double>(r.net);
    c.etm_mean += r.etm_km;
    c.qc_mean += r.qc;
    ++c.runs;
  }
  std::vector<SweepCell> cells;
  for (const auto& key : order) {
    SweepCell c = by_key[key];
    c.aswt_mean /= c.runs;
    c.awt_mean /= c.runs;
    c.net_mean /= c.runs;
    c.etm_mean /= c.runs;
    c.qc_mean /= c.runs;
    cells.push_back(c);
  }
  // Mark base / best / suggested per (J, lambda) variant and compute the
  // improvement columns against the base cell.
  std::map<std::pair<int, double>, std::vector<size_t>> variants;
  for (size_t i = 0; i < cells.size(); ++i)
    variants[{cells[i].fleet, cells[i].lambda_gph}].push_back(i);
  for (auto& [key, idx] : variants) {
    size_t base = idx[0];
    bool have_base = false;
    for (size_t i : idx)
      if (cells[i].label == "0000") {
        base = i;
        have_base = true;
        cells[i].is_base = true;
      }
    size_t best = idx[0];
    for (size_t i : idx) {
      if (cells[i].qc_mean < cells[best].qc_mean) best = i;
      if (cells[i].label == "1111") cells[i].is_suggested = true;
    }
    cells[best].is_best = true;
    if (have_base && cells[base].aswt_mean > 0) {
      for (size_t i : idx) {
        cells[i].aswt_improvement_pct =
            improvement_pct(cells[base].aswt_mean, cells[i].aswt_mean);
        if (cells[base].net_mean > 0)
          cells[i].net_change_pct = improvement_pct(cells[base].net_mean, cells[i].net_mean);
      }
    }
  }
  return cells;
}

std::vector<std::pair<double, int>> fleet_minimums(const std::vector<SweepCell>& cells,
                                                   double aswt_threshold_s) {
  std::map<double, int> best;
  for (const SweepCell& c : cells) {
    if (c.aswt_mean >= aswt_threshold_s) continue;
    auto it = best.find(c.lambda_gph);
    if (it == best.end() || c.fleet < it->second) best[c.lambda_gph] = c.fleet;
  }
  std::vector<std::pair<double, int>> out;
  std::map<double, bool> seen;
  for (const SweepCell& c : cells) {
    if (seen[c.lambda_gph]) continue;
    seen[c.lambda_gph] = true;
    auto it = best.find(c.lambda_gph);
    out.emplace_back(c.lambda_gph, it == best.end() ? -1 : it->second);
  }
  return out;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& runs) {
  os << "tag,J,lambda_gph,seed,aswt_s,awt_s,net,etm_km,qc,served,generated,full_trips,rho\n";
  char buf[320];
  for (const RunSummary& r : runs) {
    std::snprintf(buf, sizeof buf, "%s,%d,%.6g,%llu,%.6f,%.6f,%lld,%.6f,%.6f,%lld,%lld,%lld,%.6f\n",
                  r.tag.c_str(), r.fleet, r.lambda_gph,
                  static_cast<unsigned long long>(r.seed), r.aswt_s, r.awt_s, r.net, r.etm_km,
                  r.qc, r.served, r.generated, r.full_trips, r.rho);
    os << buf;
  }
}

std::vector<RunSummary> read_summary_csv(std::istream& is) {
  std::vector<RunSummary> out;
  std::string line;
  if (!std::getline(is, line)) return out;  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) f.push_back(tok);
    if (f.size() != 13) throw std::runtime_error("bad summary.csv row: " + line);
    RunSummary r;
    r.tag = f[0];
    r.fleet = std::stoi(f[1]);
    r.lambda_gph = std::stod(f[2]);
    r.seed = std::stoull(f[3]);
    r.aswt_s = std::stod(f[4]);
    r.awt_s = std::stod(f[5]);
    r.net = std::stoll(f[6]);
    r.etm_km = std::stod(f[7]);
    r.qc = std::stod(f[8]);
    r.served = std::stoll(f[9]);
    r.generated = std::stoll(f[10]);
    r.full_trips = std::stoll(f[11]);
    r.rho = std::stod(f[12]);
    out.push_back(r);
  }
  return out;
}

void write_cells_csv(std::ostream& os, const std::vector<SweepCell>& cells) {
  os << "J,lambda_gph,tag,runs,aswt_mean_s,awt_mean_s,net_mean,etm_mean_km,qc_mean,"
        "aswt_improvement_pct,net_change_pct,is_base,is_best,is_suggested\n";
  char buf[320];
  for (const SweepCell& c : cells) {
    std::snprintf(buf, sizeof buf, "%d,%.6g,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.4f,%.4f,%d,%d,%d\n",
                  c.fleet, c.lambda_gph, c.label.c_str(), c.runs, c.aswt_mean, c.awt_mean,
                  c.net_mean, c.etm_mean, c.qc_mean, c.aswt_improvement_pct, c.net_change_pct,
                  c.is_base ? 1 : 0, c.is_best ? 1 : 0, c.is_suggested ? 1 : 0);
    os << buf;
  }
}

// ---------------------------------------------------------------------------
// Sweep spec files
// ---------------------------------------------------------------------------

SweepSpec load_sweep_spec(const std::string& path) {
  ConfigBlock cfg = load_config_file(path);
  SweepSpec spec;
  const std::string base_dir = std::filesystem::path(path).parent_path().string();
  const std::string scn = cfg.text_or("scenario", "");
  if (!scn.empty()) {
    std::filesystem::path p(scn);
    if (p.is_relative() && !std::filesystem::exists(p))
      p = std::filesystem::path(base_dir) / p;
    spec.base = load_scenario(p.string());
  } else {
    spec.base = scenario_from_config(cfg, base_dir);
  }

  const ConfigBlock* sw = cfg.block("sweep");
  if (!sw) throw std::runtime_error("sweep spec needs a 'sweep' block");
  const std::string study = sw->text_or("study", "tags");
  if (study == "tags")
    spec.study = SweepSpec::Study::Tags;
  else if (study == "horizon")
    spec.study = SweepSpec::Study::Horizon;
  else if (study == "sensitivity")
    spec.study = SweepSpec::Study::Sensitivity;
  else if (study == "fleet")
    spec.study = SweepSpec::Study::Fleet;
  else
    throw std::runtime_error("unknown study: " + study);

  if (const ConfigValue* tags = sw->find("tags"))
    for (const ConfigValue& t : tags->items) spec.tags.push_back(t.text);
  if (const ConfigValue* l = sw->find("lambdas")) spec.lambdas_gph = l->nums;
  if (const ConfigValue* j = sw->find("J"))
    for (double v : j->nums) spec.fleets.push_back(static_cast<int>(v));
  spec.replications = static_cast<int>(sw->number_or("replications", spec.replications));
  spec.base_seed = static_cast<std::uint64_t>(sw->number_or("base_seed", 1000));
  if (const ConfigValue* t = sw->find("t_nds")) spec.t_nds = t->nums;
  spec.sensitivity_delta = sw->number_or("delta", spec.sensitivity_delta);
  spec.fleet_aswt_threshold_s = sw->number_or("aswt_threshold", spec.fleet_aswt_threshold_s);
  if (const ConfigValue* fr = sw->find("j_range"); fr && fr->nums.size() == 3) {
    spec.fleet_min = static_cast<int>(fr->nums[0]);
    spec.fleet_max = static_cast<int>(fr->nums[1]);
    spec.fleet_step = static_cast<int>(fr->nums[2]);
  }
  if (const ConfigBlock* rid = sw->block("ridership"))
    for (const auto& [k, v] : rid->values)
      spec.ridership.emplace_back(std::stoi(k), v.as_number());
  return spec;
}

}  // namespace prt
