// prt-evm: PRT network simulator with distributed empty-vehicle management.
//
// Subcommands: validate, simulate, ridership, sweep, report.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <zlib.h>

#include "CLI11.hpp"
#include "prt/metrics.hpp"
#include "prt/report.hpp"
#include "prt/scenario.hpp"

namespace {

std::uint64_t default_seed() {
  if (const char* env = std::getenv("PRT_EVM_SEED")) return std::strtoull(env, nullptr, 10);
  return 1;
}

void write_gz(const std::string& path, const std::string& data) {
  gzFile f = gzopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot write " + path);
  gzwrite(f, data.data(), static_cast<unsigned>(data.size()));
  gzclose(f);
}

int cmd_validate(const std::string& file) {
  prt::Network net =
      file == "city" ? prt::build_city_reference() : prt::load_network_file(file);
  prt::ValidationReport rep = prt::validate_network(net);
  if (rep.ok()) {
    std::cout << "OK: " << net.stations.size() << " stations, " << net.capacitors.size()
              << " capacitors, " << net.segments.size() << " segments\n";
    return 0;
  }
  for (const std::string& s : rep.issues) std::cout << "violation: " << s << "\n";
  return 1;
}

int cmd_simulate(const std::string& scn_path, std::int64_t seed_opt, const std::string& out_dir,
                 bool events) {
  prt::Scenario sc = prt::load_scenario(scn_path);
  const std::uint64_t seed = seed_opt >= 0 ? static_cast<std::uint64_t>(seed_opt)
                                           : (sc.seed_explicit ? sc.sim.seed : default_seed());

  std::ostringstream ev, dec;
  prt::RunOutputs outs;
  outs.decisions = &dec;
  if (events) outs.events = &ev;
  prt::RunSummary r = prt::run_experiment(sc, seed, &outs);

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream sf(out_dir + "/summary.csv");
    prt::write_summary_csv(sf, {r});
    std::ofstream df(out_dir + "/decisions.csv");
    df << "t_s,task,vehicle,from,to,score\n" << dec.str();
    if (events) write_gz(out_dir + "/events.csv.gz", ev.str());
  }

  std::printf("tag=%s J=%d lambda=%g seed=%llu\n", r.tag.c_str(), r.fleet, r.lambda_gph,
              static_cast<unsigned long long>(r.seed));
  std::printf("ASWT=%.2f s  AWT=%.2f s  NET=%lld  ETM=%.2f km  QC=%.1f\n", r.aswt_s, r.awt_s,
              r.net, r.etm_km, r.qc);
  std::printf("served=%lld generated=%lld full_trips=%lld wall=%.2f s\n", r.served, r.generated,
              r.full_trips, r.wall_time_s);
  return 0;
}

int cmd_ridership(const std::string& scn_path, int fleet, std::int64_t seed_opt) {
  prt::Scenario sc = prt::load_scenario(scn_path);
  const std::uint64_t seed =
      seed_opt >= 0 ? static_cast<std::uint64_t>(seed_opt) : default_seed();
  const int j = fleet > 0 ? fleet : sc.sim.fleet_size;
  const double m = prt::estimate_ridership(sc, j, seed);
  std::printf("M(J=%d) = %.1f groups/h\n", j, m);
  return 0;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, int jobs) {
  prt::SweepSpec spec = prt::load_sweep_spec(spec_path);
  prt::SweepResult res = prt::run_sweep(spec, jobs);
  prt::write_report(res, out_dir);
  std::cout << "wrote " << res.runs.size() << " runs / " << res.cells.size() << " cells to "
            << out_dir << "\n";
  if (spec.study == prt::SweepSpec::Study::Fleet) {
    for (auto [lambda, fleet] : prt::fleet_minimums(res.cells, spec.fleet_aswt_threshold_s)) {
      if (fleet > 0)
        std::printf("lambda=%g: minimal J with ASWT below %g s is %d\n", lambda,
                    spec.fleet_aswt_threshold_s, fleet);
      else
        std::printf("lambda=%g: no scanned fleet stays below %g s\n", lambda,
                    spec.fleet_aswt_threshold_s);
    }
  }
  return 0;
}

int cmd_report(const std::string& dir, const std::string& format) {
  std::ifstream in(dir + "/summary.csv");
  if (!in) throw std::runtime_error("no summary.csv in " + dir);
  prt::SweepResult res;
  res.runs = prt::read_summary_csv(in);
  res.cells = prt::aggregate_cells(res.runs);
  prt::write_report(res, dir, format != "csv");
  std::cout << "report rebuilt for " << res.runs.size() << " runs in " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PRT microsimulator with distributed empty vehicle management"};
  app.require_subcommand(1);

  std::string net_file;
  CLI::App* validate = app.add_subcommand("validate", "check a network file");
  validate->add_option("file", net_file, "network file or 'city'")->required();

  std::string scn_path, out_dir;
  std::int64_t seed = -1;
  bool events = false;
  CLI::App* simulate = app.add_subcommand("simulate", "run one seeded scenario");
  simulate->add_option("scenario", scn_path, "scenario file")->required();
  simulate->add_option("--seed", seed, "RNG seed (default: scenario, then $PRT_EVM_SEED)");
  simulate->add_option("--out", out_dir, "output directory for CSV logs");
  simulate->add_flag("--events", events, "also write events.csv.gz");

  std::string rid_scn;
  int rid_j = 0;
  std::int64_t rid_seed = -1;
  CLI::App* ridership = app.add_subcommand("ridership", "estimate maximum ridership M");
  ridership->add_option("scenario", rid_scn, "scenario file")->required();
  ridership->add_option("--J", rid_j, "fleet size (default: scenario value)");
  ridership->add_option("--seed", rid_seed, "RNG seed");

  std::string sweep_path, sweep_out = "sweep_out";
  int jobs = 0;
  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  sweep->add_option("spec", sweep_path, "sweep spec file")->required();
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--jobs", jobs, "parallel workers (default: hardware)");

  std::string rep_dir, rep_fmt = "svg";
  CLI::App* report = app.add_subcommand("report", "rebuild report from summary.csv");
  report->add_option("dir", rep_dir, "directory with summary.csv")->required();
  report->add_option("--format", rep_fmt, "csv | svg");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(net_file);
    if (simulate->parsed()) return cmd_simulate(scn_path, seed, out_dir, events);
    if (ridership->parsed()) return cmd_ridership(rid_scn, rid_j, rid_seed);
    if (sweep->parsed()) return cmd_sweep(sweep_path, sweep_out, jobs);
    if (report->parsed()) return cmd_report(rep_dir, rep_fmt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
