#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prt/config.hpp"
#include "prt/demand.hpp"
#include "prt/evm.hpp"
#include "prt/network.hpp"
#include "prt/sim.hpp"

namespace prt {

// A fully resolved run description: network, demand, control parameters and
// simulation settings. Built from a scenario file or assembled in code.
struct Scenario {
  std::string network_source = "city";  // "city" or a .net file path
  std::shared_ptr<const Network> net;
  std::shared_ptr<const DistanceTable> dist;

  double lambda_total_gph = 210;
  std::string odm_spec = "random(42)";  // uniform | random(s) | odm2(s) | odm4(s)
  std::vector<double> inline_odm;       // row-major N*N, used when odm_spec == "inline"
  std::vector<double> tier_multipliers; // empty = auto 2/3,1,4/3 tiers
  std::vector<std::pair<std::string, double>> explicit_rates_gph;  // (station name, groups/h)
  Triangular boarding{4, 8, 20};
  Triangular alighting{4, 6, 15};

  std::string tag = "1111";
  EvmConfig evm;     // derived from the tag, then overridden by task blocks
  SimConfig sim;
  bool seed_explicit = false;  // scenario file named a seed

  double m_gph = 0;  // known maximum ridership, 0 if unknown (for the rho column)
};

// Loads <path>, resolves the network (relative to the scenario file's
// directory) and computes the distance table.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_config(const ConfigBlock& cfg, const std::string& base_dir);

// Resolves net/dist if not set yet.
void resolve_network(Scenario& sc, const std::string& base_dir = ".");

// Assembled simulation inputs for one seeded run.
OdmMatrix build_odm(const Scenario& sc);
DemandProfile build_profile(const Scenario& sc);
std::unique_ptr<Simulation> make_simulation(const Scenario& sc, std::uint64_t seed);

}  // namespace prt
