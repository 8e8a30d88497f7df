#include "prt/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <stdexcept>

namespace prt {

namespace {

// "random(42)" -> name "random", seed 42.
bool parse_call(const std::string& s, std::string* name, std::uint64_t* arg) {
  auto open = s.find('(');
  if (open == std::string::npos) {
    *name = s;
    *arg = 0;
    return false;
  }
  *name = s.substr(0, open);
  auto close = s.find(')', open);
  std::string inner = s.substr(open + 1, close - open - 1);
  *arg = inner.empty() ? 0 : std::strtoull(inner.c_str(), nullptr, 10);
  return true;
}

void apply_task_block(TaskParams& p, const ConfigBlock& b) {
  p.f_q = b.number_or("F_Q", p.f_q);
  p.f_eb = b.number_or("F_EB", p.f_eb);
  p.f_nd = b.number_or("F_ND", p.f_nd);
  p.f_ai = b.number_or("F_AI", p.f_ai);
  p.t_ev = b.number_or("T_EV", p.t_ev);
  p.t_nd = b.number_or("T_ND", p.t_nd);
  p.t = b.number_or("T", p.t);

  const ConfigValue* tq = b.find("T_Q");
  const ConfigValue* teb = b.find("T_EB");
  if (tq || teb) {
    const bool rel_q = tq && !tq->is_number;
    const bool rel_eb = teb && !teb->is_number;
    if (tq && teb && rel_q != rel_eb)
      throw std::runtime_error("T_Q and T_EB must both be relative or both numeric");
    if (rel_q || rel_eb) {
      if (tq && tq->text != "-H+1")
        throw std::runtime_error("relative T_Q must be written as -H+1");
      if (teb && teb->text != "1/H")
        throw std::runtime_error("relative T_EB must be written as 1/H");
      p.relative_thresholds = true;
    } else {
      p.relative_thresholds = false;
      if (tq) p.t_q = tq->as_number();
      if (teb) p.t_eb = teb->as_number();
    }
  }
}

}  // namespace

Scenario scenario_from_config(const ConfigBlock& cfg, const std::string& base_dir) {
  Scenario sc;
  sc.network_source = cfg.text_or("network", "city");

  if (const ConfigBlock* sim = cfg.block("sim")) {
    sc.sim.warmup_s = sim->number_or("warmup_s", sc.sim.warmup_s);
    sc.sim.duration_s = sim->number_or("duration_s", sc.sim.duration_s);
    if (sim->has("seed")) {
      sc.sim.seed = static_cast<std::uint64_t>(sim->number_or("seed", 1));
      sc.seed_explicit = true;
    }
    sc.sim.audit = sim->number_or("audit", 0) != 0;
  }

  if (const ConfigBlock* veh = cfg.block("vehicles")) {
    sc.sim.fleet_size = static_cast<int>(veh->number_or("J", sc.sim.fleet_size));
    sc.sim.veh.a_max = veh->number_or("a_max", sc.sim.veh.a_max);
    sc.sim.veh.d_max = veh->number_or("d_max", sc.sim.veh.d_max);
    sc.sim.veh.separation_m = veh->number_or("separation", sc.sim.veh.separation_m);
    sc.sim.veh.v_road = veh->number_or("v_road", sc.sim.veh.v_road);
    sc.sim.veh.v_highway = veh->number_or("v_highway", sc.sim.veh.v_highway);
    sc.sim.station_hop_s = veh->number_or("station_hop_s", sc.sim.station_hop_s);
    const std::string placement = veh->text_or("placement", "stations");
    if (placement == "stations")
      sc.sim.placement = SimConfig::Placement::Stations;
    else if (placement == "capacitors")
      sc.sim.placement = SimConfig::Placement::Capacitors;
    else
      throw std::runtime_error("unknown placement: " + placement);
  }

  if (const ConfigBlock* dem = cfg.block("demand")) {
    sc.lambda_total_gph = dem->number_or("lambda_total", sc.lambda_total_gph);
    if (const ConfigValue* o = dem->find("odm")) {
      if (o->text == "(sequence)") {  // inline row-major matrix
        sc.odm_spec = "inline";
        sc.inline_odm = o->nums;
      } else {
        sc.odm_spec = o->text;
      }
    }
    if (const ConfigValue* b = dem->find("boarding"); b && b->nums.size() == 3)
      sc.boarding = Triangular{b->nums[0], b->nums[1], b->nums[2]};
    if (const ConfigValue* a = dem->find("alighting"); a && a->nums.size() == 3)
      sc.alighting = Triangular{a->nums[0], a->nums[1], a->nums[2]};
    const ConfigValue* tiers = dem->find("tiers");
    if (!tiers) tiers = dem->find("tier_map");
    if (tiers && !tiers->nums.empty()) sc.tier_multipliers = tiers->nums;
    if (const ConfigValue* r = dem->find("rates")) {
      // rates = ((A, 60), (B, 0), ...)
      for (const ConfigValue& pair : r->items) {
        if (pair.items.size() != 2)
          throw std::runtime_error("rates entries must be (station, groups_per_hour)");
        sc.explicit_rates_gph.emplace_back(pair.items[0].text, pair.items[1].as_number());
      }
    }
    sc.m_gph = dem->number_or("M", 0);
  }

  if (const ConfigBlock* rt = cfg.block("routing")) {
    sc.sim.routing.w_length = rt->number_or("w_length", sc.sim.routing.w_length);
    sc.sim.routing.w_freetime = rt->number_or("w_freetime", sc.sim.routing.w_freetime);
    sc.sim.routing.w_density = rt->number_or("w_density", sc.sim.routing.w_density);
  }

  if (const ConfigBlock* evm = cfg.block("evm")) {
    sc.tag = evm->text_or("tag", sc.tag);
    sc.evm = paper_default_config(sc.tag);
    sc.sim.evm_enabled = evm->number_or("enabled", 1) != 0;
    const std::string conv = evm->text_or("convention", "source_minus_destination");
    if (conv == "paper_literal")
      sc.evm.convention = EvSign::PaperLiteral;
    else if (conv == "source_minus_destination")
      sc.evm.convention = EvSign::SourceMinusDestination;
    else
      throw std::runtime_error("unknown convention: " + conv);
    if (const ConfigBlock* b = evm->block("balancing")) {
      apply_task_block(sc.evm.balancing, *b);
      sc.evm.balancing_period_s = b->number_or("period_s", sc.evm.balancing_period_s);
    }
    if (const ConfigBlock* b = evm->block("calling")) apply_task_block(sc.evm.calling, *b);
    if (const ConfigBlock* b = evm->block("expelling")) apply_task_block(sc.evm.expelling, *b);
    if (const ConfigBlock* b = evm->block("withdrawing")) {
      apply_task_block(sc.evm.withdrawing, *b);
      sc.evm.withdraw_timeout_s = b->number_or("timeout_s", sc.evm.withdraw_timeout_s);
    }
  } else {
    sc.evm = paper_default_config(sc.tag);
  }

  resolve_network(sc, base_dir);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  ConfigBlock cfg = load_config_file(path);
  return scenario_from_config(cfg, std::filesystem::path(path).parent_path().string());
}

void resolve_network(Scenario& sc, const std::string& base_dir) {
  if (sc.net && sc.dist) return;
  if (!sc.net) {
    if (sc.network_source == "city") {
      sc.net = std::make_shared<Network>(build_city_reference());
    } else {
      std::filesystem::path p(sc.network_source);
      if (p.is_relative() && !std::filesystem::exists(p) && !base_dir.empty())
        p = std::filesystem::path(base_dir) / p;
      sc.net = std::make_shared<Network>(load_network_file(p.string()));
    }
  }
  ValidationReport rep = validate_network(*sc.net);
  if (!rep.ok()) {
    std::string msg = "invalid network:";
    for (const std::string& s : rep.issues) msg += "\n  " + s;
    throw std::runtime_error(msg);
  }
  if (!sc.dist) sc.dist = std::make_shared<DistanceTable>(shortest_distances(*sc.net));
}

OdmMatrix build_odm(const Scenario& sc) {
  const int n = static_cast<int>(sc.net->stations.size());
  std::string name;
  std::uint64_t arg = 0;
  parse_call(sc.odm_spec, &name, &arg);
  if (name == "uniform") return uniform_odm(n);
  if (name == "random") return random_odm(n, arg);
  if (name == "odm2") return odm2(n, arg);
  if (name == "odm4") return odm4(n, arg);
  if (name == "inline") {
    if (static_cast<int>(sc.inline_odm.size()) != n * n)
      throw std::runtime_error("inline ODM must be N x N");
    return normalize_odm(n, sc.inline_odm);
  }
  throw std::runtime_error("unknown odm spec: " + sc.odm_spec);
}

DemandProfile build_profile(const Scenario& sc) {
  const int n = static_cast<int>(sc.net->stations.size());
  DemandProfile prof;
  if (!sc.explicit_rates_gph.empty()) {
    prof.rate_gps.assign(n, 0.0);
    for (const auto& [station_name, gph] : sc.explicit_rates_gph) {
      int node = sc.net->node_index(station_name);
      if (node < 0) throw std::runtime_error("unknown station in rates: " + station_name);
      int pos = -1;
      for (int i = 0; i < n; ++i)
        if (sc.net->stations[i] == node) pos = i;
      if (pos < 0) throw std::runtime_error(station_name + " is not a station");
      prof.rate_gps[pos] = gph / 3600.0;
    }
  } else {
    prof = make_station_rates(sc.lambda_total_gph, n,
                              sc.tier_multipliers.empty() ? nullptr : &sc.tier_multipliers);
  }
  prof.boarding = sc.boarding;
  prof.alighting = sc.alighting;
  return prof;
}

std::unique_ptr<Simulation> make_simulation(const Scenario& sc, std::uint64_t seed) {
  Scenario copy = sc;  // cheap: shared network
  resolve_network(copy);
  SimConfig cfg = copy.sim;
  cfg.seed = seed;
  return std::make_unique<Simulation>(copy.net, copy.dist, build_odm(copy), build_profile(copy),
                                      copy.evm, cfg);
}

}  // namespace prt
