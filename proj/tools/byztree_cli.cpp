// byztree: command-line front end for the attack/design library.
//
//   byztree figure f2 [--set t=0.3] [--out f2.csv]
//   byztree scenario path/to/scenario.json [--seed 7] [--samples 100000]
//   byztree attack --K 3 --a 2 --costs 52,48,24 --budget 50
//   byztree design --costs 52,50,25,24,16,10,8,6,5,4 --network-budget 400000
//                  --attacker-budget 50 --amax 11 --nmin 1400
//   byztree simulate --t 0.4 --p10 1 --p01 1 --samples 1000000

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "byztree/byztree.hpp"

namespace {

using nlohmann::json;

int emit(const byztree::ResultTable& table, const std::string& out) {
  if (out.empty()) {
    byztree::writeTable(std::cout, table);
    return 0;
  }
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write " << out << '\n';
    return 1;
  }
  byztree::writeTable(file, table);
  return 0;
}

json profileJson(double pd, double pfa) {
  return {{"pdH", pd}, {"pfaH", pfa}, {"pdB", pd}, {"pfaB", pfa}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Byzantine attacks and robust topology design for tree detection networks"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> samples;
  app.add_option("--out", out, "Write the result table to this file instead of stdout");
  app.add_option("--seed", seed, "Random seed (simulation)");
  app.add_option("--samples", samples, "Monte Carlo sample count (simulation)");

  // figure
  auto* fig = app.add_subcommand("figure", "Emit the data grid behind a figure (f2..f6)");
  std::string figure_id;
  std::vector<std::string> sets;
  fig->add_option("id", figure_id, "f2, f3, f4, f5 or f6")->required();
  fig->add_option("--set", sets, "Override a default parameter, key=value");

  // scenario
  auto* scen = app.add_subcommand("scenario", "Run a JSON scenario file");
  std::string scenario_path;
  scen->add_option("path", scenario_path, "Scenario file")->required();

  // attack
  auto* att = app.add_subcommand("attack", "Attacker best response on T(K, a)");
  int att_k = 0;
  int att_a = 0;
  std::vector<std::int64_t> att_costs;
  std::int64_t att_budget = 0;
  double att_pd = 0.8;
  double att_pfa = 0.2;
  att->add_option("--K", att_k, "Tree depth")->required();
  att->add_option("--a", att_a, "Branching factor")->required();
  att->add_option("--costs", att_costs, "Per-level capture costs")->required()->delimiter(',');
  att->add_option("--budget", att_budget, "Attacker budget")->required();
  att->add_option("--pd", att_pd, "Detection probability");
  att->add_option("--pfa", att_pfa, "False-alarm probability");

  // design
  auto* des = app.add_subcommand("design", "Robust (K, a) selection");
  std::vector<std::int64_t> des_costs;
  std::int64_t des_net = 0;
  std::int64_t des_att = 0;
  int des_amin = 3;
  int des_amax = 0;
  int des_kmin = 2;
  std::int64_t des_nmin = 1;
  des->add_option("--costs", des_costs, "Per-level costs")->required()->delimiter(',');
  des->add_option("--network-budget", des_net, "Deployment budget")->required();
  des->add_option("--attacker-budget", des_att, "Attacker budget")->required();
  des->add_option("--amin", des_amin, "Smallest admissible branching factor");
  des->add_option("--amax", des_amax, "Largest admissible branching factor")->required();
  des->add_option("--kmin", des_kmin, "Smallest admissible depth");
  des->add_option("--nmin", des_nmin, "Minimum number of nodes")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo check of the received-bit model");
  std::string sim_mode = "fc";
  double sim_t = 0.4;
  int sim_k = 3;
  int sim_a = 2;
  std::vector<std::int64_t> sim_alloc;
  double sim_p10 = 1.0;
  double sim_p01 = 1.0;
  double sim_pd = 0.8;
  double sim_pfa = 0.2;
  sim->add_option("--mode", sim_mode, "fc (probabilistic view) or tree (full propagation)")
      ->check(CLI::IsMember({"fc", "tree"}));
  sim->add_option("--t", sim_t, "Covered fraction (fc mode)");
  sim->add_option("--K", sim_k, "Tree depth (tree mode)");
  sim->add_option("--a", sim_a, "Branching factor (tree mode)");
  sim->add_option("--alloc", sim_alloc, "Byzantines per level (tree mode)")->delimiter(',');
  sim->add_option("--p10", sim_p10, "P(send 1 | saw 0)");
  sim->add_option("--p01", sim_p01, "P(send 0 | saw 1)");
  sim->add_option("--pd", sim_pd, "Detection probability");
  sim->add_option("--pfa", sim_pfa, "False-alarm probability");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  byztree::ScenarioOptions opts;
  opts.seed = seed;
  opts.samples = samples;

  try {
    std::vector<std::string> warnings;
    byztree::ResultTable table;
    if (fig->parsed()) {
      byztree::Overrides overrides;
      for (const auto& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
          throw byztree::UsageError("override '" + s + "' must look like key=value");
        }
        overrides[s.substr(0, eq)] = s.substr(eq + 1);
      }
      table = byztree::runFigure(byztree::parseFigureId(figure_id), overrides, seed.value_or(0));
      if (auto w = table.meta("warning")) warnings.push_back(*w);
    } else if (scen->parsed()) {
      table = byztree::runScenario(scenario_path, opts, &warnings);
    } else {
      json doc;
      if (att->parsed()) {
        doc = {{"task", "attack"},
               {"shape", {{"K", att_k}, {"a", att_a}}},
               {"costs", att_costs},
               {"budgets", {{"attacker", att_budget}}},
               {"profile", profileJson(att_pd, att_pfa)}};
      } else if (des->parsed()) {
        doc = {{"task", "design"},
               {"costs", des_costs},
               {"budgets", {{"network", des_net}, {"attacker", des_att}}},
               {"design", {{"aMin", des_amin}, {"aMax", des_amax}, {"kMin", des_kmin}, {"nMin", des_nmin}}}};
      } else {
        doc = {{"task", "simulate"},
               {"strategy", {{"p10", sim_p10}, {"p01", sim_p01}}},
               {"profile", profileJson(sim_pd, sim_pfa)},
               {"sim", {{"mode", sim_mode}}}};
        if (sim_mode == "fc") {
          doc["coverage"] = sim_t;
        } else {
          doc["shape"] = {{"K", sim_k}, {"a", sim_a}};
          doc["allocation"] = sim_alloc;
        }
      }
      table = byztree::runScenarioDocument(doc, opts, &warnings);
      table.metadata.front().second = "byztree " + app.get_subcommands().front()->get_name();
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return emit(table, out);
  } catch (const byztree::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const byztree::ScenarioParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return 1;
  } catch (const byztree::ScenarioInvariantError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
