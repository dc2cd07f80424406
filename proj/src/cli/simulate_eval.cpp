#include <ostream>

#include "acme/cli/commands.hpp"
#include "acme/common/error.hpp"
#include "acme/common/text.hpp"
#include "acme/eval/dataset.hpp"
#include "acme/report/serialize.hpp"

namespace acme::cli {

report::Report run_simulate_eval(const RunConfig& rc, std::ostream& summary) {
  if (!rc.eval_datasets) throw Error(ErrorCode::kConfig, "simulate-eval needs --datasets or eval.datasets");
  const auto datasets = eval::load_datasets(*rc.eval_datasets);
  if (datasets.empty()) throw Error(ErrorCode::kData, "no datasets in " + rc.eval_datasets->string());

  const int nodes = static_cast<int>(rc.kv.get_int("eval.nodes", 1));
  const int gpus_per_node = static_cast<int>(rc.kv.get_int("eval.gpus_per_node", rc.cluster.node.gpus_per_node));
  if (nodes < 1 || gpus_per_node < 1) throw Error(ErrorCode::kConfig, "eval.nodes and eval.gpus_per_node must be >= 1");
  const eval::LoadModel load = eval::LoadModel::from_config(rc.kv);
  load.validate();
  eval::PlanOptions plan_options;
  plan_options.split_factor = rc.kv.get_double("eval.split_factor", plan_options.split_factor);
  eval::SimOptions sim_options;
  sim_options.cpu_slots = static_cast<int>(rc.kv.get_int("eval.cpu_slots", 0));
  if (sim_options.cpu_slots < 0) throw Error(ErrorCode::kConfig, "eval.cpu_slots must be >= 0");

  std::vector<eval::EvalMode> modes;
  const std::string mode = text::lower(rc.kv.get_string("eval.mode", "both"));
  if (mode == "baseline" || mode == "both") modes.push_back(eval::EvalMode::kBaseline);
  if (mode == "decoupled" || mode == "both") modes.push_back(eval::EvalMode::kDecoupled);
  if (modes.empty()) throw Error(ErrorCode::kConfig, "eval.mode must be baseline or decoupled");

  report::Report rep;
  rep.command = "simulate-eval";
  rep.seed = rc.seed;
  rep.config = rc.recorded();
  report::Json setup;
  setup["datasets"] = datasets.size();
  setup["nodes"] = nodes;
  setup["gpus_per_node"] = gpus_per_node;
  setup["remote_load_solo_s"] = load.remote_solo_seconds();
  setup["local_load_s"] = load.local_seconds();
  rep.results["setup"] = setup;

  report::Json runs = report::Json::object();
  std::map<eval::EvalMode, double> makespan;
  for (const auto m : modes) {
    const auto plan = eval::plan_trials(datasets, nodes * gpus_per_node, nodes, m, load, plan_options);
    const auto result = eval::simulate_eval(plan, load, sim_options);
    const std::string name(to_string(m));
    runs[name] = report::encode(result);
    rep.tables["timeline_" + name] = report::timeline_table(result.timeline);
    report::PlotData idle{"gpu", "idle_fraction", {}};
    for (std::size_t g = 0; g < result.gpu_idle_fraction.size(); ++g) {
      idle.points.emplace_back(static_cast<double>(g), result.gpu_idle_fraction[g]);
    }
    rep.plots["gpu_idle_" + name] = std::move(idle);
    makespan[m] = result.makespan;
    summary << "  " << name << ": makespan " << result.makespan << " s, mean GPU idle "
            << result.mean_idle_fraction << "\n";
  }
  rep.results["runs"] = runs;
  if (makespan.size() == 2) {
    const double ratio = makespan[eval::EvalMode::kBaseline] / makespan[eval::EvalMode::kDecoupled];
    rep.results["speedup"] = ratio;
    summary << "  speedup (baseline / decoupled makespan): " << ratio << "\n";
  }
  return rep;
}

}  // namespace acme::cli
