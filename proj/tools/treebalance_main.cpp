#include "treebalance/bench.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <string>

namespace {

treebalance::SweepSpec parse_sweep(const std::string& text) {
  auto eq = text.find('=');
  if (eq == std::string::npos)
    throw CLI::ValidationError("--sweep", "expected axis=v1,v2,... in '" + text + "'");
  treebalance::SweepSpec spec;
  spec.axis = text.substr(0, eq);
  std::string values = text.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= values.size()) {
    auto comma = values.find(',', pos);
    std::string item = values.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      spec.values.push_back(v);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--sweep", "bad numeric value '" + item + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static load balancing benchmark for unbalanced binary tree traversals"};

  std::string tree_arg = "fib:26";
  std::string mode_arg = "suggested";
  std::string sweep_arg;
  std::string out_path;
  std::string plan_path;
  std::string format = "csv";
  treebalance::BenchConfig cfg;

  app.add_option("--tree", tree_arg, "Workload: fib:K, random:N:S (S = swap fraction) or perfect:D")
      ->capture_default_str();
  app.add_option("--p", cfg.balance.workers, "Worker count")->capture_default_str();
  app.add_option("--mode", mode_arg, "Run mode")
      ->check(CLI::IsMember({"serial", "trivial", "suggested"}))
      ->capture_default_str();
  app.add_option("--psc", cfg.balance.psc, "Probing stop criterion (relative window spread)")
      ->capture_default_str();
  app.add_option("--asc", cfg.balance.asc, "Adaptive stop criterion, percent of a worker share")
      ->capture_default_str();
  app.add_option("--window", cfg.balance.window, "Stopping-rule window size")
      ->capture_default_str();
  app.add_option("--granularity", cfg.balance.granularity, "Boundary grid is 2^granularity")
      ->capture_default_str();
  app.add_option("--seed", cfg.balance.seed, "Master seed for tree generation and probing")
      ->capture_default_str();
  app.add_option("--work-unit", cfg.work_rounds, "Synthetic arithmetic rounds per visited node")
      ->capture_default_str();
  app.add_option("--reps", cfg.reps, "Repetitions per measurement (median reported)")
      ->capture_default_str();
  app.add_option("--sweep", sweep_arg, "Sweep axis=v1,v2,... with axis in {p, psc, asc, visited}");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--emit-plan", plan_path, "Also write the per-worker subtree plan to this file");
  auto* format_opt = app.add_option("--format", format, "Report format")
                         ->check(CLI::IsMember({"csv", "json"}))
                         ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.tree = treebalance::parse_tree_spec(tree_arg);
    cfg.tree.seed = cfg.balance.seed;
    if (mode_arg == "serial") cfg.mode = treebalance::RunMode::serial;
    if (mode_arg == "trivial") cfg.mode = treebalance::RunMode::trivial;
    if (mode_arg == "suggested") cfg.mode = treebalance::RunMode::suggested;
    if (format_opt->count() == 0 && out_path.size() > 5 &&
        out_path.rfind(".json") == out_path.size() - 5)
      format = "json";

    std::vector<treebalance::MetricsReport> rows;
    if (sweep_arg.empty())
      rows = run_benchmark(cfg);
    else
      rows = run_sweep(cfg, parse_sweep(sweep_arg));

    std::ofstream file;
    if (!out_path.empty()) {
      file.open(out_path);
      if (!file) throw std::runtime_error("cannot open output file '" + out_path + "'");
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    if (format == "json")
      emit_json(os, rows);
    else
      emit_csv(os, rows);
    if (!out_path.empty() && !file)
      throw std::runtime_error("failed writing output file '" + out_path + "'");

    if (!plan_path.empty()) {
      treebalance::TreeStore tree = generate(cfg.tree);
      treebalance::PartitionResult plan =
          cfg.mode == treebalance::RunMode::trivial
              ? trivial_partition(tree, cfg.balance.workers)
              : partition(tree, cfg.balance);
      std::ofstream pf(plan_path);
      if (!pf) throw std::runtime_error("cannot open plan file '" + plan_path + "'");
      pf << format_plan(plan);
      if (!pf) throw std::runtime_error("failed writing plan file '" + plan_path + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
