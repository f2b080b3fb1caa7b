#include "treebalance/bench.hpp"

#include "treebalance/rng.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace treebalance {

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return (v[mid - 1] + v[mid]) / 2.0;
}

struct ModeRun {
  PartitionTimings timings;
  double traverse_ms = 0.0;
  std::size_t nodes = 0;
  std::size_t max_worker_nodes = 0;
  std::uint64_t checksum = 0;
  int reprobes = 0;
  std::int64_t probe_visited = 0;
  double estimated_total = 0.0;
};

ModeRun run_once(const TreeStore& master, RunMode mode, const BalanceConfig& bal,
                 int work_rounds) {
  ModeRun out;
  if (mode == RunMode::serial) {
    TraverseResult t = traverse_serial(master, work_rounds);
    out.traverse_ms = t.wall_ms;
    out.nodes = t.nodes;
    out.max_worker_nodes = t.nodes;
    out.checksum = t.checksum;
    return out;
  }
  TreeStore tree = master.clone();
  PartitionResult plan =
      mode == RunMode::trivial ? trivial_partition(tree, bal.workers) : partition(tree, bal);
  TraverseResult t = run_traversal(tree, plan.workers, work_rounds);
  out.timings = plan.timings;
  out.traverse_ms = t.wall_ms;
  out.nodes = t.nodes;
  out.max_worker_nodes = t.per_worker_nodes.empty()
                             ? 0
                             : *std::max_element(t.per_worker_nodes.begin(),
                                                 t.per_worker_nodes.end());
  out.checksum = t.checksum;
  out.reprobes = plan.reprobes;
  out.probe_visited = plan.nodes_visited;
  out.estimated_total = plan.estimated_total;
  return out;
}

struct ModeSummary {
  double probe_ms = 0.0;
  double partition_ms = 0.0;
  double traverse_ms = 0.0;
  ModeRun detail;  // deterministic fields, from the last repetition
};

ModeSummary run_mode(const TreeStore& master, RunMode mode, const BenchConfig& cfg) {
  std::vector<double> probe, part, trav;
  ModeSummary s;
  for (int rep = 0; rep < cfg.reps; ++rep) {
    ModeRun r = run_once(master, mode, cfg.balance, cfg.work_rounds);
    probe.push_back(r.timings.probe_ms);
    part.push_back(r.timings.partition_ms);
    trav.push_back(r.traverse_ms);
    s.detail = r;
  }
  s.probe_ms = median(probe);
  s.partition_ms = median(part);
  s.traverse_ms = median(trav);
  return s;
}

MetricsReport base_report(const BenchConfig& cfg, std::size_t nodes) {
  MetricsReport r;
  r.tree = cfg.tree.label();
  r.nodes = nodes;
  r.p = cfg.balance.workers;
  r.psc = cfg.balance.psc;
  r.asc = cfg.balance.asc;
  r.seed = cfg.balance.seed;
  return r;
}

}  // namespace

std::string to_string(RunMode mode) {
  switch (mode) {
    case RunMode::serial:
      return "serial";
    case RunMode::trivial:
      return "trivial";
    case RunMode::suggested:
      return "suggested";
  }
  return "?";
}

std::vector<MetricsReport> run_benchmark(const BenchConfig& cfg) {
  if (cfg.reps < 1) throw std::invalid_argument("repetitions must be >= 1");
  TreeStore master = generate(cfg.tree);
  auto n = master.node_count();
  auto nd = static_cast<double>(n);

  std::vector<RunMode> modes{RunMode::serial};
  if (cfg.mode != RunMode::serial) modes.push_back(RunMode::trivial);
  if (cfg.mode == RunMode::suggested) modes.push_back(RunMode::suggested);

  std::vector<MetricsReport> rows;
  double t_serial = 0.0;
  double trivial_speedup = 0.0;
  for (RunMode mode : modes) {
    ModeSummary s = run_mode(master, mode, cfg);
    MetricsReport r = base_report(cfg, n);
    r.mode = to_string(mode);
    r.checksum = s.detail.checksum;
    if (mode == RunMode::serial) t_serial = s.traverse_ms;
    r.t_serial_ms = t_serial;
    r.t_probe_ms = s.probe_ms;
    r.t_partition_ms = s.partition_ms;
    r.t_traverse_ms = s.traverse_ms;
    double t_total = s.probe_ms + s.partition_ms + s.traverse_ms;
    r.speedup = mode == RunMode::serial ? 1.0 : (t_total > 0.0 ? t_serial / t_total : 0.0);
    r.count_speedup =
        s.detail.max_worker_nodes > 0 ? nd / static_cast<double>(s.detail.max_worker_nodes) : 0.0;
    if (mode == RunMode::trivial) {
      trivial_speedup = r.speedup;
      r.ratio_vs_trivial = 1.0;
    } else if (mode == RunMode::suggested) {
      r.ratio_vs_trivial = trivial_speedup > 0.0 ? r.speedup / trivial_speedup : 0.0;
      r.probe_overhead_pct = t_total > 0.0 ? 100.0 * s.probe_ms / t_total : 0.0;
      r.visited_pct = 100.0 * static_cast<double>(s.detail.probe_visited) / nd;
      r.estimator_error_pct = 100.0 * std::abs(s.detail.estimated_total - nd) / nd;
      r.reprobes = s.detail.reprobes;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<MetricsReport> run_sweep(const BenchConfig& base, const SweepSpec& sweep) {
  if (sweep.values.empty()) throw std::invalid_argument("sweep values must be non-empty");
  std::vector<MetricsReport> rows;

  if (sweep.axis == "visited") {
    // Estimator cost/accuracy on the whole tree across psc values; no
    // traversal runs involved.
    TreeStore master = generate(base.tree);
    auto nd = static_cast<double>(master.node_count());
    for (double psc : sweep.values) {
      BenchConfig cfg = base;
      cfg.balance.psc = psc;
      EstimateConfig ecfg = cfg.balance.estimate_config();
      Rng rng = make_stream(cfg.balance.seed, "");
      WorkEstimate est = estimate_subtree_work(master, master.root(), rng, ecfg);
      MetricsReport r = base_report(cfg, master.node_count());
      r.mode = "estimate";
      r.visited_pct = 100.0 * static_cast<double>(est.nodes_visited) / nd;
      r.estimator_error_pct = 100.0 * std::abs(est.node_count - nd) / nd;
      rows.push_back(std::move(r));
    }
    return rows;
  }

  for (double value : sweep.values) {
    BenchConfig cfg = base;
    if (sweep.axis == "p") {
      auto p = static_cast<int>(value);
      if (p < 1 || static_cast<double>(p) != value)
        throw std::invalid_argument("p sweep values must be positive integers");
      cfg.balance.workers = p;
    } else if (sweep.axis == "psc") {
      cfg.balance.psc = value;
    } else if (sweep.axis == "asc") {
      cfg.balance.asc = value;
    } else {
      throw std::invalid_argument("unknown sweep axis '" + sweep.axis +
                                  "' (want p, psc, asc or visited)");
    }
    auto batch = run_benchmark(cfg);
    // One row per swept value: the requested mode's row, with its baselines
    // already folded into the derived ratios.
    for (MetricsReport& r : batch)
      if (r.mode == to_string(cfg.mode)) rows.push_back(std::move(r));
  }
  return rows;
}

const char* const kCsvHeader =
    "mode,tree,nodes,p,psc,asc,seed,t_serial_ms,t_probe_ms,t_partition_ms,t_traverse_ms,"
    "speedup,ratio_vs_trivial,count_speedup,probe_overhead_pct,visited_pct,"
    "estimator_error_pct,reprobes";

void emit_csv(std::ostream& os, const std::vector<MetricsReport>& rows) {
  os << kCsvHeader << '\n';
  os << std::setprecision(10);
  for (const MetricsReport& r : rows) {
    os << r.mode << ',' << r.tree << ',' << r.nodes << ',' << r.p << ',' << r.psc << ','
       << r.asc << ',' << r.seed << ',' << r.t_serial_ms << ',' << r.t_probe_ms << ','
       << r.t_partition_ms << ',' << r.t_traverse_ms << ',' << r.speedup << ','
       << r.ratio_vs_trivial << ',' << r.count_speedup << ',' << r.probe_overhead_pct << ','
       << r.visited_pct << ',' << r.estimator_error_pct << ',' << r.reprobes << '\n';
  }
}

void emit_json(std::ostream& os, const std::vector<MetricsReport>& rows) {
  nlohmann::ordered_json doc;
  doc["rng"] = kRngAlgorithm;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const MetricsReport& r : rows) {
    nlohmann::ordered_json row;
    row["mode"] = r.mode;
    row["tree"] = r.tree;
    row["nodes"] = r.nodes;
    row["p"] = r.p;
    row["psc"] = r.psc;
    row["asc"] = r.asc;
    row["seed"] = r.seed;
    row["t_serial_ms"] = r.t_serial_ms;
    row["t_probe_ms"] = r.t_probe_ms;
    row["t_partition_ms"] = r.t_partition_ms;
    row["t_traverse_ms"] = r.t_traverse_ms;
    row["speedup"] = r.speedup;
    row["ratio_vs_trivial"] = r.ratio_vs_trivial;
    row["count_speedup"] = r.count_speedup;
    row["probe_overhead_pct"] = r.probe_overhead_pct;
    row["visited_pct"] = r.visited_pct;
    row["estimator_error_pct"] = r.estimator_error_pct;
    row["reprobes"] = r.reprobes;
    doc["rows"].push_back(std::move(row));
  }
  os << doc.dump(2) << '\n';
}

}  // namespace treebalance
