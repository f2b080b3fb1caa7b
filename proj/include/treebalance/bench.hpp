#pragma once

#include "treebalance/partition.hpp"
#include "treebalance/traverse.hpp"
#include "treebalance/tree.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace treebalance {

enum class RunMode { serial, trivial, suggested };

std::string to_string(RunMode mode);

struct BenchConfig {
  TreeSpec tree;
  BalanceConfig balance;
  RunMode mode = RunMode::suggested;
  int work_rounds = 0;
  int reps = 5;  // medians over this many runs are reported
};

// One benchmark row. Times are medians over the reps; derived ratios are
// computed from the medians.
struct MetricsReport {
  std::string mode;
  std::string tree;
  std::size_t nodes = 0;
  int p = 0;
  double psc = 0.0;
  double asc = 0.0;
  std::uint64_t seed = 0;
  double t_serial_ms = 0.0;
  double t_probe_ms = 0.0;
  double t_partition_ms = 0.0;
  double t_traverse_ms = 0.0;
  double speedup = 0.0;
  double ratio_vs_trivial = 0.0;  // 0 when no trivial run is paired
  double count_speedup = 0.0;     // nodes / max per-worker node count
  double probe_overhead_pct = 0.0;
  double visited_pct = 0.0;            // whole-tree estimate probe cost
  double estimator_error_pct = 0.0;    // whole-tree estimate accuracy
  int reprobes = 0;
  std::uint64_t checksum = 0;
};

// Runs the requested mode (serial is always run as the baseline) and fills
// one report per mode actually executed.
std::vector<MetricsReport> run_benchmark(const BenchConfig& cfg);

struct SweepSpec {
  std::string axis;  // "p", "psc", "asc", "visited"
  std::vector<double> values;
};

std::vector<MetricsReport> run_sweep(const BenchConfig& base, const SweepSpec& sweep);

// CSV with a fixed header; one row per report.
void emit_csv(std::ostream& os, const std::vector<MetricsReport>& rows);

// JSON array of objects in the same field order, plus a "rng" field naming
// the generator so runs are reproducible across builds.
void emit_json(std::ostream& os, const std::vector<MetricsReport>& rows);

extern const char* const kCsvHeader;

}  // namespace treebalance
