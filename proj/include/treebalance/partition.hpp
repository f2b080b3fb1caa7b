#pragma once

#include "treebalance/estimator.hpp"
#include "treebalance/tree.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace treebalance {

struct BalanceConfig {
  int workers = 4;
  double psc = 0.1;        // probing stop criterion (relative window spread)
  double asc = 10.0;       // adaptive stop criterion, percent of one worker's share
  int window = 10;
  int granularity = 16;    // boundary snap grid is 2^granularity
  int max_probes = 100000;
  int max_reprobes = 32;   // per boundary, in the adaptive refinement
  std::uint64_t seed = 42;
  FitConstants fit;

  EstimateConfig estimate_config() const { return {psc, window, max_probes, fit}; }
};

// Nodes of the first level whose existing-node count reaches the worker
// count. If no level ever does (degenerate spines), the fullest level wins,
// deepest on ties, and shortfall is set.
struct ProbingLevel {
  int level = 0;
  std::vector<NodeHandle> roots;
  bool shortfall = false;
};

ProbingLevel probing_level(const TreeStore& tree, int workers);

// One worker's slice: subtree roots plus their root-to-subtree paths in the
// original tree (recorded before clipping detaches them).
struct AssignedSubtree {
  NodeHandle root;
  std::string path;
};

struct WorkerAssignment {
  std::vector<AssignedSubtree> subtrees;
};

struct PartitionTimings {
  double probe_ms = 0.0;      // max per-subtree probing wall time
  double partition_ms = 0.0;  // distribution, refinement, mapping, clipping
};

struct PartitionResult {
  std::vector<WorkerAssignment> workers;
  std::vector<double> per_worker_estimated;
  std::vector<std::size_t> per_worker_exact_count;  // filled after clipping, for metrics
  PartitionTimings timings;
  int reprobes = 0;
  std::int64_t probes = 0;         // all probes, initial and refinement
  std::int64_t nodes_visited = 0;  // nodes touched by those probes
  double estimated_total = 0.0;
  bool cap_hit = false;
  bool fell_back = false;  // flat distribution forced the trivial split
};

// Probing-level subtrees dealt to workers in contiguous blocks of ceil(m/p)
// in interval order, clipped off the tree; whatever remains above the level
// goes to worker 0. No probing.
PartitionResult trivial_partition(TreeStore& tree, int workers);

// Piecewise-linear cumulative work over [0,1]. Each point carries the node
// whose subtree spans the segment ending at that point, which is what the
// adaptive refinement descends into.
struct DistributionPoint {
  double x = 0.0;
  double y = 0.0;
  NodeHandle node;
};

class WorkDistribution {
 public:
  // Appends a point; x must exceed the last x, y is clamped up to monotone.
  void append(double x, double y, NodeHandle node);
  // Inserts a refinement point between existing points, keeping both
  // coordinates monotone (y clamped into the surrounding segment).
  void insert(std::size_t before, double x, double y, NodeHandle node);

  double total() const { return points_.empty() ? 0.0 : points_.back().y; }
  double value_at(double x) const;     // linear interpolation
  double inverse_map(double y) const;  // x with value_at(x) == y

  const std::vector<DistributionPoint>& points() const { return points_; }
  DistributionPoint& point(std::size_t i) { return points_[i]; }

 private:
  std::vector<DistributionPoint> points_;
};

// Raised by inverse_map when total work is zero and no segment can bracket
// the target; partition() falls back to the trivial split on this.
struct FlatDistributionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-subtree probing outcome for one probing-level root.
struct SubtreeEstimate {
  NodeHandle root;
  std::string path;
  IntervalLabel interval;
  WorkEstimate work;
};

// Cumulative distribution over the estimates ordered by interval position:
// one point per subtree at its interval end, preceded by a zero point at the
// first subtree's interval start.
WorkDistribution build_distribution(const std::vector<SubtreeEstimate>& estimates);

struct RefineStats {
  int reprobes = 0;
  std::int64_t probes = 0;
  std::int64_t nodes_visited = 0;
  bool cap_hit = false;
};

// Sharpen the distribution around the boundary target y. While both bracket
// points are farther from y than (asc/100) * total / workers, probe the left
// half of the bracketing segment's subtree and insert the measured midpoint.
// Stops early on missing children or after max_reprobes rounds.
RefineStats adaptive_refine(const TreeStore& tree, WorkDistribution& dist, double y,
                            const BalanceConfig& cfg, Rng& rng);

// Cut the remaining tree at boundary x, clipping off every maximal subtree
// whose interval lies at or left of x. x == 1 returns the whole remainder as
// {root}; a boundary that resolves to the root otherwise returns an empty
// assignment.
WorkerAssignment extract_assignment(TreeStore& tree, double x, int granularity);

// Full pipeline: probing level, parallel per-subtree estimation, cumulative
// distribution, p-1 refined and inverse-mapped boundaries, extraction in
// interval order. The last worker receives the remainder, including the
// nodes above the probing level. Mutates the tree; clone first to keep it.
PartitionResult partition(TreeStore& tree, const BalanceConfig& cfg);

// One line per worker: "worker <i> (est <work>): <path> <path>...", with
// "<root>" for the empty path and "-" for an empty set.
std::string format_plan(const PartitionResult& result);

}  // namespace treebalance
