#pragma once

#include "treebalance/rng.hpp"
#include "treebalance/tree.hpp"

#include <cstdint>
#include <vector>

namespace treebalance {

// Result of one random root-to-termination probe.
struct ProbeResult {
  int depth = 0;          // depth at which the probe terminated
  int nodes_visited = 0;  // depth + 1
};

// Walk from `start` downward, flipping a fair coin at every node that has at
// least one child. Stepping into an absent child slot, or standing on a
// childless node, terminates the probe at the current depth.
ProbeResult random_probe(const TreeStore& tree, NodeHandle start, Rng& rng);

// counts[d] = number of probes that terminated at depth d.
using DepthHistogram = std::vector<std::int64_t>;

// reach[l] = number of probes that reached depth l or deeper (suffix sums).
std::vector<std::int64_t> reach_counts(const DepthHistogram& hist);

// Running weighted average of termination depths,
//   avg = sum(d_k * 2^d_k) / sum(2^d_k),
// held as (mantissa, shared power-of-two exponent) so depths up to 10^4 do
// not overflow. Also collects the termination histogram for the node-count
// estimator and counts its own floating-point work, which must stay constant
// per probe regardless of depth.
class ProbeStats {
 public:
  void add(int depth);

  int probes() const { return probes_; }
  int max_depth() const { return max_depth_; }
  double weighted_avg_depth() const;
  const DepthHistogram& histogram() const { return terminated_at_; }
  std::int64_t arith_ops() const { return arith_ops_; }

 private:
  int probes_ = 0;
  int max_depth_ = -1;
  // Accumulators scaled by 2^-scale_pow_: num_ = sum(d*2^(d-scale_pow_)),
  // den_ = sum(2^(d-scale_pow_)).
  double num_ = 0.0;
  double den_ = 0.0;
  int scale_pow_ = 0;
  std::int64_t arith_ops_ = 0;
  DepthHistogram terminated_at_;
};

// Exponential fit mapping the weighted average termination depth to an
// approximate node count.
struct FitConstants {
  double alpha = 1.0593;
  double beta = 0.5266;
};

// alpha * exp(beta * avg): fast relative size estimate used by the stopping
// rule. Only its convergence matters, not its absolute value.
double fast_node_count(double weighted_avg_depth, const FitConstants& fit = {});

// Unbiased node count from the termination histogram:
//   sum over levels l of 2^l * reach(l) / reach(0).
// Exact in expectation and exact outright on perfect trees. Saturates to
// DBL_MAX instead of overflowing for very deep probes.
double knuth_node_count(const DepthHistogram& hist);

// Sliding window over the last `window` fast estimates. Converged once the
// window is full and (max - min) / max < psc.
class StopWindow {
 public:
  explicit StopWindow(int window) : window_(window) {}

  void push(double estimate);
  bool filled() const { return static_cast<int>(ring_.size()) == window_; }
  bool converged(double psc) const;
  double spread() const;  // (max - min) / max over the window, inf until filled

 private:
  int window_;
  int next_ = 0;
  std::vector<double> ring_;
};

struct EstimateConfig {
  double psc = 0.1;         // stop when the window spread drops below this
  int window = 10;
  int max_probes = 100000;  // hard cap; cap_hit reports reaching it
  FitConstants fit;
};

struct WorkEstimate {
  double node_count = 0.0;  // unbiased estimate, the "work" of the subtree
  double avg_depth = 0.0;   // weighted average termination depth
  int probes_used = 0;
  std::int64_t nodes_visited = 0;  // total nodes touched by all probes
  bool cap_hit = false;
};

// Probe the subtree under `start` until the stopping rule fires (or the
// probe cap is reached) and return the node-count estimate.
WorkEstimate estimate_subtree_work(const TreeStore& tree, NodeHandle start, Rng& rng,
                                   const EstimateConfig& cfg = {});

}  // namespace treebalance
