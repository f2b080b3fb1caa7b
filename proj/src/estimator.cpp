#include "treebalance/estimator.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace treebalance {

ProbeResult random_probe(const TreeStore& tree, NodeHandle start, Rng& rng) {
  int depth = 0;
  NodeHandle cur = start;
  while (true) {
    NodeHandle l = tree.left(cur);
    NodeHandle r = tree.right(cur);
    if (!l.valid() && !r.valid()) break;  // childless: stop without a coin
    NodeHandle next = coin_right(rng) ? r : l;
    if (!next.valid()) break;  // chose an absent slot: stop at this depth
    cur = next;
    ++depth;
  }
  return {depth, depth + 1};
}

std::vector<std::int64_t> reach_counts(const DepthHistogram& hist) {
  std::vector<std::int64_t> reach(hist.size(), 0);
  std::int64_t running = 0;
  for (std::size_t l = hist.size(); l-- > 0;) {
    running += hist[l];
    reach[l] = running;
  }
  return reach;
}

void ProbeStats::add(int depth) {
  ++probes_;
  if (depth > max_depth_) {
    max_depth_ = depth;
    terminated_at_.resize(static_cast<std::size_t>(depth) + 1, 0);
    // Rebase the accumulators so the largest term is 2^0.
    double rescale = std::ldexp(1.0, scale_pow_ - depth);
    num_ *= rescale;
    den_ *= rescale;
    scale_pow_ = depth;
    arith_ops_ += 3;
  }
  ++terminated_at_[static_cast<std::size_t>(depth)];
  double term = std::ldexp(1.0, depth - scale_pow_);
  num_ += static_cast<double>(depth) * term;
  den_ += term;
  arith_ops_ += 4;
}

double ProbeStats::weighted_avg_depth() const { return probes_ == 0 ? 0.0 : num_ / den_; }

double fast_node_count(double weighted_avg_depth, const FitConstants& fit) {
  return fit.alpha * std::exp(fit.beta * weighted_avg_depth);
}

double knuth_node_count(const DepthHistogram& hist) {
  std::vector<std::int64_t> reach = reach_counts(hist);
  if (reach.empty() || reach[0] == 0)
    throw std::invalid_argument("knuth_node_count: empty depth histogram");
  // sum(2^l * reach[l]) / reach[0], folded upward so the running value stays
  // within [0, 2*reach[0]] until the final exponent is applied.
  int maxd = static_cast<int>(reach.size()) - 1;
  double folded = 0.0;
  for (int l = 0; l <= maxd; ++l) folded = folded / 2.0 + static_cast<double>(reach[l]);
  double value = std::ldexp(folded / static_cast<double>(reach[0]), maxd);
  if (!std::isfinite(value)) value = DBL_MAX;
  return value;
}

void StopWindow::push(double estimate) {
  if (static_cast<int>(ring_.size()) < window_) {
    ring_.push_back(estimate);
  } else {
    ring_[static_cast<std::size_t>(next_)] = estimate;
    next_ = (next_ + 1) % window_;
  }
}

double StopWindow::spread() const {
  if (!filled()) return std::numeric_limits<double>::infinity();
  auto [lo, hi] = std::minmax_element(ring_.begin(), ring_.end());
  if (*hi <= 0.0) return 0.0;
  return (*hi - *lo) / *hi;
}

bool StopWindow::converged(double psc) const { return filled() && spread() < psc; }

WorkEstimate estimate_subtree_work(const TreeStore& tree, NodeHandle start, Rng& rng,
                                   const EstimateConfig& cfg) {
  WorkEstimate est;
  if (!start.valid()) return est;
  ProbeStats stats;
  StopWindow window(cfg.window);
  while (true) {
    ProbeResult probe = random_probe(tree, start, rng);
    stats.add(probe.depth);
    est.nodes_visited += probe.nodes_visited;
    window.push(fast_node_count(stats.weighted_avg_depth(), cfg.fit));
    if (window.converged(cfg.psc)) break;
    if (stats.probes() >= cfg.max_probes) {
      est.cap_hit = true;
      break;
    }
  }
  est.node_count = knuth_node_count(stats.histogram());
  est.avg_depth = stats.weighted_avg_depth();
  est.probes_used = stats.probes();
  return est;
}

}  // namespace treebalance
