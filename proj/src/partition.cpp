#include "treebalance/partition.hpp"

#include "treebalance/traverse.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>
#include <utility>

namespace treebalance {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void fill_exact_counts(PartitionResult& res, const TreeStore& tree) {
  res.per_worker_exact_count.assign(res.workers.size(), 0);
  for (std::size_t w = 0; w < res.workers.size(); ++w)
    for (const AssignedSubtree& sub : res.workers[w].subtrees)
      res.per_worker_exact_count[w] += subtree_count(tree, sub.root);
}

}  // namespace

ProbingLevel probing_level(const TreeStore& tree, int workers) {
  if (tree.empty()) throw std::invalid_argument("probing_level: empty tree");
  if (workers < 1) throw std::invalid_argument("probing_level: worker count must be >= 1");

  std::vector<NodeHandle> level{tree.root()};
  ProbingLevel best{0, level, true};
  int depth = 0;
  while (!level.empty()) {
    if (static_cast<int>(level.size()) >= workers) return {depth, std::move(level), false};
    if (level.size() >= best.roots.size()) best = {depth, level, true};
    std::vector<NodeHandle> next;
    next.reserve(level.size() * 2);
    for (NodeHandle h : level) {
      if (NodeHandle l = tree.left(h); l.valid()) next.push_back(l);
      if (NodeHandle r = tree.right(h); r.valid()) next.push_back(r);
    }
    level = std::move(next);
    ++depth;
  }
  return best;
}

PartitionResult trivial_partition(TreeStore& tree, int workers) {
  auto start = Clock::now();
  ProbingLevel pl = probing_level(tree, workers);

  PartitionResult res;
  res.workers.resize(static_cast<std::size_t>(workers));
  res.per_worker_estimated.assign(static_cast<std::size_t>(workers), 0.0);

  std::size_t m = pl.roots.size();
  std::size_t block = (m + static_cast<std::size_t>(workers) - 1) / static_cast<std::size_t>(workers);
  bool root_dealt = false;
  for (std::size_t i = 0; i < m; ++i) {
    NodeHandle root = pl.roots[i];
    std::string path = path_of(tree, root);
    if (root == tree.root())
      root_dealt = true;
    else
      clip_subtree(tree, root);
    res.workers[i / block].subtrees.push_back({root, std::move(path)});
  }
  // Whatever sits above the probing level stays attached to the root.
  if (!root_dealt) res.workers[0].subtrees.push_back({tree.root(), ""});

  res.timings.partition_ms = ms_since(start);
  fill_exact_counts(res, tree);
  return res;
}

void WorkDistribution::append(double x, double y, NodeHandle node) {
  if (!points_.empty()) {
    if (x <= points_.back().x) throw std::invalid_argument("distribution x must increase");
    y = std::max(y, points_.back().y);
  }
  points_.push_back({x, y, node});
}

void WorkDistribution::insert(std::size_t before, double x, double y, NodeHandle node) {
  if (before == 0 || before >= points_.size())
    throw std::invalid_argument("insert position must be interior");
  const DistributionPoint& lo = points_[before - 1];
  const DistributionPoint& hi = points_[before];
  if (!(lo.x < x && x < hi.x)) throw std::invalid_argument("inserted x must split its segment");
  y = std::clamp(y, lo.y, hi.y);
  points_.insert(points_.begin() + static_cast<std::ptrdiff_t>(before), {x, y, node});
}

double WorkDistribution::value_at(double x) const {
  if (points_.empty()) return 0.0;
  if (x <= points_.front().x) return points_.front().y;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (x <= points_[i].x) {
      const DistributionPoint& a = points_[i - 1];
      const DistributionPoint& b = points_[i];
      return a.y + (x - a.x) * (b.y - a.y) / (b.x - a.x);
    }
  }
  return points_.back().y;
}

double WorkDistribution::inverse_map(double y) const {
  if (points_.empty() || total() <= 0.0)
    throw FlatDistributionError("inverse_map: distribution has no work");
  if (y <= points_.front().y) return points_.front().x;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    double y1 = points_[i - 1].y;
    double y2 = points_[i].y;
    if (y1 < y && y <= y2) {
      double x1 = points_[i - 1].x;
      double x2 = points_[i].x;
      return x1 + (y - y1) * (x2 - x1) / (y2 - y1);
    }
  }
  return points_.back().x;
}

WorkDistribution build_distribution(const std::vector<SubtreeEstimate>& estimates) {
  WorkDistribution dist;
  if (estimates.empty()) return dist;
  dist.append(estimates.front().interval.lo(), 0.0, NodeHandle());
  double cum = 0.0;
  for (const SubtreeEstimate& e : estimates) {
    cum += e.work.node_count;
    dist.append(e.interval.hi(), cum, e.root);
  }
  return dist;
}

RefineStats adaptive_refine(const TreeStore& tree, WorkDistribution& dist, double y,
                            const BalanceConfig& cfg, Rng& rng) {
  RefineStats stats;
  double total = dist.total();
  if (total <= 0.0 || !(y > 0.0) || !(y < total)) return stats;
  double threshold = (cfg.asc / 100.0) * total / cfg.workers;

  const auto& pts = dist.points();
  std::size_t i = 1;
  while (i < pts.size() && !(pts[i - 1].y < y && y <= pts[i].y)) ++i;
  if (i >= pts.size()) return stats;

  EstimateConfig ecfg = cfg.estimate_config();
  while (stats.reprobes < cfg.max_reprobes) {
    double x1 = pts[i - 1].x;
    double y1 = pts[i - 1].y;
    double x2 = pts[i].x;
    double y2 = pts[i].y;
    if (std::min(y - y1, y2 - y) <= threshold) break;

    NodeHandle covering = pts[i].node;
    if (!covering.valid()) break;
    NodeHandle left = tree.left(covering);
    if (!left.valid()) break;
    double xm = x1 + (x2 - x1) / 2.0;
    if (!(x1 < xm && xm < x2)) break;

    WorkEstimate we = estimate_subtree_work(tree, left, rng, ecfg);
    ++stats.reprobes;
    stats.probes += we.probes_used;
    stats.nodes_visited += we.nodes_visited;
    stats.cap_hit = stats.cap_hit || we.cap_hit;

    double y_new = std::clamp(y1 + we.node_count, y1, y2);
    NodeHandle right = tree.right(covering);
    dist.insert(i, xm, y_new, left);
    dist.point(i + 1).node = right;  // old segment's upper half
    if (y > y_new) ++i;              // otherwise the new lower half brackets y
  }
  return stats;
}

WorkerAssignment extract_assignment(TreeStore& tree, double x, int granularity) {
  WorkerAssignment out;
  if (tree.empty()) return out;

  std::uint64_t cells = std::uint64_t{1} << granularity;
  std::uint64_t k = snap_to_grid(x, granularity);
  NodeHandle current = node_at_interval_end(tree, x, granularity);
  if (current == tree.root()) {
    if (k == cells) {
      // far-right boundary: the whole remainder in one piece
      out.subtrees.push_back({tree.root(), ""});
      return out;
    }
    // Clamped at the root, so the descent's very first step was missing.
    // Left side missing: nothing lies before the boundary. Right side
    // missing: everything under the left child does.
    if (2 * k <= cells) return out;
    current = tree.left(tree.root());
    if (!current.valid()) return out;
  }

  // Take the landed subtree, then, walking the path back to the root, the
  // left sibling under every right-turn. That is exactly the set of nodes
  // whose intervals end at or before the landed node's interval end; path
  // ancestors themselves always reach further right and stay.
  bool was_right = tree.is_right_child(current);
  NodeHandle parent = tree.parent(current);
  std::string path = path_of(tree, current);
  clip_subtree(tree, current);
  out.subtrees.push_back({current, std::move(path)});
  while (parent.valid()) {
    NodeHandle next_parent = tree.parent(parent);
    bool parent_was_right = tree.is_right_child(parent);
    if (was_right) {
      if (NodeHandle sib = tree.left(parent); sib.valid()) {
        std::string sib_path = path_of(tree, sib);
        clip_subtree(tree, sib);
        out.subtrees.push_back({sib, std::move(sib_path)});
      }
    }
    was_right = parent_was_right;
    parent = next_parent;
  }
  return out;
}

PartitionResult partition(TreeStore& tree, const BalanceConfig& cfg) {
  if (tree.empty()) throw std::invalid_argument("partition: empty tree");
  int p = cfg.workers;

  ProbingLevel pl = probing_level(tree, p);
  auto m = static_cast<int>(pl.roots.size());
  std::vector<SubtreeEstimate> estimates(static_cast<std::size_t>(m));
  std::vector<double> probe_walls(static_cast<std::size_t>(m), 0.0);
  EstimateConfig ecfg = cfg.estimate_config();

#pragma omp parallel for schedule(dynamic) num_threads(effective_threads(m))
  for (int i = 0; i < m; ++i) {
    auto start = Clock::now();
    SubtreeEstimate& e = estimates[static_cast<std::size_t>(i)];
    e.root = pl.roots[static_cast<std::size_t>(i)];
    e.path = path_of(tree, e.root);
    e.interval = interval_of(tree, e.root);
    Rng rng = make_stream(cfg.seed, e.path);
    e.work = estimate_subtree_work(tree, e.root, rng, ecfg);
    probe_walls[static_cast<std::size_t>(i)] = ms_since(start);
  }

  PartitionResult res;
  res.timings.probe_ms = *std::max_element(probe_walls.begin(), probe_walls.end());
  for (const SubtreeEstimate& e : estimates) {
    res.probes += e.work.probes_used;
    res.nodes_visited += e.work.nodes_visited;
    res.cap_hit = res.cap_hit || e.work.cap_hit;
  }

  auto part_start = Clock::now();
  WorkDistribution dist = build_distribution(estimates);
  res.estimated_total = dist.total();
  if (dist.total() <= 0.0) {
    PartitionResult fallback = trivial_partition(tree, p);
    fallback.fell_back = true;
    fallback.timings.probe_ms = res.timings.probe_ms;
    fallback.probes = res.probes;
    fallback.nodes_visited = res.nodes_visited;
    fallback.cap_hit = res.cap_hit;
    return fallback;
  }

  res.workers.resize(static_cast<std::size_t>(p));
  res.per_worker_estimated.assign(static_cast<std::size_t>(p), 0.0);
  Rng refine_rng = make_stream(cfg.seed, "refine");
  double prev_cum = 0.0;
  bool remainder_taken = false;
  for (int t = 1; t < p; ++t) {
    if (remainder_taken) break;  // an earlier boundary already swallowed the tree
    double y = dist.total() * static_cast<double>(t) / static_cast<double>(p);
    RefineStats rs = adaptive_refine(tree, dist, y, cfg, refine_rng);
    res.reprobes += rs.reprobes;
    res.probes += rs.probes;
    res.nodes_visited += rs.nodes_visited;
    res.cap_hit = res.cap_hit || rs.cap_hit;

    double x = std::min(dist.inverse_map(y), 1.0);
    WorkerAssignment a = extract_assignment(tree, x, cfg.granularity);
    if (!a.subtrees.empty() && a.subtrees.front().path.empty()) remainder_taken = true;
    res.workers[static_cast<std::size_t>(t - 1)] = std::move(a);

    double cum = dist.value_at(x);
    res.per_worker_estimated[static_cast<std::size_t>(t - 1)] = cum - prev_cum;
    prev_cum = cum;
  }
  if (!remainder_taken) {
    res.workers[static_cast<std::size_t>(p - 1)] = extract_assignment(tree, 1.0, cfg.granularity);
    res.per_worker_estimated[static_cast<std::size_t>(p - 1)] = dist.total() - prev_cum;
  }
  res.timings.partition_ms = ms_since(part_start);
  fill_exact_counts(res, tree);
  return res;
}

std::string format_plan(const PartitionResult& result) {
  std::ostringstream os;
  for (std::size_t w = 0; w < result.workers.size(); ++w) {
    double est = w < result.per_worker_estimated.size() ? result.per_worker_estimated[w] : 0.0;
    os << "worker " << w << " (est " << est << "):";
    const auto& subtrees = result.workers[w].subtrees;
    if (subtrees.empty()) {
      os << " -";
    } else {
      for (const AssignedSubtree& sub : subtrees) os << ' ' << (sub.path.empty() ? "<root>" : sub.path);
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace treebalance
