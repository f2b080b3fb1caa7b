#include "treebalance/traverse.hpp"

#include "treebalance/rng.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>

namespace treebalance {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::uint64_t node_value(NodeHandle h, int rounds) {
  return work_kernel(mix64(h.index() + 0x9e3779b97f4a7c15ull), rounds);
}

}  // namespace

std::uint64_t work_kernel(std::uint64_t x, int rounds) {
  for (int i = 0; i < rounds; ++i) x = x * 6364136223846793005ull + 1442695040888963407ull;
  return x;
}

int effective_threads(int tasks) {
  int threads = omp_get_max_threads();
  if (const char* env = std::getenv("TREEBALANCE_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) threads = std::min(threads, cap);
  }
  threads = std::min(threads, std::max(tasks, 1));
  return std::max(threads, 1);
}

TraverseResult traverse_serial(const TreeStore& tree, int work_rounds) {
  TraverseResult res;
  auto start = Clock::now();
  std::uint64_t sum = 0;
  std::size_t count = 0;
  visit_subtree(tree, tree.root(), [&](NodeHandle h, int) {
    sum ^= node_value(h, work_rounds);
    ++count;
  });
  res.wall_ms = ms_since(start);
  res.checksum = sum;
  res.nodes = count;
  res.per_worker_nodes = {count};
  res.per_worker_ms = {res.wall_ms};
  return res;
}

TraverseResult run_traversal(const TreeStore& tree, const std::vector<WorkerAssignment>& workers,
                             int work_rounds) {
  auto p = static_cast<int>(workers.size());
  TraverseResult res;
  res.per_worker_nodes.assign(static_cast<std::size_t>(p), 0);
  res.per_worker_ms.assign(static_cast<std::size_t>(p), 0.0);
  std::vector<std::uint64_t> sums(static_cast<std::size_t>(p), 0);

#pragma omp parallel for schedule(dynamic) num_threads(effective_threads(p))
  for (int w = 0; w < p; ++w) {
    auto start = Clock::now();
    std::uint64_t sum = 0;
    std::size_t count = 0;
    for (const AssignedSubtree& sub : workers[static_cast<std::size_t>(w)].subtrees) {
      visit_subtree(tree, sub.root, [&](NodeHandle h, int) {
        sum ^= node_value(h, work_rounds);
        ++count;
      });
    }
    sums[static_cast<std::size_t>(w)] = sum;
    res.per_worker_nodes[static_cast<std::size_t>(w)] = count;
    res.per_worker_ms[static_cast<std::size_t>(w)] = ms_since(start);
  }

  for (int w = 0; w < p; ++w) {
    res.checksum ^= sums[static_cast<std::size_t>(w)];
    res.nodes += res.per_worker_nodes[static_cast<std::size_t>(w)];
  }
  res.wall_ms = res.per_worker_ms.empty()
                    ? 0.0
                    : *std::max_element(res.per_worker_ms.begin(), res.per_worker_ms.end());
  return res;
}

}  // namespace treebalance
