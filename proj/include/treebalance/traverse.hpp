#pragma once

#include "treebalance/partition.hpp"
#include "treebalance/tree.hpp"

#include <cstdint>
#include <vector>

namespace treebalance {

// Per-node workload: `rounds` steps of a 64-bit LCG folded into the checksum.
// rounds == 0 still mixes the visit into the checksum, so traversal order
// differences stay detectable while the per-node cost is minimal.
std::uint64_t work_kernel(std::uint64_t x, int rounds);

struct TraverseResult {
  std::uint64_t checksum = 0;      // order-independent combination over nodes
  std::size_t nodes = 0;
  double wall_ms = 0.0;            // serial: total; parallel: max worker wall
  std::vector<std::size_t> per_worker_nodes;
  std::vector<double> per_worker_ms;
};

// Reference traversal of the whole tree on one thread.
TraverseResult traverse_serial(const TreeStore& tree, int work_rounds);

// One OpenMP thread per worker assignment; each worker walks its own subtree
// set. wall_ms is the maximum per-worker wall time, which is what a
// synchronized parallel phase would cost even when the host serializes the
// workers onto fewer cores.
TraverseResult run_traversal(const TreeStore& tree, const std::vector<WorkerAssignment>& workers,
                             int work_rounds);

// min(tasks, omp_get_max_threads(), TREEBALANCE_THREADS if set).
int effective_threads(int tasks);

}  // namespace treebalance
