#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace treebalance {

using BigInt = boost::multiprecision::cpp_int;

// Opaque identifier of one node within a TreeStore arena. An invalid handle
// doubles as the "absent" result of navigation queries.
class NodeHandle {
 public:
  static constexpr std::uint32_t kInvalid = 0xffffffffu;

  constexpr NodeHandle() = default;
  constexpr explicit NodeHandle(std::uint32_t index) : index_(index) {}

  constexpr bool valid() const { return index_ != kInvalid; }
  constexpr explicit operator bool() const { return valid(); }
  constexpr std::uint32_t index() const { return index_; }

  friend constexpr bool operator==(NodeHandle, NodeHandle) = default;

 private:
  std::uint32_t index_ = kInvalid;
};

struct Node {
  NodeHandle parent;
  NodeHandle left;
  NodeHandle right;
};

// Dyadic sub-interval of [0,1] owned by a node: [index/2^depth, (index+1)/2^depth].
// The root owns [0,1]; a left child takes the lower half of its parent's
// interval, a right child the upper half. Endpoints are kept exact (arbitrary
// depth); lo()/hi() give double approximations for distribution coordinates.
struct IntervalLabel {
  BigInt index;
  int depth = 0;

  IntervalLabel left_half() const { return {index << 1, depth + 1}; }
  IntervalLabel right_half() const { return {(index << 1) | 1, depth + 1}; }

  BigInt lo_numerator() const { return index; }      // over 2^depth
  BigInt hi_numerator() const { return index + 1; }  // over 2^depth

  double lo() const;
  double hi() const;

  // Exact containment: this interval's node is an ancestor-or-self of the
  // other interval's node.
  bool contains(const IntervalLabel& inner) const;

  friend bool operator==(const IntervalLabel&, const IntervalLabel&) = default;
};

// Exact comparison of two dyadic fractions a_num/2^a_depth and b_num/2^b_depth.
// Returns <0, 0, >0.
int compare_dyadic(const BigInt& a_num, int a_depth, const BigInt& b_num, int b_depth);

// Workload description accepted by the generators / benchmark harness.
struct TreeSpec {
  enum class Kind { fibonacci, biased_random, perfect };
  Kind kind = Kind::fibonacci;
  std::int64_t order_or_size = 26;
  double swap_fraction = 0.5;
  std::uint64_t seed = 42;

  std::string label() const;
};

TreeSpec parse_tree_spec(std::string_view text);  // "fib:26", "random:1000000:0.5", "perfect:15"

// Arena of binary tree nodes with parent/child links. Copies of a TreeStore
// are views sharing one arena; clip_subtree returns such a view for the
// detached part. clone() deep-copies the arena.
class TreeStore {
 public:
  TreeStore() = default;

  NodeHandle root() const { return root_; }
  // Recounted on first use after a clip, then cached; settle it before
  // handing the store to concurrent readers.
  std::size_t node_count() const;
  bool empty() const { return !root_.valid(); }

  NodeHandle parent(NodeHandle h) const { return at(h).parent; }
  NodeHandle left(NodeHandle h) const { return at(h).left; }
  NodeHandle right(NodeHandle h) const { return at(h).right; }

  bool is_left_child(NodeHandle h) const {
    NodeHandle p = parent(h);
    return p.valid() && at(p).left == h;
  }
  bool is_right_child(NodeHandle h) const {
    NodeHandle p = parent(h);
    return p.valid() && at(p).right == h;
  }
  // Left sibling of a right child; absent (invalid) for the root, for left
  // children, and when the parent's left slot is empty.
  NodeHandle left_sibling(NodeHandle h) const {
    NodeHandle p = parent(h);
    if (!p.valid() || at(p).right != h) return NodeHandle();
    return at(p).left;
  }
  NodeHandle right_sibling(NodeHandle h) const {
    NodeHandle p = parent(h);
    if (!p.valid() || at(p).left != h) return NodeHandle();
    return at(p).right;
  }

  std::size_t arena_size() const { return arena_ ? arena_->size() : 0; }
  bool owns(NodeHandle h) const { return h.valid() && arena_ && h.index() < arena_->size(); }

  TreeStore clone() const;

 private:
  const Node& at(NodeHandle h) const { return (*arena_)[h.index()]; }
  Node& at_mut(NodeHandle h) { return (*arena_)[h.index()]; }

  TreeStore(std::shared_ptr<std::vector<Node>> arena, NodeHandle root, std::size_t count)
      : arena_(std::move(arena)), root_(root), node_count_(count) {}

  static constexpr std::size_t kCountUnknown = static_cast<std::size_t>(-1);

  std::shared_ptr<std::vector<Node>> arena_;
  NodeHandle root_;
  mutable std::size_t node_count_ = 0;

  friend TreeStore make_store(std::vector<Node>&& nodes, NodeHandle root);
  friend TreeStore clip_subtree(TreeStore& tree, NodeHandle node);
};

// --- generators -------------------------------------------------------------

// Order 1 and 2 are single nodes; order k >= 3 has an order k-1 left subtree
// and an order k-2 right subtree. Node count N(k) = N(k-1) + N(k-2) + 1.
TreeStore generate_fibonacci(int order);
std::size_t fibonacci_node_count(int order);

// Insert the sequence 1..n, after floor(swap_fraction*n) random pair swaps,
// into an empty binary search tree with no rebalancing.
TreeStore generate_biased_random(std::size_t n, double swap_fraction, std::uint64_t seed);

// Full tree with all 2^(depth+1)-1 nodes.
TreeStore generate_perfect(int depth);

TreeStore generate(const TreeSpec& spec);

// --- interval addressing ----------------------------------------------------

IntervalLabel interval_of(const TreeStore& tree, NodeHandle node);

// Shallowest existing node whose interval ends at x, after snapping x to the
// k/2^granularity grid. If the descent runs into a missing child, the deepest
// existing node on the path is returned (its subtree is treated as lying left
// of the boundary).
NodeHandle node_at_interval_end(const TreeStore& tree, double x, int granularity);

// Snap x in (0,1] to the nearest grid index k in [1, 2^granularity].
std::uint64_t snap_to_grid(double x, int granularity);

// --- structure edits & oracles ----------------------------------------------

// Detaches node from its parent and returns the detached subtree as a view
// sharing this tree's arena. The original tree's node_count drops by the
// clipped count. The detach itself is pointer surgery; neither side is
// recounted until node_count() is next asked. node == root is
// invalid-argument; clipping an already detached node is invalid-state
// (std::logic_error).
TreeStore clip_subtree(TreeStore& tree, NodeHandle node);

std::size_t subtree_count(const TreeStore& tree, NodeHandle node);
std::size_t exact_count(const TreeStore& tree);

// Mean depth over all probe-termination slots: a childless node carries two
// slots at its depth, a one-child node carries one slot at its depth.
double exact_mean_termination_depth(const TreeStore& tree);

// Preorder visit of the subtree rooted at `node`; f(handle, depth).
template <class F>
void visit_subtree(const TreeStore& tree, NodeHandle node, F&& f) {
  if (!node.valid()) return;
  std::vector<std::pair<NodeHandle, int>> stack{{node, 0}};
  while (!stack.empty()) {
    auto [h, d] = stack.back();
    stack.pop_back();
    f(h, d);
    if (NodeHandle r = tree.right(h); r.valid()) stack.emplace_back(r, d + 1);
    if (NodeHandle l = tree.left(h); l.valid()) stack.emplace_back(l, d + 1);
  }
}

// --- paths and text form ----------------------------------------------------

// Root-to-node path as a string over {L, R}; empty for the root of the view's
// attached component.
std::string path_of(const TreeStore& tree, NodeHandle node);
NodeHandle node_at_path(const TreeStore& tree, std::string_view path);

// Text form for small trees:   tree := "." | "(" name tree tree ")"
// Names are preorder indices on output and arbitrary non-space tokens on
// input (they only aid readability; structure is what round-trips).
std::string format_tree(const TreeStore& tree);
TreeStore parse_tree(std::string_view text);

}  // namespace treebalance
