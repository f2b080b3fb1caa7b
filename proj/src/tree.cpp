#include "treebalance/tree.hpp"

#include "treebalance/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace treebalance {

namespace {

// num / 2^depth as a double, valid for 0 <= num <= 2^depth at any depth.
double dyadic_to_double(const BigInt& num, int depth) {
  if (num == 0) return 0.0;
  int shift = depth > 63 ? depth - 63 : 0;
  BigInt top = num >> shift;
  return std::ldexp(top.convert_to<double>(), shift - depth);
}

}  // namespace

double IntervalLabel::lo() const { return dyadic_to_double(index, depth); }
double IntervalLabel::hi() const { return dyadic_to_double(index + 1, depth); }

bool IntervalLabel::contains(const IntervalLabel& inner) const {
  if (inner.depth < depth) return false;
  return (inner.index >> (inner.depth - depth)) == index;
}

int compare_dyadic(const BigInt& a_num, int a_depth, const BigInt& b_num, int b_depth) {
  int m = std::max(a_depth, b_depth);
  BigInt a = a_num << (m - a_depth);
  BigInt b = b_num << (m - b_depth);
  if (a < b) return -1;
  if (a > b) return 1;
  return 0;
}

std::string TreeSpec::label() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::fibonacci:
      os << "fib:" << order_or_size;
      break;
    case Kind::biased_random:
      os << "random:" << order_or_size << ":" << swap_fraction;
      break;
    case Kind::perfect:
      os << "perfect:" << order_or_size;
      break;
  }
  return os.str();
}

namespace {

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    std::size_t next = text.find(sep, pos);
    parts.emplace_back(text.substr(pos, next - pos));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return parts;
}

std::int64_t parse_int(const std::string& s, const char* what) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw std::invalid_argument(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const char* what) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty())
    throw std::invalid_argument(std::string("bad ") + what + ": '" + s + "'");
  return v;
}

}  // namespace

TreeSpec parse_tree_spec(std::string_view text) {
  auto parts = split(text, ':');
  TreeSpec spec;
  if (parts[0] == "fib" && parts.size() == 2) {
    spec.kind = TreeSpec::Kind::fibonacci;
    spec.order_or_size = parse_int(parts[1], "order");
  } else if (parts[0] == "random" && parts.size() == 3) {
    spec.kind = TreeSpec::Kind::biased_random;
    spec.order_or_size = parse_int(parts[1], "size");
    spec.swap_fraction = parse_double(parts[2], "swap fraction");
  } else if (parts[0] == "perfect" && parts.size() == 2) {
    spec.kind = TreeSpec::Kind::perfect;
    spec.order_or_size = parse_int(parts[1], "depth");
  } else {
    throw std::invalid_argument("bad tree spec: '" + std::string(text) +
                                "' (want fib:K, random:N:S or perfect:D)");
  }
  return spec;
}

TreeStore make_store(std::vector<Node>&& nodes, NodeHandle root) {
  std::size_t count = nodes.size();
  return TreeStore(std::make_shared<std::vector<Node>>(std::move(nodes)), root, count);
}

TreeStore TreeStore::clone() const {
  if (!arena_) return {};
  return TreeStore(std::make_shared<std::vector<Node>>(*arena_), root_, node_count_);
}

std::size_t fibonacci_node_count(int order) {
  if (order < 1) throw std::invalid_argument("fibonacci order must be >= 1");
  std::size_t a = 1, b = 1;  // N(1), N(2)
  if (order == 1 || order == 2) return 1;
  for (int k = 3; k <= order; ++k) {
    std::size_t c = b + a + 1;
    a = b;
    b = c;
  }
  return b;
}

TreeStore generate_fibonacci(int order) {
  if (order < 1 || order > 40) throw std::invalid_argument("fibonacci order out of range [1,40]");
  std::vector<Node> nodes;
  nodes.reserve(fibonacci_node_count(order));
  auto build = [&](auto&& self, int k, NodeHandle parent) -> NodeHandle {
    NodeHandle h(static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back({parent, {}, {}});
    if (k >= 3) {
      NodeHandle l = self(self, k - 1, h);
      NodeHandle r = self(self, k - 2, h);
      nodes[h.index()].left = l;
      nodes[h.index()].right = r;
    }
    return h;
  };
  NodeHandle root = build(build, order, NodeHandle());
  return make_store(std::move(nodes), root);
}

TreeStore generate_biased_random(std::size_t n, double swap_fraction, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("tree size must be positive");
  if (n > 0x7fffffffu) throw std::invalid_argument("tree size too large for the arena");
  if (swap_fraction < 0.0) throw std::invalid_argument("swap fraction must be >= 0");

  std::vector<std::uint32_t> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = static_cast<std::uint32_t>(i + 1);

  Rng rng(seed);
  auto swaps = static_cast<std::uint64_t>(swap_fraction * static_cast<double>(n));
  for (std::uint64_t s = 0; s < swaps; ++s) {
    std::size_t i = bounded(rng, n);
    std::size_t j = bounded(rng, n);
    std::swap(keys[i], keys[j]);
  }

  std::vector<Node> nodes;
  nodes.reserve(n);
  std::vector<std::uint32_t> key_of;  // construction-only, parallel to nodes
  key_of.reserve(n);

  nodes.push_back({{}, {}, {}});
  key_of.push_back(keys[0]);
  for (std::size_t i = 1; i < n; ++i) {
    std::uint32_t key = keys[i];
    std::uint32_t cur = 0;
    while (true) {
      Node& node = nodes[cur];
      NodeHandle& slot = key < key_of[cur] ? node.left : node.right;
      if (!slot.valid()) {
        slot = NodeHandle(static_cast<std::uint32_t>(nodes.size()));
        nodes.push_back({NodeHandle(cur), {}, {}});
        key_of.push_back(key);
        break;
      }
      cur = slot.index();
    }
  }
  return make_store(std::move(nodes), NodeHandle(0));
}

TreeStore generate_perfect(int depth) {
  if (depth < 0 || depth > 26) throw std::invalid_argument("perfect depth out of range [0,26]");
  std::size_t count = (std::size_t{1} << (depth + 1)) - 1;
  std::size_t internal = (std::size_t{1} << depth) - 1;  // nodes with children
  std::vector<Node> nodes(count);
  for (std::size_t i = 0; i < count; ++i) {
    nodes[i].parent = i == 0 ? NodeHandle() : NodeHandle(static_cast<std::uint32_t>((i - 1) / 2));
    if (i < internal) {
      nodes[i].left = NodeHandle(static_cast<std::uint32_t>(2 * i + 1));
      nodes[i].right = NodeHandle(static_cast<std::uint32_t>(2 * i + 2));
    }
  }
  return make_store(std::move(nodes), NodeHandle(0));
}

TreeStore generate(const TreeSpec& spec) {
  switch (spec.kind) {
    case TreeSpec::Kind::fibonacci:
      return generate_fibonacci(static_cast<int>(spec.order_or_size));
    case TreeSpec::Kind::biased_random:
      return generate_biased_random(static_cast<std::size_t>(spec.order_or_size),
                                    spec.swap_fraction, spec.seed);
    case TreeSpec::Kind::perfect:
      return generate_perfect(static_cast<int>(spec.order_or_size));
  }
  throw std::logic_error("unreachable");
}

IntervalLabel interval_of(const TreeStore& tree, NodeHandle node) {
  if (!tree.owns(node)) throw std::invalid_argument("interval_of: bad handle");
  // Collect the path bottom-up, then fold it into (index, depth) top-down.
  std::string path;
  for (NodeHandle h = node; tree.parent(h).valid(); h = tree.parent(h))
    path.push_back(tree.is_left_child(h) ? 'L' : 'R');
  IntervalLabel label;
  for (auto it = path.rbegin(); it != path.rend(); ++it)
    label = *it == 'L' ? label.left_half() : label.right_half();
  return label;
}

std::uint64_t snap_to_grid(double x, int granularity) {
  if (granularity < 1 || granularity > 62) throw std::invalid_argument("granularity out of range");
  auto cells = std::uint64_t{1} << granularity;
  double scaled = x * static_cast<double>(cells);
  auto k = static_cast<std::int64_t>(std::llround(scaled));
  if (k < 1) k = 1;
  if (k > static_cast<std::int64_t>(cells)) k = static_cast<std::int64_t>(cells);
  return static_cast<std::uint64_t>(k);
}

NodeHandle node_at_interval_end(const TreeStore& tree, double x, int granularity) {
  if (!(x > 0.0) || x > 1.0)
    throw std::invalid_argument("node_at_interval_end: x must be in (0,1]");
  if (tree.empty()) return {};
  std::uint64_t k = snap_to_grid(x, granularity);
  // Work in grid units: the node at depth d with dyadic index i covers
  // [i << (g-d), (i+1) << (g-d)]. The descent never needs depth > granularity
  // because the snapped boundary is a multiple of the cell width.
  NodeHandle cur = tree.root();
  std::uint64_t lo = 0;
  std::uint64_t hi = std::uint64_t{1} << granularity;
  while (hi != k) {
    std::uint64_t mid = lo + (hi - lo) / 2;
    NodeHandle next = k <= mid ? tree.left(cur) : tree.right(cur);
    if (!next.valid()) break;  // boundary falls in a gap: clamp to this node
    if (k <= mid)
      hi = mid;
    else
      lo = mid;
    cur = next;
  }
  return cur;
}

std::size_t TreeStore::node_count() const {
  if (node_count_ == kCountUnknown)
    node_count_ = root_.valid() ? subtree_count(*this, root_) : 0;
  return node_count_;
}

TreeStore clip_subtree(TreeStore& tree, NodeHandle node) {
  if (!tree.owns(node)) throw std::invalid_argument("clip_subtree: bad handle");
  if (node == tree.root()) throw std::invalid_argument("clip_subtree: cannot clip the root");
  NodeHandle p = tree.parent(node);
  if (!p.valid()) throw std::logic_error("clip_subtree: node is already detached");

  Node& parent_node = tree.at_mut(p);
  if (parent_node.left == node)
    parent_node.left = NodeHandle();
  else
    parent_node.right = NodeHandle();
  tree.at_mut(node).parent = NodeHandle();

  tree.node_count_ = TreeStore::kCountUnknown;
  return TreeStore(tree.arena_, node, TreeStore::kCountUnknown);
}

std::size_t subtree_count(const TreeStore& tree, NodeHandle node) {
  std::size_t count = 0;
  visit_subtree(tree, node, [&](NodeHandle, int) { ++count; });
  return count;
}

std::size_t exact_count(const TreeStore& tree) { return subtree_count(tree, tree.root()); }

double exact_mean_termination_depth(const TreeStore& tree) {
  double weighted = 0.0;
  double slots = 0.0;
  visit_subtree(tree, tree.root(), [&](NodeHandle h, int d) {
    int children = (tree.left(h).valid() ? 1 : 0) + (tree.right(h).valid() ? 1 : 0);
    int s = 2 - children;
    slots += s;
    weighted += static_cast<double>(d) * s;
  });
  return slots == 0.0 ? 0.0 : weighted / slots;
}

std::string path_of(const TreeStore& tree, NodeHandle node) {
  if (!tree.owns(node)) throw std::invalid_argument("path_of: bad handle");
  std::string path;
  for (NodeHandle h = node; tree.parent(h).valid(); h = tree.parent(h))
    path.push_back(tree.is_left_child(h) ? 'L' : 'R');
  std::reverse(path.begin(), path.end());
  return path;
}

NodeHandle node_at_path(const TreeStore& tree, std::string_view path) {
  NodeHandle cur = tree.root();
  for (char c : path) {
    if (!cur.valid()) return {};
    if (c == 'L')
      cur = tree.left(cur);
    else if (c == 'R')
      cur = tree.right(cur);
    else
      throw std::invalid_argument("path characters must be L or R");
  }
  return cur;
}

namespace {

void format_rec(const TreeStore& tree, NodeHandle h, std::size_t& next_name, std::string& out) {
  if (!h.valid()) {
    out.push_back('.');
    return;
  }
  out.push_back('(');
  out += std::to_string(next_name++);
  out.push_back(' ');
  format_rec(tree, tree.left(h), next_name, out);
  out.push_back(' ');
  format_rec(tree, tree.right(h), next_name, out);
  out.push_back(')');
}

struct Parser {
  std::string_view text;
  std::size_t pos = 0;
  std::vector<Node> nodes;

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("parse_tree: " + msg + " at offset " + std::to_string(pos));
  }

  NodeHandle parse_node(NodeHandle parent) {
    skip_ws();
    if (pos >= text.size()) fail("unexpected end of input");
    if (text[pos] == '.') {
      ++pos;
      return {};
    }
    if (text[pos] != '(') fail("expected '(' or '.'");
    ++pos;
    skip_ws();
    std::size_t name_start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos])) &&
           text[pos] != '(' && text[pos] != ')' && text[pos] != '.')
      ++pos;
    if (pos == name_start) fail("expected a node name");
    NodeHandle h(static_cast<std::uint32_t>(nodes.size()));
    nodes.push_back({parent, {}, {}});
    NodeHandle l = parse_node(h);
    NodeHandle r = parse_node(h);
    nodes[h.index()].left = l;
    nodes[h.index()].right = r;
    skip_ws();
    if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
    ++pos;
    return h;
  }
};

}  // namespace

std::string format_tree(const TreeStore& tree) {
  std::string out;
  std::size_t next_name = 0;
  format_rec(tree, tree.root(), next_name, out);
  return out;
}

TreeStore parse_tree(std::string_view text) {
  Parser parser{text, 0, {}};
  NodeHandle root = parser.parse_node(NodeHandle());
  parser.skip_ws();
  if (parser.pos != text.size()) parser.fail("trailing input");
  return make_store(std::move(parser.nodes), root);
}

}  // namespace treebalance
