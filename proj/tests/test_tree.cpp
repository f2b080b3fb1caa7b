#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treebalance/tree.hpp"

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

using namespace treebalance;

namespace {

int depth_of(const TreeStore& t, NodeHandle h) {
  int d = 0;
  for (NodeHandle p = t.parent(h); p.valid(); p = t.parent(p)) ++d;
  return d;
}

}  // namespace

TEST_CASE("fibonacci node counts follow the recurrence") {
  CHECK(generate_fibonacci(1).node_count() == 1);
  CHECK(generate_fibonacci(2).node_count() == 1);
  CHECK(generate_fibonacci(6).node_count() == 15);
  CHECK(fibonacci_node_count(26) == 242785);
  CHECK(generate_fibonacci(26).node_count() == 242785);
  // 2*Fib(31) - 1 with Fib(31) = 1346269
  CHECK(fibonacci_node_count(31) == 2692537);
  CHECK_THROWS_AS(generate_fibonacci(0), std::invalid_argument);
}

TEST_CASE("fibonacci structure: left subtree is one order deeper") {
  TreeStore t = generate_fibonacci(7);
  NodeHandle l = t.left(t.root());
  NodeHandle r = t.right(t.root());
  CHECK(subtree_count(t, l) == fibonacci_node_count(6));
  CHECK(subtree_count(t, r) == fibonacci_node_count(5));
}

TEST_CASE("biased random tree has exactly n nodes and is a search tree shape") {
  TreeStore t = generate_biased_random(1000000, 0.5, 42);
  CHECK(t.node_count() == 1000000);
  CHECK(exact_count(t) == 1000000);
}

TEST_CASE("zero swaps degenerate to the right spine") {
  TreeStore t = generate_biased_random(100, 0.0, 7);
  NodeHandle h = t.root();
  int depth = 0;
  while (t.right(h).valid()) {
    CHECK(!t.left(h).valid());
    h = t.right(h);
    ++depth;
  }
  CHECK(depth == 99);
}

TEST_CASE("same generator inputs give byte-identical trees") {
  TreeStore a = generate_biased_random(200, 0.5, 11);
  TreeStore b = generate_biased_random(200, 0.5, 11);
  TreeStore c = generate_biased_random(200, 0.5, 12);
  CHECK(format_tree(a) == format_tree(b));
  CHECK(format_tree(a) != format_tree(c));
}

TEST_CASE("interval labels halve along the path") {
  TreeStore t = generate_perfect(3);
  IntervalLabel root = interval_of(t, t.root());
  CHECK(root.lo() == 0.0);
  CHECK(root.hi() == 1.0);

  NodeHandle l = t.left(t.root());
  IntervalLabel li = interval_of(t, l);
  CHECK(li.lo() == 0.0);
  CHECK(li.hi() == 0.5);

  NodeHandle lrl = t.left(t.right(l));
  IntervalLabel lab = interval_of(t, lrl);
  CHECK(lab.depth == 3);
  CHECK(lab.index == 2);  // [2/8, 3/8]
  CHECK(lab.lo() == 0.25);
  CHECK(lab.hi() == 0.375);
}

TEST_CASE("sibling intervals tile the parent exactly") {
  TreeStore t = generate_biased_random(5000, 0.6, 3);
  visit_subtree(t, t.root(), [&](NodeHandle h, int) {
    IntervalLabel me = interval_of(t, h);
    NodeHandle l = t.left(h);
    NodeHandle r = t.right(h);
    if (l.valid()) {
      IntervalLabel li = interval_of(t, l);
      CHECK(me.contains(li));
      CHECK(li.lo_numerator() * 2 == me.lo_numerator() * (BigInt(1) << (li.depth - me.depth + 1)));
    }
    if (l.valid() && r.valid()) {
      IntervalLabel li = interval_of(t, l);
      IntervalLabel ri = interval_of(t, r);
      // left's upper edge is right's lower edge
      CHECK(compare_dyadic(li.hi_numerator(), li.depth, ri.lo_numerator(), ri.depth) == 0);
    }
  });
}

TEST_CASE("interval end lookup descends to the labelled node") {
  TreeStore t = generate_perfect(3);
  CHECK(node_at_interval_end(t, 1.0, 16) == t.root());
  CHECK(node_at_interval_end(t, 0.5, 16) == t.left(t.root()));
  NodeHandle lrl = t.left(t.right(t.left(t.root())));
  CHECK(node_at_interval_end(t, 0.375, 16) == lrl);
}

TEST_CASE("interval end lookup clamps at a missing child") {
  // right spine: every left descent dead-ends immediately
  TreeStore t = generate_biased_random(4, 0.0, 0);
  CHECK(node_at_interval_end(t, 0.25, 16) == t.root());
  NodeHandle r = t.right(t.root());
  CHECK(node_at_interval_end(t, 0.75, 16) == r);
}

TEST_CASE("interval end lookup rejects x outside (0,1]") {
  TreeStore t = generate_perfect(2);
  CHECK_THROWS_AS(node_at_interval_end(t, 0.0, 16), std::invalid_argument);
  CHECK_THROWS_AS(node_at_interval_end(t, -0.5, 16), std::invalid_argument);
  CHECK_THROWS_AS(node_at_interval_end(t, 1.5, 16), std::invalid_argument);
}

TEST_CASE("grid snapping rounds to the nearest cell edge and never to zero") {
  CHECK(snap_to_grid(0.3, 2) == 1);   // nearest of {1/4, 2/4}
  CHECK(snap_to_grid(0.7, 2) == 3);
  CHECK(snap_to_grid(1.0, 2) == 4);
  CHECK(snap_to_grid(1e-9, 16) == 1);
}

TEST_CASE("clipping splits counts and detaches links") {
  TreeStore t = generate_perfect(2);
  NodeHandle l = t.left(t.root());
  TreeStore view = clip_subtree(t, l);
  CHECK(view.node_count() == 3);
  CHECK(t.node_count() == 4);
  CHECK(!t.left(t.root()).valid());
  CHECK(!view.parent(view.root()).valid());
  CHECK(exact_count(t) == 4);

  SUBCASE("clipping the same handle again is an invalid state") {
    CHECK_THROWS_AS(clip_subtree(t, l), std::logic_error);
  }
  SUBCASE("the root cannot be clipped") {
    CHECK_THROWS_AS(clip_subtree(t, t.root()), std::invalid_argument);
  }
}

TEST_CASE("clipping a leaf yields a single-node view") {
  TreeStore t = generate_perfect(2);
  NodeHandle leaf = t.left(t.left(t.root()));
  TreeStore view = clip_subtree(t, leaf);
  CHECK(view.node_count() == 1);
  CHECK(t.node_count() == 6);
}

TEST_CASE("clip conserves node counts across random trees") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    TreeStore t = generate_biased_random(2000 + seed * 311, 0.5, seed);
    std::size_t before = t.node_count();
    // walk to some interior node
    NodeHandle h = t.root();
    for (int i = 0; i < 8; ++i) {
      NodeHandle next = (i % 2 == 0) ? t.right(h) : t.left(h);
      if (!next.valid()) next = t.right(h).valid() ? t.right(h) : t.left(h);
      if (!next.valid()) break;
      h = next;
    }
    if (h == t.root()) continue;
    TreeStore view = clip_subtree(t, h);
    CHECK(t.node_count() + view.node_count() == before);
    CHECK(exact_count(t) == t.node_count());
    CHECK(subtree_count(view, view.root()) == view.node_count());
  }
}

TEST_CASE("exact termination-depth oracle on hand-checked shapes") {
  TreeStore single = generate_perfect(0);
  CHECK(exact_count(single) == 1);
  CHECK(exact_mean_termination_depth(single) == doctest::Approx(0.0));

  TreeStore full = generate_perfect(2);
  CHECK(exact_count(full) == 7);
  CHECK(exact_mean_termination_depth(full) == doctest::Approx(2.0));

  // right spine of 3: slots at depths 0,1,2,2 -> mean 1.25
  TreeStore spine = generate_biased_random(3, 0.0, 0);
  CHECK(exact_mean_termination_depth(spine) == doctest::Approx(1.25));
}

TEST_CASE("paths round-trip through node handles") {
  TreeStore t = generate_fibonacci(8);
  std::vector<NodeHandle> nodes;
  visit_subtree(t, t.root(), [&](NodeHandle h, int) { nodes.push_back(h); });
  for (NodeHandle h : nodes) {
    std::string path = path_of(t, h);
    CHECK(node_at_path(t, path) == h);
    CHECK(static_cast<int>(path.size()) == depth_of(t, h));
  }
  CHECK(!node_at_path(t, "RRRRRRRRRRRR").valid());
}

TEST_CASE("text form round-trips structure") {
  TreeStore t = generate_fibonacci(5);
  std::string text = format_tree(t);
  TreeStore back = parse_tree(text);
  CHECK(back.node_count() == t.node_count());
  CHECK(format_tree(back) == text);

  TreeStore tiny = parse_tree("(a(b..)(c.(d..)))");
  CHECK(tiny.node_count() == 4);
  CHECK(tiny.left(tiny.root()).valid());
  CHECK(!tiny.left(tiny.right(tiny.root())).valid());
  CHECK_THROWS_AS(parse_tree("(a(b..)"), std::invalid_argument);
}

TEST_CASE("tree spec strings parse and label consistently") {
  TreeSpec fib = parse_tree_spec("fib:20");
  CHECK(fib.kind == TreeSpec::Kind::fibonacci);
  CHECK(fib.order_or_size == 20);
  CHECK(fib.label() == "fib:20");

  TreeSpec rnd = parse_tree_spec("random:1000:0.25");
  CHECK(rnd.kind == TreeSpec::Kind::biased_random);
  CHECK(rnd.order_or_size == 1000);
  CHECK(rnd.swap_fraction == doctest::Approx(0.25));

  TreeSpec perf = parse_tree_spec("perfect:10");
  CHECK(perf.kind == TreeSpec::Kind::perfect);
  CHECK(generate(perf).node_count() == 2047);

  CHECK_THROWS_AS(parse_tree_spec("cedar:3"), std::invalid_argument);
  CHECK_THROWS_AS(parse_tree_spec("fib:x"), std::invalid_argument);
}
