#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "treebalance/bench.hpp"
#include "treebalance/traverse.hpp"

#include <json.hpp>

#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

using namespace treebalance;

namespace {

BenchConfig small_config() {
  BenchConfig cfg;
  cfg.tree = parse_tree_spec("fib:16");
  cfg.tree.seed = 7;
  cfg.balance.workers = 4;
  cfg.balance.seed = 7;
  cfg.reps = 3;
  return cfg;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("suggested mode reports serial, trivial and suggested rows") {
  auto rows = run_benchmark(small_config());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].mode == "serial");
  CHECK(rows[1].mode == "trivial");
  CHECK(rows[2].mode == "suggested");
  for (const MetricsReport& r : rows) {
    CHECK(r.nodes == 1973);
    CHECK(r.tree == "fib:16");
    CHECK(r.p == 4);
  }
}

TEST_CASE("every mode visits the same nodes: checksums agree") {
  auto rows = run_benchmark(small_config());
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].checksum != 0);
  CHECK(rows[0].checksum == rows[1].checksum);
  CHECK(rows[0].checksum == rows[2].checksum);
}

TEST_CASE("the serial row is its own baseline") {
  auto rows = run_benchmark(small_config());
  const MetricsReport& serial = rows[0];
  CHECK(serial.speedup == 1.0);
  CHECK(serial.count_speedup == 1.0);
  CHECK(serial.t_probe_ms == 0.0);
  CHECK(serial.t_partition_ms == 0.0);
  CHECK(serial.reprobes == 0);
}

TEST_CASE("derived ratios recompute from the row's own fields") {
  auto rows = run_benchmark(small_config());
  const MetricsReport& trivial = rows[1];
  const MetricsReport& sug = rows[2];

  double t_total = sug.t_probe_ms + sug.t_partition_ms + sug.t_traverse_ms;
  CHECK(sug.speedup == doctest::Approx(sug.t_serial_ms / t_total));
  CHECK(sug.probe_overhead_pct == doctest::Approx(100.0 * sug.t_probe_ms / t_total));
  CHECK(trivial.ratio_vs_trivial == 1.0);
  CHECK(sug.ratio_vs_trivial == doctest::Approx(sug.speedup / trivial.speedup));
  CHECK(sug.count_speedup <= 4.0 + 1e-9);
  CHECK(sug.count_speedup > 0.0);
  CHECK(sug.visited_pct > 0.0);
  CHECK(sug.estimator_error_pct >= 0.0);
}

TEST_CASE("serial and trivial configurations emit fewer rows") {
  BenchConfig cfg = small_config();
  cfg.mode = RunMode::serial;
  CHECK(run_benchmark(cfg).size() == 1);
  cfg.mode = RunMode::trivial;
  auto rows = run_benchmark(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].mode == "trivial");
  CHECK(rows[0].checksum == rows[1].checksum);
}

TEST_CASE("one worker degenerates to the serial traversal") {
  BenchConfig cfg = small_config();
  cfg.balance.workers = 1;
  auto rows = run_benchmark(cfg);
  const MetricsReport& sug = rows[2];
  CHECK(sug.count_speedup == 1.0);
  CHECK(sug.checksum == rows[0].checksum);
  CHECK(sug.reprobes == 0);
}

TEST_CASE("csv output pins the header and one line per row") {
  auto rows = run_benchmark(small_config());
  std::ostringstream os;
  emit_csv(os, rows);
  std::istringstream is(os.str());
  std::string line;
  REQUIRE(std::getline(is, line));
  CHECK(line == kCsvHeader);
  int data_lines = 0;
  while (std::getline(is, line)) {
    CHECK(split_fields(line).size() == split_fields(kCsvHeader).size());
    ++data_lines;
  }
  CHECK(data_lines == 3);

  std::ostringstream empty;
  emit_csv(empty, {});
  CHECK(empty.str() == std::string(kCsvHeader) + "\n");
}

TEST_CASE("json output mirrors the csv fields in order and parses back") {
  auto rows = run_benchmark(small_config());
  std::ostringstream os;
  emit_json(os, rows);
  auto doc = nlohmann::ordered_json::parse(os.str());
  CHECK(doc.at("rng").get<std::string>() == kRngAlgorithm);
  REQUIRE(doc.at("rows").size() == rows.size());

  auto header = split_fields(kCsvHeader);
  std::size_t i = 0;
  for (auto it = doc["rows"][0].begin(); it != doc["rows"][0].end(); ++it, ++i) {
    REQUIRE(i < header.size());
    CHECK(it.key() == header[i]);
  }
  CHECK(i == header.size());

  CHECK(doc["rows"][2]["speedup"].get<double>() == rows[2].speedup);
  CHECK(doc["rows"][2]["t_probe_ms"].get<double>() == rows[2].t_probe_ms);
  CHECK(doc["rows"][0]["mode"].get<std::string>() == "serial");

  std::ostringstream again;
  emit_json(again, rows);
  CHECK(again.str() == os.str());
}

TEST_CASE("sweeps emit one row per value on the swept axis") {
  BenchConfig cfg = small_config();
  cfg.reps = 1;

  SUBCASE("psc") {
    auto rows = run_sweep(cfg, {"psc", {0.4, 0.1}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].mode == "suggested");
    CHECK(rows[0].psc == 0.4);
    CHECK(rows[1].psc == 0.1);
  }
  SUBCASE("p") {
    auto rows = run_sweep(cfg, {"p", {2, 4}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].p == 2);
    CHECK(rows[1].p == 4);
  }
  SUBCASE("asc") {
    auto rows = run_sweep(cfg, {"asc", {5, 20}});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].asc == 5.0);
  }
  SUBCASE("bad axis") {
    CHECK_THROWS_AS(run_sweep(cfg, {"granularity", {1}}), std::invalid_argument);
    CHECK_THROWS_AS(run_sweep(cfg, {"psc", {}}), std::invalid_argument);
  }
}

TEST_CASE("the visited sweep reports estimator cost against accuracy") {
  BenchConfig cfg = small_config();
  auto rows = run_sweep(cfg, {"visited", {0.4, 0.05}});
  REQUIRE(rows.size() == 2);
  for (const MetricsReport& r : rows) {
    CHECK(r.mode == "estimate");
    CHECK(r.visited_pct > 0.0);
    CHECK(r.estimator_error_pct >= 0.0);
    CHECK(r.t_traverse_ms == 0.0);
  }
  // a tighter stop criterion can only probe more
  CHECK(rows[1].visited_pct >= rows[0].visited_pct);
}

TEST_CASE("traversal worker pool honors the thread cap") {
  setenv("TREEBALANCE_THREADS", "1", 1);
  CHECK(effective_threads(8) == 1);
  unsetenv("TREEBALANCE_THREADS");
  CHECK(effective_threads(0) == 1);
  CHECK(effective_threads(1) == 1);
  CHECK(effective_threads(1 << 20) >= 1);
}

TEST_CASE("the per-node work kernel is deterministic and round-sensitive") {
  CHECK(work_kernel(12345, 8) == work_kernel(12345, 8));
  CHECK(work_kernel(12345, 8) != work_kernel(12346, 8));
  CHECK(work_kernel(12345, 8) != work_kernel(12345, 9));
}

TEST_CASE("benchmark rows are reproducible for fixed seeds") {
  BenchConfig cfg = small_config();
  cfg.reps = 1;
  auto a = run_benchmark(cfg);
  auto b = run_benchmark(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].checksum == b[i].checksum);
    CHECK(a[i].estimator_error_pct == b[i].estimator_error_pct);
    CHECK(a[i].reprobes == b[i].reprobes);
  }
}
