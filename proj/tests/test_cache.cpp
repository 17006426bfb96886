#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include "xfree/cache.hpp"
#include "xfree/error.hpp"
#include "xfree/extremal.hpp"

using namespace xfree;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("xfree_cache_test_" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
};

RNumberRecord bounds(std::int64_t n, std::uint64_t lo, std::uint64_t hi) {
  RNumberRecord r;
  r.n = n;
  r.lower = lo;
  r.upper = hi;
  r.exact = lo == hi;
  r.provenance = Provenance::User;
  return r;
}

const Pattern ap3 = arithmetic_progression(3);

}  // namespace

TEST_CASE("append and look up") {
  TempDir tmp;
  RCache cache(tmp.str());
  CHECK_FALSE(cache.lookup(ap3, 9));
  auto rec = solve_rx_exact(ap3, 9);
  REQUIRE(rec.witness);
  CHECK(cache.append(ap3, rec));
  const auto got = cache.lookup(ap3, 9);
  REQUIRE(got);
  CHECK(got->exact);
  CHECK(got->lower == 5);
  CHECK(got->upper == 5);
  REQUIRE(got->witness);
  CHECK(got->witness->size() == 5);
  CHECK(got->provenance == Provenance::BranchAndBound);
  CHECK(fs::exists(cache.pattern_path(pattern_hash(ap3))));

  const auto rep = cache_roundtrip(tmp.str());
  CHECK(rep.ok());
  CHECK(rep.lines == 1);
  CHECK(cache_report_text(rep).ends_with("OK\n"));
}

TEST_CASE("duplicate records merge by interval intersection") {
  TempDir tmp;
  RCache cache(tmp.str());
  CHECK(cache.append(ap3, bounds(20, 3, 5)));
  CHECK(cache.append(ap3, bounds(20, 4, 4)));
  const auto got = cache.lookup(ap3, 20);
  REQUIRE(got);
  CHECK(got->lower == 4);
  CHECK(got->upper == 4);
  CHECK(got->exact);

  CHECK(cache.append(ap3, bounds(21, 2, 9)));
  CHECK(cache.append(ap3, bounds(21, 5, 12)));
  const auto loose = cache.lookup(ap3, 21);
  REQUIRE(loose);
  CHECK(loose->lower == 5);
  CHECK(loose->upper == 9);
  CHECK_FALSE(loose->exact);

  auto rep = cache_roundtrip(tmp.str(), true);
  CHECK(rep.merged_duplicates == 2);
  CHECK(rep.ok());
  rep = cache_roundtrip(tmp.str());
  CHECK(rep.lines == 2);
  CHECK(rep.merged_duplicates == 0);
}

TEST_CASE("inconsistent merges are demoted") {
  TempDir tmp;
  RCache cache(tmp.str());
  CHECK(cache.append(ap3, bounds(10, 6, 6)));
  CHECK(cache.append(ap3, bounds(10, 2, 5)));
  const auto rep = cache_roundtrip(tmp.str());
  CHECK_FALSE(rep.ok());
  REQUIRE(rep.demoted.size() == 1);
  REQUIRE(rep.records.size() == 1);
  CHECK(rep.records[0].lower == 0);
  CHECK(rep.records[0].upper == 10);
}

TEST_CASE("invalid witnesses are rejected on append and demoted on read") {
  TempDir tmp;
  RCache cache(tmp.str());
  auto bad = bounds(5, 5, 5);
  bad.witness = GridSet::full(5, 1);
  CHECK_FALSE(cache.append(ap3, bad));
  CHECK_FALSE(fs::exists(cache.index_path()));

  auto rec = solve_rx_exact(ap3, 8);
  CHECK(cache.append(ap3, rec));
  {
    std::ofstream w(cache.witness_path(pattern_hash(ap3), 8), std::ios::trunc);
    w << grid_set_text(GridSet::full(8, 1));
  }
  const auto rep = cache_roundtrip(tmp.str());
  REQUIRE(rep.demoted.size() == 1);
  CHECK(rep.demoted[0].find("copy") != std::string::npos);
  CHECK(rep.records[0].lower == 0);
  CHECK(rep.records[0].upper == 8);
  CHECK_FALSE(rep.records[0].exact);
  CHECK(cache_report_text(rep).ends_with("ISSUES\n"));
}

TEST_CASE("a smaller witness does not replace a larger one") {
  TempDir tmp;
  RCache cache(tmp.str());
  const auto best = solve_rx_exact(ap3, 9);
  CHECK(cache.append(ap3, best));
  auto small = bounds(9, 2, 9);
  small.witness = GridSet::from_points(9, 1, std::vector<Point>{{1}, {2}});
  CHECK(cache.append(ap3, small));
  const auto got = cache.lookup(ap3, 9);
  REQUIRE(got);
  REQUIRE(got->witness);
  CHECK(got->witness->size() == 5);
  CHECK(got->exact);
}

TEST_CASE("corrupt lines are reported with their line number") {
  TempDir tmp;
  RCache cache(tmp.str());
  CHECK(cache.append(ap3, bounds(7, 4, 4)));
  {
    std::ofstream idx(cache.index_path(), std::ios::app);
    idx << "this is not a record\n";
  }
  CHECK(cache.append(ap3, bounds(6, 4, 4)));
  const auto rep = cache_roundtrip(tmp.str());
  REQUIRE(rep.corrupt.size() == 1);
  CHECK(rep.corrupt[0].rfind("line 2:", 0) == 0);
  CHECK(rep.records.size() == 2);
}

TEST_CASE("missing pattern file demotes the records") {
  TempDir tmp;
  RCache cache(tmp.str());
  CHECK(cache.append(ap3, bounds(7, 4, 4)));
  fs::remove(cache.pattern_path(pattern_hash(ap3)));
  const auto rep = cache_roundtrip(tmp.str());
  REQUIRE(rep.demoted.size() == 1);
  CHECK_FALSE(rep.records[0].exact);
}

TEST_CASE("records from other patterns are refused") {
  TempDir tmp;
  RCache cache(tmp.str());
  auto r = bounds(4, 3, 3);
  r.pattern_id = pattern_hash(corner(2));
  CHECK_THROWS_AS(cache.append(ap3, r), PreconditionError);
}

TEST_CASE("concurrent appends keep every line") {
  TempDir tmp;
  std::vector<std::thread> threads;
  for (int t = 0; t < 8; ++t)
    threads.emplace_back([&, t] {
      RCache cache(tmp.str());
      for (int i = 0; i < 25; ++i) cache.append(ap3, bounds(100 + t * 25 + i, 1, 100));
    });
  for (auto& th : threads) th.join();
  const auto rep = cache_roundtrip(tmp.str());
  CHECK(rep.ok());
  CHECK(rep.lines == 200);
  CHECK(rep.records.size() == 200);
}
