#include <doctest.h>

#include <algorithm>
#include <random>

#include "citematch/external_sort.hpp"
#include "citematch/mapfile.hpp"
#include "oracles.hpp"

using namespace citematch;

namespace {

std::vector<KVRecord> read_all(const MapFileReader& r) {
  std::vector<KVRecord> out;
  r.for_each([&](std::string_view k, std::string_view v) { out.push_back({std::string(k), std::string(v)}); });
  return out;
}

std::vector<KVRecord> stable_sorted(std::vector<KVRecord> v) {
  std::stable_sort(v.begin(), v.end(), [](const KVRecord& a, const KVRecord& b) { return a.key < b.key; });
  return v;
}

}  // namespace

TEST_CASE("reverse-sorted input comes out ascending") {
  oracle::TempDir dir("mf");
  std::vector<KVRecord> recs;
  for (int i = 999; i >= 0; --i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "%04d", i);
    recs.push_back({buf, std::to_string(i)});
  }
  seq_write(dir / "in", recs);
  const auto store = mapfile_build(dir / "in", dir / "out");
  CHECK(store.records == 1000);
  MapFileReader r(dir / "out");
  CHECK(r.size() == 1000);
  CHECK(read_all(r) == stable_sorted(recs));
}

TEST_CASE("already sorted input keeps its order") {
  oracle::TempDir dir("mf");
  const std::vector<KVRecord> recs = {{"a", "1"}, {"b", "2"}, {"c", "3"}};
  seq_write(dir / "in", recs);
  mapfile_build(dir / "in", dir / "out");
  CHECK(read_all(MapFileReader(dir / "out")) == recs);
}

TEST_CASE("duplicate keys keep input order under spilling") {
  oracle::TempDir dir("mf");
  std::mt19937_64 rng(1);
  std::vector<KVRecord> recs;
  for (int i = 0; i < 5000; ++i) recs.push_back({oracle::random_word(rng, 1, 2, "abc"), std::to_string(i)});
  seq_write(dir / "in", recs);
  MapFileOptions opt;
  opt.memory_budget = 2048;  // forces many spilled runs
  opt.interval = 16;
  opt.scratch = dir / "scratch";
  mapfile_build(dir / "in", dir / "out", opt);
  CHECK(read_all(MapFileReader(dir / "out")) == stable_sorted(recs));
}

TEST_CASE("sparse index samples every K-th record") {
  oracle::TempDir dir("mf");
  std::vector<KVRecord> recs;
  for (int i = 0; i < 100; ++i) recs.push_back({"k" + std::to_string(1000 + i), "v"});
  seq_write(dir / "in", recs);
  MapFileOptions opt;
  opt.interval = 10;
  const auto store = mapfile_build(dir / "in", dir / "out", opt);
  const auto data_offsets = seq_record_offsets(store.data_path());
  const auto index = seq_read(store.index_path());
  REQUIRE(index.size() == 10);
  for (std::size_t i = 0; i < index.size(); ++i) {
    CHECK(index[i].key == recs[i * 10].key);
    REQUIRE(index[i].value.size() == 8);
    CHECK(get_u64be(reinterpret_cast<const unsigned char*>(index[i].value.data())) == data_offsets[i * 10]);
  }
}

TEST_CASE("seek_scan equals a linear filter") {
  oracle::TempDir dir("mf");
  std::mt19937_64 rng(2);
  std::vector<KVRecord> recs;
  for (int i = 0; i < 3000; ++i) recs.push_back({oracle::random_word(rng, 0, 6, "abcd"), std::to_string(i)});
  seq_write(dir / "in", recs);
  MapFileOptions opt;
  opt.interval = 5;
  mapfile_build(dir / "in", dir / "out", opt);
  MapFileReader r(dir / "out");
  const auto sorted = stable_sorted(recs);
  for (int q = 0; q < 300; ++q) {
    const auto prefix = oracle::random_word(rng, 0, 4, "abcde");
    std::vector<KVRecord> want;
    for (const auto& rec : sorted)
      if (rec.key.compare(0, prefix.size(), prefix) == 0) want.push_back(rec);
    CHECK(r.seek_scan(prefix) == want);

    std::vector<KVRecord> from;
    for (const auto& rec : sorted)
      if (rec.key >= prefix && from.size() < 7) from.push_back(rec);
    std::vector<KVRecord> got;
    r.scan_from(prefix, [&](std::string_view k, std::string_view v) {
      got.push_back({std::string(k), std::string(v)});
      return got.size() < 7;
    });
    CHECK(got == from);
  }
  CHECK(r.seek_scan("zzz").empty());
  const auto first = r.seek_scan(sorted[1234].key);
  REQUIRE_FALSE(first.empty());
  CHECK(first.front().key == sorted[1234].key);
}

TEST_CASE("empty input gives an empty store") {
  oracle::TempDir dir("mf");
  seq_write(dir / "in", {});
  const auto store = mapfile_build(dir / "in", dir / "out");
  CHECK(store.records == 0);
  MapFileReader r(dir / "out");
  CHECK(r.size() == 0);
  CHECK(r.seek_scan("").empty());
}

TEST_CASE("external sorter merges spilled and in-memory runs stably") {
  oracle::TempDir dir("sort");
  std::mt19937_64 rng(3);
  ExternalSorter sorter(dir.path(), "t", 512);
  std::vector<KVRecord> recs;
  for (int i = 0; i < 2000; ++i) {
    recs.push_back({oracle::random_word(rng, 1, 3, "xyz"), std::to_string(i)});
    sorter.add(recs.back().key, recs.back().value);
  }
  CHECK(sorter.spilled_runs() > 1);
  std::vector<KVRecord> merged;
  merge_runs(sorter.finish(), [&](KVRecord&& r) { merged.push_back(std::move(r)); });
  CHECK(merged == stable_sorted(recs));
}
