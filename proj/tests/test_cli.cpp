#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <sys/wait.h>

#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr together
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(CITEMATCH_BIN) + " " + args + " 2>&1";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(cli("").code == 2);
  CHECK(cli("no-such-command").code == 2);
  CHECK(cli("ingest --docs /nonexistent/file --out /tmp/x.seq").code == 2);
  CHECK(cli("--help").code == 0);
}

TEST_CASE("ingest") {
  oracle::TempDir dir("cli");
  write_file(dir / "ok.jsonl",
             R"({"id":"a","authors":["Ann Lee"]})" "\n"
             R"({"id":"b","authors":["Bo Chen"]})" "\n"
             R"({"id":"c","authors":["Cy Diaz"]})" "\n");
  auto r = cli("ingest --docs " + q(dir / "ok.jsonl") + " --out " + q(dir / "ok.seq"));
  CHECK(r.code == 0);
  CHECK(r.out.find("3") != std::string::npos);

  write_file(dir / "bad.jsonl",
             R"({"id":"a","authors":["Ann Lee"]})" "\n"
             "{oops\n"
             R"({"id":"c","authors":["Cy Diaz"]})" "\n");
  r = cli("ingest --docs " + q(dir / "bad.jsonl") + " --out " + q(dir / "bad.seq"));
  CHECK(r.code == 3);
  CHECK(r.out.find("bad.jsonl:2:") != std::string::npos);
  CHECK(oracle::slurp(dir / "bad.seq").size() > 0);

  write_file(dir / "empty.jsonl", "");
  r = cli("ingest --docs " + q(dir / "empty.jsonl") + " --out " + q(dir / "empty.seq"));
  CHECK(r.code == 0);
  CHECK(r.out.find("0") != std::string::npos);

  r = cli("ingest --docs " + q(dir / "ok.jsonl") + " --out " + q(dir / "missing-dir" / "x.seq"));
  CHECK(r.code == 2);
}

TEST_CASE("build-index") {
  oracle::TempDir dir("cli");
  write_file(dir / "one.jsonl", R"({"id":"d1","authors":["cat"]})" "\n");
  REQUIRE(cli("ingest --docs " + q(dir / "one.jsonl") + " --out " + q(dir / "one.seq")).code == 0);
  auto r = cli("build-index --docs " + q(dir / "one.seq") + " --out " + q(dir / "idx"));
  CHECK(r.code == 0);
  CHECK(r.out.find("4") != std::string::npos);
  CHECK(r.out.find("Index building") != std::string::npos);

  REQUIRE(cli("generate --documents 80 --seed 3 --out-docs " + q(dir / "c.jsonl")).code == 0);
  REQUIRE(cli("ingest --docs " + q(dir / "c.jsonl") + " --out " + q(dir / "c.seq")).code == 0);
  REQUIRE(cli("build-index --workers 1 --docs " + q(dir / "c.seq") + " --out " + q(dir / "i1")).code == 0);
  const auto first = oracle::slurp(dir / "i1" / "data");
  REQUIRE(cli("build-index --workers 1 --docs " + q(dir / "c.seq") + " --out " + q(dir / "i1")).code == 0);
  CHECK(oracle::slurp(dir / "i1" / "data") == first);
  REQUIRE(cli("build-index --workers 4 --docs " + q(dir / "c.seq") + " --out " + q(dir / "i4")).code == 0);
  CHECK(oracle::slurp(dir / "i4" / "data") == first);
  CHECK(oracle::slurp(dir / "i4" / "index") == oracle::slurp(dir / "i1" / "index"));
}

TEST_CASE("training, matching and evaluation end to end") {
  oracle::TempDir dir("cli");
  const auto p = [&](const char* name) { return q(dir / name); };
  REQUIRE(cli("generate --documents 120 --seed 4 --out-docs " + p("docs.jsonl") + " --out-labeled " +
              p("labeled.jsonl") + " --out-gold " + p("gold.tsv") + " --out-citations " + p("cites.tsv"))
              .code == 0);
  REQUIRE(cli("ingest --docs " + p("docs.jsonl") + " --out " + p("docs.seq")).code == 0);
  REQUIRE(cli("build-index --docs " + p("docs.seq") + " --out " + p("index")).code == 0);
  REQUIRE(cli("train-parser --data " + p("labeled.jsonl") + " --out " + p("parser.txt")).code == 0);
  REQUIRE(cli("featurize --labeled " + p("labeled.jsonl") + " --parser-model " + p("parser.txt") +
              " --docs " + p("docs.jsonl") + " --out " + p("features.tsv"))
              .code == 0);
  REQUIRE(cli("train-matcher --data " + p("features.tsv") + " --out " + p("matcher.txt")).code == 0);

  const std::string match = "match --docs " + p("docs.seq") + " --index " + p("index") +
                            " --parser-model " + p("parser.txt") + " --match-model " + p("matcher.txt");
  auto r = cli(match + " --workers 1 --out " + p("m1.jsonl"));
  REQUIRE(r.code == 0);
  for (const char* phase : {"Citation extraction", "Heuristic matching", "Selecting the best match"})
    CHECK(r.out.find(phase) != std::string::npos);
  REQUIRE(cli(match + " --workers 4 --out " + p("m4.jsonl")).code == 0);
  CHECK(oracle::slurp(dir / "m1.jsonl") == oracle::slurp(dir / "m4.jsonl"));
  CHECK(oracle::slurp(dir / "m1.jsonl.seq") == oracle::slurp(dir / "m4.jsonl.seq"));
  REQUIRE(cli(match + " --workers 1 --out " + p("m1.jsonl")).code == 0);
  CHECK(oracle::slurp(dir / "m1.jsonl") == oracle::slurp(dir / "m4.jsonl"));

  r = cli(match + " --threshold 1.0 --out " + p("strict.jsonl"));
  CHECK(r.code == 0);
  CHECK(oracle::slurp(dir / "strict.jsonl").find("\"matchedDocId\":\"") == std::string::npos);

  r = cli("match --docs " + p("docs.seq") + " --index " + p("no-index") + " --parser-model " +
          p("parser.txt") + " --match-model " + p("matcher.txt") + " --out " + p("x.jsonl"));
  CHECK(r.code == 2);
  CHECK_FALSE(fs::exists(dir / "x.jsonl"));

  // A full-mode model is refused by the pipeline.
  REQUIRE(cli("featurize --mode Full --labeled " + p("labeled.jsonl") + " --parser-model " + p("parser.txt") +
              " --out " + p("pairs.tsv"))
              .code == 0);
  REQUIRE(cli("train-matcher --data " + p("pairs.tsv") + " --out " + p("full.txt")).code == 0);
  r = cli("match --docs " + p("docs.seq") + " --index " + p("index") + " --parser-model " + p("parser.txt") +
          " --match-model " + p("full.txt") + " --out " + p("y.jsonl"));
  CHECK(r.code == 2);

  // Citation pairs scored with the full model, clustered and evaluated.
  REQUIRE(cli("score --citations " + p("cites.tsv") + " --parser-model " + p("parser.txt") +
              " --match-model " + p("full.txt") + " --out " + p("scores.tsv"))
              .code == 0);
  REQUIRE(cli("cluster --scores " + p("scores.tsv") + " --out " + p("pred.tsv")).code == 0);
  r = cli("evaluate --gold " + p("gold.tsv") + " --pred " + p("pred.tsv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("pairwise F1") != std::string::npos);

  r = cli("evaluate --gold " + p("gold.tsv") + " --pred " + p("gold.tsv"));
  CHECK(r.code == 0);
  CHECK(r.out.find("100.00%") != std::string::npos);
  CHECK(r.out.find("%") != std::string::npos);
  std::size_t hundreds = 0;
  for (std::size_t pos = 0; (pos = r.out.find("100.00%", pos)) != std::string::npos; ++pos) ++hundreds;
  CHECK(hundreds == 4);

  REQUIRE(cli("cluster --threshold 1.01 --scores " + p("scores.tsv") + " --out " + p("single.tsv")).code == 0);
  std::ifstream in(dir / "single.tsv");
  std::set<std::string> clusters;
  std::size_t lines = 0;
  for (std::string line; std::getline(in, line); ++lines) clusters.insert(line.substr(line.find('\t') + 1));
  CHECK(lines > 0);
  CHECK(clusters.size() == lines);
}

TEST_CASE("config file values yield to flags") {
  oracle::TempDir dir("cli");
  write_file(dir / "docs.jsonl", R"({"id":"a","authors":["Ann"]})" "\n");
  write_file(dir / "cfg.ini", "[ingest]\ndocs=" + (dir / "docs.jsonl").string() + "\nout=" +
                                  (dir / "from-config.seq").string() + "\n");
  auto r = cli("--config " + q(dir / "cfg.ini") + " ingest");
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "from-config.seq"));
  r = cli("--config " + q(dir / "cfg.ini") + " ingest --out " + q(dir / "from-flag.seq"));
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "from-flag.seq"));
  CHECK(oracle::slurp(dir / "from-flag.seq") == oracle::slurp(dir / "from-config.seq"));
}
