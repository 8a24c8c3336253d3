#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "protaudit/cli.hpp"
#include "protaudit/csv.hpp"
#include "protaudit/error.hpp"
#include "protaudit/pipeline.hpp"
#include "protaudit/report.hpp"
#include "test_support.hpp"

using namespace protaudit;
namespace ts = testsupport;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = RunCli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string FixtureConfig() { return (ts::SourceDir() / "data" / "fixture" / "audit.toml").string(); }

// A writable copy of the fixture inputs.
fs::path CopyFixture(const ts::TempDir& dir) {
  const fs::path dst = dir.path() / "inputs";
  fs::copy(ts::SourceDir() / "data" / "fixture", dst, fs::copy_options::recursive);
  return dst;
}

nlohmann::json Manifest(const fs::path& ws) { return nlohmann::json::parse(ts::Slurp(ws / "manifest.json")); }

std::vector<double> NumbersIn(const std::string& text, const std::regex& re) {
  std::vector<double> out;
  for (std::sregex_iterator it(text.begin(), text.end(), re), end; it != end; ++it) out.push_back(std::stod((*it)[1]));
  return out;
}

}  // namespace

TEST_CASE("stages refuse to run out of order") {
  ts::TempDir dir("cli");
  const std::string ws = (dir.path() / "ws").string();
  const CliRun r = Cli({"--config", FixtureConfig(), "--out", ws, "score"});
  CHECK(r.code == 1);
  CHECK(r.err.find("run `audit infer` first") != std::string::npos);
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws, "annotate"}).err.find("run `audit ingest` first") !=
        std::string::npos);

  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws, "ingest"}).code == 0);
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws, "annotate"}).code == 0);
  const CliRun early = Cli({"--config", FixtureConfig(), "--out", ws, "score"});
  CHECK(early.code == 1);
  CHECK(early.err.find("run `audit infer` first") != std::string::npos);

  // rerunning an upstream stage invalidates the downstream ones
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws, "infer"}).code == 0);
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws, "annotate"}).code == 0);
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws, "score"}).err.find("run `audit infer` first") !=
        std::string::npos);

  // a deleted artifact counts as missing
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws, "infer"}).code == 0);
  fs::remove(fs::path(ws) / "inferences.jsonl");
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws, "score"}).code == 1);
}

TEST_CASE("a second process cannot share the workspace") {
  ts::TempDir dir("cli");
  const fs::path ws = dir.path() / "ws";
  {
    Workspace held(ws);
    const CliRun r = Cli({"--config", FixtureConfig(), "--out", ws.string(), "ingest"});
    CHECK(r.code == 1);
    CHECK(r.err.find("lock") != std::string::npos);
    CHECK_THROWS_AS(Workspace{ws}, ValidationError);
  }
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws.string(), "ingest"}).code == 0);
}

TEST_CASE("configuration keys, overrides and errors") {
  ts::TempDir dir("cli");
  const Config base = LoadConfig(FixtureConfig(), {});
  CHECK(base.seed == 13);
  CHECK(base.beam_size == 5);
  CHECK(base.threads == 2);
  CHECK(base.power_weak.size() == 3);
  CHECK(base.corpus_path == ts::SourceDir() / "data" / "fixture" / "corpus.jsonl");

  const Config over = LoadConfig(FixtureConfig(), {{"inference.beam_size", "3"}, {"run.seed", "99"},
                                                   {"scoring.pooling", "token"}});
  CHECK(over.beam_size == 3);
  CHECK(over.seed == 99);
  CHECK(over.pooling == "token");

  CHECK_THROWS_AS(LoadConfig(FixtureConfig(), {{"inference.beam", "3"}}), ValidationError);
  CHECK_THROWS_AS(LoadConfig(FixtureConfig(), {{"inference.beam_size", "three"}}), ValidationError);
  CHECK_THROWS_AS(LoadConfig(FixtureConfig(), {{"scoring.pooling", "sentence"}}), ValidationError);

  const fs::path bad = dir.path() / "bad.toml";
  std::ofstream(bad) << "[run]\nsede = 1\n";
  CHECK_THROWS_AS(LoadConfig(bad, {}), ValidationError);
  const CliRun r = Cli({"--config", bad.string(), "--out", (dir.path() / "ws").string(), "ingest"});
  CHECK(r.code == 1);
  CHECK(r.err.find("sede") != std::string::npos);

  // digest follows the effective settings, not the file location
  CHECK(base.Canonical() == LoadConfig(FixtureConfig(), {{"inference.threads", "2"}}).Canonical());
  CHECK(base.Canonical() != over.Canonical());
}

TEST_CASE("command-line flags override the file") {
  ts::TempDir dir("cli");
  const fs::path ws = dir.path() / "ws";
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws.string(), "--seed", "7", "ingest"}).code == 0);
  CHECK(Manifest(ws)["seed"] == 7);
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws.string(), "--backend", "nope", "ingest"}).code == 1);
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws.string(), "--corpus", "/missing.jsonl", "ingest"}).code == 1);
  CHECK(Cli({"--config", FixtureConfig(), "--out", ws.string(), "bogus"}).code == 1);
}

TEST_CASE("the workspace defaults to AUDIT_WORKSPACE") {
  ts::TempDir dir("cli");
  const fs::path ws = dir.path() / "from-env";
  ::setenv("AUDIT_WORKSPACE", ws.string().c_str(), 1);
  const CliRun r = Cli({"--config", FixtureConfig(), "ingest"});
  ::unsetenv("AUDIT_WORKSPACE");
  CHECK(r.code == 0);
  CHECK(fs::exists(ws / "corpus.jsonl"));
  CHECK(Cli({"--config", FixtureConfig(), "ingest"}).code == 1);
}

TEST_CASE("markdown report renders the json numbers") {
  ts::TempDir dir("cli");
  const fs::path ws = dir.path() / "ws";
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws.string(), "run-all"}).code == 0);
  const CliRun md = Cli({"--config", FixtureConfig(), "--out", ws.string(), "--format", "md", "report"});
  REQUIRE(md.code == 0);
  CHECK(md.out == ts::Slurp(ws / "report.md"));
  const auto report = nlohmann::json::parse(ts::Slurp(ws / "report.json"));
  auto contains = [&](const nlohmann::json& v) {
    if (v.is_null()) return true;
    return md.out.find(FormatNumber(v.get<double>())) != std::string::npos;
  };
  for (const auto& section : {"portrayal", "affect"}) {
    for (const auto& row : report[section]) {
      CHECK(contains(row["female_median"]));
      CHECK(contains(row["male_median"]));
    }
  }
  for (const auto& c : report["regression"]["categories"]) {
    CHECK(contains(c["coefficient"]));
    CHECK(contains(c["p_value"]));
    CHECK(md.out.find("| " + c["category"].get<std::string>() + " |") != std::string::npos);
  }
  for (const auto& p : report["probes"]) CHECK(contains(p["accuracy"]));

  const CliRun js = Cli({"--config", FixtureConfig(), "--out", ws.string(), "report"});
  CHECK(nlohmann::json::parse(js.out) == report);
}

TEST_CASE("figure csv twins match the plotted values") {
  ts::TempDir dir("cli");
  const fs::path ws = dir.path() / "ws";
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", ws.string(), "run-all"}).code == 0);
  const std::regex title(R"(<title>\S+ (-?[0-9.e+-]+)</title>)");
  const std::regex last_field(R"(,(-?[0-9.e+-]+)\n)");
  for (const char* stem : {"portrayal", "affect"}) {
    const auto svg = NumbersIn(ts::Slurp(ws / "figures" / (std::string(stem) + ".svg")), title);
    const auto table = NumbersIn(ts::Slurp(ws / "figures" / (std::string(stem) + ".csv")), last_field);
    CHECK(svg.size() > 0);
    CHECK(svg == table);
  }
  const auto bubbles = NumbersIn(ts::Slurp(ws / "figures" / "regression.svg"), title);
  const auto rows = csv::Parse(ts::Slurp(ws / "figures" / "regression.csv"), "regression.csv");
  REQUIRE(bubbles.size() + 1 == rows.size());
  for (std::size_t i = 0; i < bubbles.size(); ++i) CHECK(bubbles[i] == std::stod(rows[i + 1].fields[1]));
}

TEST_CASE("figures for degenerate reports") {
  ts::TempDir dir("fig");
  Json report = Json::parse(ts::Slurp(ts::SourceDir() / "tests" / "golden" / "report.json"));

  // one significant category carries one mark
  Json one = report;
  Json cat = one["regression"]["categories"][0];
  cat["p_value"] = 0.004;
  cat["mark"] = "†";
  one["regression"]["categories"] = Json::array({cat});
  EmitFigures(one, dir.path() / "one");
  const std::string svg = ts::Slurp(dir.path() / "one" / "regression.svg");
  std::size_t marks = 0;
  for (std::size_t p = svg.find("class=\"mark\""); p != std::string::npos; p = svg.find("class=\"mark\"", p + 1)) {
    ++marks;
  }
  CHECK(marks == 1);
  CHECK(svg.find(">†</text>") != std::string::npos);

  // empty table: no bubble chart, a note instead
  Json empty = report;
  empty["regression"]["categories"] = Json::array();
  const FigureOutput e = EmitFigures(empty, dir.path() / "empty");
  CHECK_FALSE(fs::exists(dir.path() / "empty" / "regression.svg"));
  REQUIRE(e.notes.size() == 1);
  CHECK(e.notes[0].find("regression") != std::string::npos);

  // an empty gender group skips the family
  Json no_men = report;
  for (auto& row : no_men["portrayal"]) {
    row["n_male"] = 0;
    row["male_median"] = nullptr;
  }
  const FigureOutput m = EmitFigures(no_men, dir.path() / "no-men");
  CHECK_FALSE(fs::exists(dir.path() / "no-men" / "portrayal.svg"));
  CHECK(fs::exists(dir.path() / "no-men" / "affect.svg"));
  CHECK(m.notes.size() == 1);

  // two-row csv for a single F/M pair
  Json single = report;
  single["portrayal"] = Json::array({report["portrayal"][0]});
  EmitFigures(single, dir.path() / "single");
  const auto rows = csv::Parse(ts::Slurp(dir.path() / "single" / "portrayal.csv"), "portrayal.csv");
  CHECK(rows.size() == 3);
}

TEST_CASE("manifest digests follow the inputs") {
  ts::TempDir dir("cli");
  const fs::path inputs = CopyFixture(dir);
  const std::string cfg = (inputs / "audit.toml").string();
  const fs::path a = dir.path() / "a", b = dir.path() / "b", c = dir.path() / "c";
  REQUIRE(Cli({"--config", cfg, "--out", a.string(), "run-all"}).code == 0);
  REQUIRE(Cli({"--config", cfg, "--out", b.string(), "run-all"}).code == 0);
  const auto ma = Manifest(a), mb = Manifest(b);
  CHECK(ma["config_digest"] == mb["config_digest"]);
  CHECK(ma["corpus"] == mb["corpus"]);
  CHECK(ma["lexicons"] == mb["lexicons"]);
  CHECK(ma["stages"] == mb["stages"]);
  CHECK(ts::Slurp(a / "report.json") == ts::Slurp(b / "report.json"));

  std::ofstream(inputs / "lexicons" / "weak.txt", std::ios::app) << "feeble\n";
  REQUIRE(Cli({"--config", cfg, "--out", c.string(), "run-all"}).code == 0);
  const auto mc = Manifest(c);
  CHECK(mc["corpus"] == ma["corpus"]);
  CHECK(mc["config_digest"] == ma["config_digest"]);
  for (std::size_t i = 0; i < ma["lexicons"].size(); ++i) {
    const bool changed = ma["lexicons"][i]["file"] == "weak.txt";
    CHECK((mc["lexicons"][i]["sha256"] != ma["lexicons"][i]["sha256"]) == changed);
  }

  std::ofstream(inputs / "corpus.jsonl", std::ios::app)
      << R"({"id":"extra","title":"X","text":"Lena ran. She won.","source":"HUMAN"})" << "\n";
  REQUIRE(Cli({"--config", cfg, "--out", c.string(), "ingest"}).code == 0);
  CHECK(Manifest(c)["corpus"]["sha256"] != ma["corpus"]["sha256"]);
  CHECK(Manifest(c)["stages"]["ingest"] != ma["stages"]["ingest"]);
}

TEST_CASE("failed stories exit with the backend code") {
  ts::TempDir dir("cli");
  const fs::path inputs = CopyFixture(dir);
  const fs::path script = inputs / "flaky.sh";
  std::ofstream(script) << "#!/bin/sh\nexit 3\n";
  fs::permissions(script, fs::perms::owner_all);
  const std::string cfg = (inputs / "audit.toml").string();
  const fs::path ws = dir.path() / "ws";
  REQUIRE(Cli({"--config", cfg, "--out", ws.string(), "ingest"}).code == 0);
  REQUIRE(Cli({"--config", cfg, "--out", ws.string(), "annotate"}).code == 0);
  const CliRun r = Cli({"--config", cfg, "--out", ws.string(), "--set", "inference.backend=command", "--set",
                        "inference.command=[\"" + script.string() + "\"]", "--set", "inference.cache=false", "infer"});
  CHECK(r.code == 2);
  const auto failures = nlohmann::json::parse(ts::Slurp(ws / "inference_failures.json"));
  CHECK(failures.at("failures").size() == 52);
}

TEST_CASE("rerunning stages reproduces report.json byte for byte") {
  ts::TempDir dir("cli");
  const fs::path a = dir.path() / "a", b = dir.path() / "b";
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", a.string(), "run-all"}).code == 0);
  const std::string first = ts::Slurp(a / "report.json");
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", a.string(), "report"}).code == 0);
  CHECK(ts::Slurp(a / "report.json") == first);
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", a.string(), "score"}).code == 0);
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", a.string(), "run-all"}).code == 0);
  CHECK(ts::Slurp(a / "report.json") == first);
  REQUIRE(Cli({"--config", FixtureConfig(), "--out", b.string(), "run-all"}).code == 0);
  CHECK(ts::Slurp(b / "report.json") == first);
}
