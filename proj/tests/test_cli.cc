#include <cstdlib>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "doctest.h"
#include "evidencer/annotator.h"
#include "evidencer/formats.h"
#include "evidencer/index.h"
#include "evidencer/query.h"
#include "json.hpp"
#include "test_support.h"

using namespace evidencer;
using evidencer::testing::TempDir;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kSample = SAMPLE_DIR;

struct Invocation {
  int status = 0;
  std::string out;
  std::string err;
};

Invocation Run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = cli::run(args, out, err);
  return {status, out.str(), err.str()};
}

std::string Slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// The bundled sample config with its output redirected into `dir`.
json SampleConfig(const fs::path &dir) {
  std::ifstream in(kSample / "config.json");
  json j = json::parse(in);
  j["out"] = (dir / "out").string();
  j["index"] = (dir / "out" / "index.evix").string();
  return j;
}

fs::path WriteConfig(const fs::path &dir, const json &j) {
  // Relative paths resolve against the config's directory, so the copy
  // lives next to the sample files only through absolute paths.
  json abs = j;
  for (const char *key : {"corpus", "redirects", "motions", "truth"}) {
    if (abs.contains(key)) abs[key] = (kSample / abs[key].get<std::string>()).string();
  }
  for (auto &p : abs["lexicons"]) p = (kSample / p.get<std::string>()).string();
  for (auto &[k, v] : abs["gazetteers"].items()) v = (kSample / v.get<std::string>()).string();
  for (auto &[k, v] : abs["cascades"].items()) v = (kSample / v.get<std::string>()).string();
  if (abs["scorer"].contains("model")) {
    abs["scorer"]["model"] = (kSample / abs["scorer"]["model"].get<std::string>()).string();
  }
  fs::path path = dir / "config.json";
  std::ofstream(path) << abs.dump(2);
  return path;
}

}  // namespace

TEST_CASE("validate-config accepts the bundled sample config") {
  Invocation r = Run({"validate-config", "--config", (kSample / "config.json").string()});
  CHECK(r.status == cli::kOk);
  CHECK(r.err.empty());
}

TEST_CASE("validate-config reports range violations and missing files") {
  TempDir tmp;
  json j = SampleConfig(tmp.path());
  j["thresholds"]["dedup"] = 1.5;
  j["motions"] = "no_such_motions.csv";
  Invocation r = Run({"validate-config", "-c", WriteConfig(tmp.path(), j).string()});
  CHECK(r.status == cli::kConfigError);
  CHECK(r.err.find("thresholds.dedup") != std::string::npos);
  CHECK(r.err.find("no_such_motions.csv") != std::string::npos);
}

TEST_CASE("unknown config fields and unknown flags are rejected") {
  TempDir tmp;
  json j = SampleConfig(tmp.path());
  j["tresholds"] = json::object();
  CHECK(Run({"validate-config", "-c", WriteConfig(tmp.path(), j).string()}).status ==
        cli::kConfigError);
  CHECK(Run({"rank", "--bogus"}).status == cli::kUsage);
  CHECK(Run({}).status == cli::kUsage);
  CHECK(Run({"validate-config"}).status == cli::kConfigError);
  CHECK(Run({"validate-config", "-c", (tmp / "absent.json").string()}).status == cli::kIoError);
}

TEST_CASE("every subcommand documents its flags") {
  for (const char *sub : {"ingest", "index", "retrieve", "rank", "label-loop", "aggregate-labels",
                          "eval", "validate-config"}) {
    Invocation r = Run({sub, "--help"});
    CHECK(r.status == cli::kOk);
    CHECK(r.out.find("--config") != std::string::npos);
    CHECK(r.out.find("--seed") != std::string::npos);
  }
  CHECK(Run({"rank", "--help"}).out.find("--no-dedup") != std::string::npos);
  CHECK(Run({"eval", "--help"}).out.find("--baseline") != std::string::npos);
}

TEST_CASE("retrieve --motion on the sample corpus matches a brute-force cascade") {
  TempDir tmp;
  std::string config = WriteConfig(tmp.path(), SampleConfig(tmp.path())).string();
  REQUIRE(Run({"index", "-c", config}).status == cli::kOk);
  Invocation r = Run({"retrieve", "-c", config, "--motion", "m1"});
  REQUIRE(r.status == cli::kOk);
  std::vector<Candidate> got = formats::read_candidates(tmp / "out/candidates.jsonl");

  RedirectTable table = RedirectTable::load(kSample / "redirects.tsv");
  Motion motion;
  for (Motion &m : formats::read_motions(kSample / "motions.csv", table)) {
    if (m.motion_id == "m1") motion = m;
  }
  SemanticIndex index = load_index(tmp / "out/index.evix");
  CHECK(index.sentence_count() == 50);

  // Oracle: every query matched against every sentence, first query wins,
  // Study before Expert.
  std::set<SentenceId> seen;
  std::vector<Candidate> expected;
  for (const char *file : {"study.cascade", "expert.cascade"}) {
    Cascade cascade = load_cascade(kSample / file);
    for (const Query &q : cascade.queries) {
      for (Candidate &c : brute_force_retrieve(index.sentences(), q, motion)) {
        if (seen.insert(c.sentence_ref).second) expected.push_back(std::move(c));
      }
    }
  }
  REQUIRE(!expected.empty());
  CHECK(got == expected);
  for (const Candidate &c : got) {
    CHECK(c.motion_id == "m1");
    CHECK(!topic_occurrences(*index.find(c.sentence_ref), motion).empty());
  }
}

TEST_CASE("rank twice gives byte-identical output") {
  TempDir tmp;
  std::string config = WriteConfig(tmp.path(), SampleConfig(tmp.path())).string();
  REQUIRE(Run({"index", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"retrieve", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"rank", "-c", config, "--seed", "3"}).status == cli::kOk);
  std::string first = Slurp(tmp / "out/ranking.csv");
  REQUIRE(Run({"rank", "-c", config, "--seed", "3"}).status == cli::kOk);
  CHECK(Slurp(tmp / "out/ranking.csv") == first);
  CHECK(first.rfind("motion_id,rank,doc_id,sent_idx,score,evidence_type,query_id\n", 0) == 0);
}

TEST_CASE("label-loop is reproducible under a seed and sensitive to it") {
  TempDir tmp;
  std::string config = WriteConfig(tmp.path(), SampleConfig(tmp.path())).string();
  REQUIRE(Run({"index", "-c", config}).status == cli::kOk);
  auto records = [&](const std::string &seed) {
    Invocation r = Run({"label-loop", "-c", config, "--seed", seed});
    REQUIRE(r.status == cli::kOk);
    return Slurp(tmp / "out/label_records.csv") + Slurp(tmp / "out/snapshot_2.csv");
  };
  std::string a = records("11");
  CHECK(records("11") == a);
  CHECK(records("12") != a);

  ::setenv("EVIDENCER_SEED", "11", 1);
  Invocation r = Run({"label-loop", "-c", config});
  ::unsetenv("EVIDENCER_SEED");
  REQUIRE(r.status == cli::kOk);
  CHECK(Slurp(tmp / "out/label_records.csv") + Slurp(tmp / "out/snapshot_2.csv") == a);
}

TEST_CASE("aggregate-labels and eval write their reports") {
  TempDir tmp;
  json j = SampleConfig(tmp.path());
  std::string config = WriteConfig(tmp.path(), j).string();
  REQUIRE(Run({"index", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"retrieve", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"rank", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"label-loop", "-c", config}).status == cli::kOk);
  Invocation agg =
      Run({"aggregate-labels", "-c", config, "--labels", (tmp / "out/label_records.csv").string()});
  REQUIRE(agg.status == cli::kOk);
  CHECK(agg.out.find("overall kappa") != std::string::npos);
  CHECK(fs::exists(tmp / "out/gold.csv"));
  CHECK(fs::exists(tmp / "out/annotators.csv"));

  Invocation ev = Run({"eval", "-c", config});
  REQUIRE(ev.status == cli::kOk);
  CHECK(Slurp(tmp / "out/reports/bootstrap_sample_precision.csv").rfind("k,precision\n", 0) == 0);
  CHECK(Slurp(tmp / "out/reports/bootstrap_sample_diversity.csv")
            .rfind("k,avg_docs,avg_sources\n", 0) == 0);

  // Gold that misses ranked pairs is an input error naming them.
  std::ofstream(tmp / "partial.csv") << "motion_id,doc_id,sent_idx,gold\nm1,g1,0,pos\n";
  Invocation bad = Run({"eval", "-c", config, "--gold", (tmp / "partial.csv").string()});
  CHECK(bad.status == cli::kInvalidInput);
  CHECK(bad.err.find("m1/") != std::string::npos);
}

TEST_CASE("error categories map to distinct exit statuses") {
  TempDir tmp;
  json j = SampleConfig(tmp.path());
  std::string config = WriteConfig(tmp.path(), j).string();
  REQUIRE(Run({"index", "-c", config}).status == cli::kOk);
  REQUIRE(Run({"retrieve", "-c", config}).status == cli::kOk);

  CHECK(Run({"retrieve", "-c", config, "--motion", "m9"}).status == cli::kInvalidInput);

  std::string bytes = Slurp(tmp / "out/index.evix");
  std::ofstream(tmp / "out/index.evix", std::ios::binary) << bytes.substr(0, bytes.size() - 1);
  CHECK(Run({"rank", "-c", config}).status == cli::kIndexFormat);
  std::ofstream(tmp / "out/index.evix", std::ios::binary) << bytes;

  j["scorer"] = {{"type", "external"}, {"command", std::string(FAKE_SCORER_PATH) + " crash"}};
  config = WriteConfig(tmp.path(), j).string();
  CHECK(Run({"rank", "-c", config}).status == cli::kScorerError);

  j["scorer"] = {{"type", "external"}, {"command", std::string(FAKE_SCORER_PATH) + " echo 0.25"}};
  config = WriteConfig(tmp.path(), j).string();
  Invocation ok = Run({"rank", "-c", config});
  CHECK(ok.status == cli::kOk);
  CHECK(ok.out.find(", 0 at or above 0.5") != std::string::npos);

  std::ofstream(tmp / "broken.jsonl") << "{\"doc_id\": \"a\"\n";
  j["corpus"] = (tmp / "broken.jsonl").string();
  config = WriteConfig(tmp.path(), j).string();
  CHECK(Run({"ingest", "-c", config}).status == cli::kParseError);
}
