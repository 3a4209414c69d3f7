#include <cstring>
#include <functional>

#include "doctest.h"
#include "evidencer/error.h"
#include "evidencer/ranker.h"
#include "test_support.h"

using namespace evidencer;
using evidencer::testing::example_resources;
using evidencer::testing::make_sentence;
using evidencer::testing::TempDir;

namespace {

const std::string kPlugin = FAKE_SCORER_PATH;

struct World {
  AnnotationResources resources = example_resources();
  SemanticIndex index;
  std::map<std::string, Motion> motions;
  std::vector<Candidate> candidates;

  explicit World(size_t n) {
    evidencer::testing::SyntheticCorpus gen(31);
    index = build_index(gen.sentences(n, resources));
    Motion m = evidencer::testing::gambling_motion(resources.redirects);
    motions.emplace(m.motion_id, m);
    for (const Sentence &s : index.sentences()) {
      candidates.push_back({"m1", s.id, "study-1", EvidenceType::kStudy, {}});
    }
  }

  ScoringContext context() const { return {&index, &motions, "[TOPIC]"}; }
};

ErrorCode error_of(const std::function<void()> &f) {
  try {
    f();
  } catch (const Error &e) {
    return e.code();
  }
  FAIL("no error");
  return ErrorCode::kIo;
}

}  // namespace

TEST_CASE("external: echo plugin") {
  World w(20);
  ExternalScorer scorer({kPlugin + " echo 0.25", InputVariant::kSentenceMotion, 5000},
                        w.context());
  CHECK(scorer.plugin_name() == "fake-echo");
  for (const ScoredCandidate &sc : score_batch(scorer, w.candidates)) CHECK(sc.score == 0.25);
  scorer.close();
}

TEST_CASE("external: logistic plugin is bit-identical to the builtin scorer") {
  World w(100);
  TempDir dir;
  LogisticModel m{-0.3, {{"len:0-9", 0.7123456789}, {"len:10-19", -1.1 / 3.0}, {"len:20-39", 2.5e-3}}};
  save_model(m, dir / "len.model");
  for (InputVariant v : {InputVariant::kSentenceMotion, InputVariant::kMaskedSentence}) {
    ExternalScorer ext({kPlugin + " length " + (dir / "len.model").string(), v, 5000},
                       w.context());
    LogisticScorer builtin(m, w.context());
    auto a = score_batch(ext, w.candidates);
    auto b = score_batch(builtin, w.candidates);
    REQUIRE(a.size() == 100);
    size_t equal = 0;
    for (size_t i = 0; i < a.size(); ++i) {
      if (v == InputVariant::kSentenceMotion) {
        equal += std::memcmp(&a[i].score, &b[i].score, sizeof(double)) == 0;
      } else {
        equal += a[i].score >= 0.0;  // masked text may change the bucket
      }
    }
    CHECK(equal == 100);
    ext.close();
  }
}

TEST_CASE("external: protocol violations") {
  World w(3);
  auto ctx = w.context();
  CHECK(error_of([&] {
          ExternalScorer s({kPlugin + " refuse", InputVariant::kSentenceMotion, 5000}, ctx);
        }) == ErrorCode::kProtocol);
  CHECK(error_of([&] {
          ExternalScorer s({"/nonexistent/plugin", InputVariant::kSentenceMotion, 5000}, ctx);
        }) == ErrorCode::kProtocol);
  for (const char *mode : {" garbage", " wrong-id", " nan", " crash"}) {
    CAPTURE(mode);
    ExternalScorer s({kPlugin + mode, InputVariant::kSentenceMotion, 5000}, ctx);
    try {
      score_batch(s, w.candidates);
      FAIL("expected error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kProtocol);
      CHECK(std::string(e.what()).find("@m1") != std::string::npos);
    }
  }
  ExternalScorer echo({kPlugin + " echo 1.5", InputVariant::kSentenceMotion, 5000}, ctx);
  CHECK(error_of([&] { score_batch(echo, w.candidates); }) == ErrorCode::kProtocol);
}

TEST_CASE("external: timeout") {
  World w(1);
  ExternalScorer s({kPlugin + " stall", InputVariant::kSentenceMotion, 200}, w.context());
  CHECK(error_of([&] { score_batch(s, w.candidates); }) == ErrorCode::kTimeout);
}

TEST_CASE("make_scorer picks the implementation") {
  World w(2);
  auto builtin = make_scorer(BuiltinScorerSpec{LogisticModel{}}, w.context());
  CHECK(builtin->score(w.candidates) == std::vector<double>{0.5, 0.5});
  auto ext = make_scorer(ExternalScorerOptions{kPlugin + " echo 0.75", InputVariant::kMaskedSentence, 5000},
                         w.context());
  CHECK(ext->score(w.candidates) == std::vector<double>{0.75, 0.75});
}
