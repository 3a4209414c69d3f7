#include <cmath>
#include <sstream>

#include "doctest.h"
#include "evidencer/error.h"
#include "evidencer/ranker.h"
#include "test_support.h"

using namespace evidencer;
using evidencer::testing::example_resources;
using evidencer::testing::make_sentence;

namespace {

struct World {
  AnnotationResources resources = example_resources();
  SemanticIndex index;
  std::map<std::string, Motion> motions;

  explicit World(const std::vector<std::string> &texts) {
    std::vector<Sentence> s;
    for (size_t i = 0; i < texts.size(); ++i) {
      s.push_back(make_sentence("d", static_cast<uint32_t>(i), texts[i], resources));
    }
    index = build_index(s);
    Motion m = evidencer::testing::gambling_motion(resources.redirects);
    motions.emplace(m.motion_id, m);
  }

  ScoringContext context() const { return {&index, &motions, "[TOPIC]"}; }

  Candidate candidate(uint32_t i, std::string query_id = "study-1") const {
    Candidate c;
    c.motion_id = "m1";
    c.sentence_ref = {"d", i};
    c.query_id = std::move(query_id);
    return c;
  }
};

class FixedScorer : public Scorer {
 public:
  explicit FixedScorer(std::vector<double> scores) : scores_(std::move(scores)) {}
  std::vector<double> score(std::span<const Candidate> c) override {
    return {scores_.begin(), scores_.begin() + static_cast<std::ptrdiff_t>(c.size())};
  }

 private:
  std::vector<double> scores_;
};

std::vector<LabeledExample> separable_toy() {
  // Two clusters on either side of x + y = 0.
  std::vector<LabeledExample> data;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.3, 2.0);
  for (int i = 0; i < 20; ++i) {
    bool pos = i % 2 == 0;
    double s = pos ? 1.0 : -1.0;
    data.push_back({{{"x", s * u(rng)}, {"y", s * u(rng)}}, pos});
  }
  return data;
}

}  // namespace

TEST_CASE("features: sentence without annotations") {
  World w({"plain words only"});
  Sentence s = w.index.sentence(0);
  auto fv = extract_features(w.candidate(0, ""), s, w.motions.at("m1"));
  CHECK(fv == FeatureVector{{"len:0-9", 1.0}, {"topic_pos:none", 1.0}});
}

TEST_CASE("features: hand-counted vector for the gambling sentence") {
  World w({evidencer::testing::kGamblingSentence});
  auto fv = extract_features(w.candidate(0), w.index.sentence(0), w.motions.at("m1"));
  FeatureVector expected = {{"lex:study", 1.0},     {"lex:sentiment", 1.0},
                            {"ent:org", 2.0},       {"len:20-39", 1.0},
                            {"topic_pos:middle", 1.0}, {"query:study-1", 1.0},
                            {"sentiment_gap", 8.0}};
  CHECK(fv == expected);
}

TEST_CASE("logistic_score basics") {
  LogisticModel zero;
  FeatureVector fv = {{"a", 3.0}};
  CHECK(logistic_score(zero, fv) == 0.5);
  LogisticModel big{20.0, {}};
  CHECK(logistic_score(big, fv) >= 0.999);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    LogisticModel m{n(rng), {{"a", n(rng)}, {"b", n(rng)}}};
    FeatureVector x = {{"a", n(rng)}, {"b", n(rng)}, {"c", n(rng)}};
    CHECK(logistic_score(m, x) + logistic_score(m.negated(), x) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(sigmoid(-800.0) >= 0.0);
  CHECK(sigmoid(800.0) <= 1.0);
}

TEST_CASE("train_logistic: separable toy set") {
  auto data = separable_toy();
  std::vector<double> losses;
  LogisticModel m = train_logistic(data, {}, &losses);
  size_t correct = 0;
  for (const auto &ex : data) correct += (logistic_score(m, ex.features) >= 0.5) == ex.positive;
  CHECK(static_cast<double>(correct) / data.size() >= 0.99);
  REQUIRE(losses.size() == 301);
  for (size_t i = 1; i < losses.size(); ++i) CHECK(losses[i] <= losses[i - 1]);
}

TEST_CASE("train_logistic: single-label data") {
  std::vector<LabeledExample> pos = {{{{"a", 1.0}}, true}, {{{"b", 2.0}}, true}, {{}, true}};
  LogisticModel m = train_logistic(pos, {});
  for (const auto &ex : pos) CHECK(logistic_score(m, ex.features) > 0.5);
  for (auto &ex : pos) ex.positive = false;
  LogisticModel n = train_logistic(pos, {});
  for (const auto &ex : pos) CHECK(logistic_score(n, ex.features) < 0.5);
  CHECK_THROWS_AS(train_logistic({}, {}), Error);
}

TEST_CASE("logistic_gradient matches central differences") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<LabeledExample> data;
  for (int i = 0; i < 30; ++i) {
    data.push_back({{{"a", n(rng)}, {"b", n(rng)}, {"c", n(rng)}}, n(rng) > 0});
  }
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    LogisticModel m{n(rng), {{"a", n(rng)}, {"b", n(rng)}, {"c", n(rng)}}};
    LogisticModel g = logistic_gradient(m, data, 0.1);
    for (auto &[id, w] : m.weights) {
      LogisticModel up = m, down = m;
      up.weights[id] = w + h;
      down.weights[id] = w - h;
      double fd = (logistic_loss(up, data, 0.1) - logistic_loss(down, data, 0.1)) / (2 * h);
      CHECK(std::fabs(fd - g.weights.at(id)) <= 1e-5 * std::max(1.0, std::fabs(fd)));
    }
  }
}

TEST_CASE("model text format round-trips exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 10.0);
  LogisticModel m{n(rng), {}};
  for (int i = 0; i < 50; ++i) m.weights["f" + std::to_string(i)] = n(rng);
  m.weights["tiny"] = 5e-324;
  std::string text = format_model(m);
  std::istringstream in(text);
  LogisticModel back = parse_model(in);
  CHECK(back == m);
  CHECK(format_model(back) == text);
  std::istringstream bad("weight 1\n");
  CHECK_THROWS_AS(parse_model(bad), Error);
  std::istringstream nan("bias nan\n");
  CHECK_THROWS_AS(parse_model(nan), Error);
}

TEST_CASE("input variant names") {
  CHECK(parse_input_variant("MaskS+M") == InputVariant::kMaskedSentenceMotion);
  CHECK(to_string(InputVariant::kMaskedSentence) == "MaskS");
  CHECK_THROWS_AS(parse_input_variant("M"), Error);
}

TEST_CASE("builtin scorer equals logistic_score element-wise") {
  World w({evidencer::testing::kGamblingSentence, "gambling harm", "nothing"});
  LogisticModel m{-0.5, {{"lex:study", 1.25}, {"topic_pos:none", -2.0}, {"sentiment_gap", 0.1}}};
  LogisticScorer scorer(m, w.context());
  std::vector<Candidate> c = {w.candidate(0), w.candidate(1), w.candidate(2)};
  auto scored = score_batch(scorer, c);
  REQUIRE(scored.size() == 3);
  for (size_t i = 0; i < 3; ++i) {
    CHECK(scored[i].candidate == c[i]);
    CHECK(scored[i].score ==
          logistic_score(m, extract_features(c[i], w.index.sentence(i), w.motions.at("m1"))));
  }
}

TEST_CASE("score_batch rejects bad scores") {
  World w({"a"});
  std::vector<Candidate> c = {w.candidate(0)};
  FixedScorer nan({std::nan("")});
  CHECK_THROWS_AS(score_batch(nan, c), Error);
  FixedScorer high({1.5});
  try {
    score_batch(high, c);
    FAIL("expected error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kProtocol);
    CHECK(std::string(e.what()).find("d#0@m1") != std::string::npos);
  }
}

TEST_CASE("stop words") {
  CHECK(default_stop_words().size() == 150);
  CHECK(default_stop_words().count("the"));
}

TEST_CASE("word_overlap examples") {
  using S = std::set<std::string>;
  CHECK(word_overlap(S{"violent", "cause", "aggression", "children"},
                     S{"cause", "aggression", "children"}) == 1.0);
  CHECK(word_overlap(S{"a", "b", "c", "d", "e"}, S{"a", "b", "c", "x", "y"}) == 0.6);
  CHECK(word_overlap(S{}, S{"a"}) == 0.0);
}

TEST_CASE("dedup_ranked examples") {
  World w({"Violent cause aggression children.", "Cause aggression children!",
           "Violent cause aggression children.", "a b c d e", "a b c x y",
           "Gambling is the cause of children aggression"});
  auto ctx = w.context();
  auto sc = [&](uint32_t i, double s) { return ScoredCandidate{w.candidate(i), s}; };

  auto content = content_tokens(w.index.sentence(5), w.motions.at("m1"), default_stop_words());
  CHECK(content == std::set<std::string>{"aggression", "cause", "children"});

  std::vector<ScoredCandidate> ident = {sc(0, 0.9), sc(2, 0.8)};
  CHECK(dedup_ranked(ident, ctx, default_stop_words()).size() == 1);

  std::vector<ScoredCandidate> subset = {sc(0, 0.9), sc(1, 0.8)};
  auto kept = dedup_ranked(subset, ctx, default_stop_words());
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].candidate.sentence_ref.index == 0);

  std::vector<ScoredCandidate> partial = {sc(3, 0.9), sc(4, 0.8)};
  CHECK(dedup_ranked(partial, ctx, std::set<std::string>{}).size() == 2);
}

TEST_CASE("rank orders by score then sentence") {
  World w({"a", "b", "c"});
  std::vector<Candidate> c = {w.candidate(0), w.candidate(1), w.candidate(2)};
  FixedScorer s({0.2, 0.9, 0.5});
  auto r = rank(c, s, w.context());
  REQUIRE(r.size() == 3);
  CHECK(r[0].score == 0.9);
  CHECK(r[1].score == 0.5);
  CHECK(r[2].score == 0.2);

  FixedScorer tie({0.5, 0.5, 0.5});
  std::vector<Candidate> rev = {c[2], c[0], c[1]};
  auto t = rank(rev, tie, w.context());
  for (uint32_t i = 0; i < 3; ++i) CHECK(t[i].candidate.sentence_ref.index == i);

  FixedScorer empty({});
  CHECK(rank({}, empty, w.context()).empty());
}

TEST_CASE("binarize boundary is inclusive") {
  World w({"a"});
  std::vector<ScoredCandidate> s = {{w.candidate(0), 0.5}, {w.candidate(0), 0.0},
                                    {w.candidate(0), 1.0}, {w.candidate(0), 0.4999999}};
  auto b = binarize(s);
  CHECK(b[0].positive);
  CHECK_FALSE(b[1].positive);
  CHECK(b[2].positive);
  CHECK_FALSE(b[3].positive);
}
