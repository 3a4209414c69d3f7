#include <fstream>
#include <sstream>

#include "doctest.h"
#include "evidencer/error.h"
#include "evidencer/evalkit.h"
#include "test_support.h"

using namespace evidencer;

namespace {

const std::filesystem::path kData = TEST_DATA_DIR;

std::vector<ScoredCandidate> ranked_list(const std::string &motion, size_t n) {
  std::vector<ScoredCandidate> out;
  for (uint32_t i = 0; i < n; ++i) {
    out.push_back({{motion, {"doc", i}, "q", EvidenceType::kStudy, {}}, 1.0 - 0.01 * i});
  }
  return out;
}

std::map<PairKey, bool> gold_for(const std::string &motion, const std::string &signs) {
  std::map<PairKey, bool> g;
  for (uint32_t i = 0; i < signs.size(); ++i) g[{motion, {"doc", i}}] = signs[i] == '+';
  return g;
}

std::string slurp(const std::filesystem::path &p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("precision_at_k: examples") {
  auto list = ranked_list("m", 4);
  std::vector<size_t> ks = {1, 2, 3, 4};
  auto all = precision_at_k(list, gold_for("m", "++++"), ks);
  for (const auto &p : all.points) CHECK(p.precision == 1.0);

  auto c = precision_at_k(list, gold_for("m", "++-+"), ks);
  CHECK(c.points[0].precision == 1.0);
  CHECK(c.points[1].precision == 1.0);
  CHECK(c.points[2].precision == 2.0 / 3.0);
  CHECK(c.points[3].precision == 3.0 / 4.0);

  std::vector<size_t> too_far = {5};
  CHECK_THROWS_AS(precision_at_k(list, gold_for("m", "++-+"), too_far), Error);
}

TEST_CASE("precision_at_k: missing gold is listed") {
  auto list = ranked_list("m", 4);
  auto gold = gold_for("m", "++-+");
  gold.erase({"m", {"doc", 1}});
  std::vector<size_t> ks = {1};
  CHECK(precision_at_k(list, gold, ks).points[0].precision == 1.0);
  std::vector<size_t> k3 = {3};
  try {
    precision_at_k(list, gold, k3);
    FAIL("expected error");
  } catch (const Error &e) {
    CHECK(std::string(e.what()).find("m/doc#1") != std::string::npos);
  }
  std::vector<size_t> bad = {2, 2};
  CHECK_THROWS_AS(precision_at_k(list, gold_for("m", "++++"), bad), Error);
}

TEST_CASE("precision_at_k times k is an integer") {
  std::mt19937_64 rng(12);
  for (int t = 0; t < 200; ++t) {
    size_t n = 1 + rng() % 50;
    std::string signs;
    for (size_t i = 0; i < n; ++i) signs += rng() % 3 ? '-' : '+';
    std::vector<size_t> ks;
    for (size_t k = 1; k <= n; k += 1 + rng() % 4) ks.push_back(k);
    auto curve = precision_at_k(ranked_list("m", n), gold_for("m", signs), ks);
    for (const auto &p : curve.points) {
      CHECK(p.precision >= 0.0);
      CHECK(p.precision <= 1.0);
      double scaled = p.precision * static_cast<double>(p.k);
      CHECK(std::fabs(scaled - std::round(scaled)) < 1e-9);
    }
  }
}

TEST_CASE("average_curves") {
  PrecisionCurve a{{{1, 1.0}}}, b{{{1, 0.5}}};
  PrecisionCurve two[] = {a, b};
  CHECK(average_curves(two).points[0].precision == 0.75);
  PrecisionCurve one[] = {a};
  CHECK(average_curves(one) == a);
  PrecisionCurve c{{{1, 0.25}, {2, 0.5}}}, d{{{1, 0.75}, {2, 0.0}}}, e{{{1, 0.5}, {2, 1.0}}};
  PrecisionCurve fwd[] = {c, d, e};
  PrecisionCurve rev[] = {e, d, c};
  CHECK(average_curves(fwd) == average_curves(rev));
  PrecisionCurve mismatched[] = {a, c};
  CHECK_THROWS_AS(average_curves(mismatched), Error);
  PrecisionCurve shifted[] = {a, PrecisionCurve{{{2, 0.5}}}};
  CHECK_THROWS_AS(average_curves(shifted), Error);
  CHECK_THROWS_AS(average_curves({}), Error);
}

TEST_CASE("diversity_at_k") {
  std::vector<std::vector<Provenance>> single = {std::vector<Provenance>(30, {"d", "s"})};
  std::vector<size_t> ks = {1, 10, 20};
  for (const auto &p : diversity_at_k(single, ks).points) {
    CHECK(p.avg_docs == 1.0);
    CHECK(p.avg_sources == 1.0);
  }
  // 20 entries over 18 documents: d0 and d1 appear twice.
  std::vector<Provenance> list;
  for (int i = 0; i < 18; ++i) list.push_back({"d" + std::to_string(i), "s" + std::to_string(i % 5)});
  list.push_back({"d0", "s0"});
  list.push_back({"d1", "s1"});
  std::vector<std::vector<Provenance>> lists = {list};
  std::vector<size_t> k20 = {20};
  auto c = diversity_at_k(lists, k20);
  CHECK(c.points[0].avg_docs == 18.0);
  CHECK(c.points[0].avg_sources == 5.0);
}

TEST_CASE("diversity is bounded by k and non-decreasing") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 100; ++t) {
    std::vector<std::vector<Provenance>> lists(1 + rng() % 4);
    for (auto &l : lists) {
      for (size_t i = 0, n = rng() % 40; i < n; ++i) {
        size_t doc = rng() % 15;
        l.push_back({"d" + std::to_string(doc), "s" + std::to_string(doc % 4)});
      }
    }
    std::vector<size_t> ks = {1, 2, 5, 10, 20, 40};
    auto c = diversity_at_k(lists, ks);
    for (size_t i = 0; i < c.points.size(); ++i) {
      CHECK(c.points[i].avg_docs <= static_cast<double>(c.points[i].k));
      CHECK(c.points[i].avg_sources <= c.points[i].avg_docs);
      if (i) {
        CHECK(c.points[i].avg_docs >= c.points[i - 1].avg_docs);
        CHECK(c.points[i].avg_sources >= c.points[i - 1].avg_sources);
      }
    }
  }
}

TEST_CASE("welch: examples and symmetry") {
  std::vector<double> a = {1.0, 2.0, 3.5, 4.0};
  auto same = welch_t_test(a, a);
  CHECK(same.t == 0.0);
  CHECK(same.p == 1.0);

  std::mt19937_64 rng(99);
  std::normal_distribution<double> n0(0.0, 1.0), n5(5.0, 1.0);
  std::vector<double> x, y;
  for (int i = 0; i < 50; ++i) {
    x.push_back(n0(rng));
    y.push_back(n5(rng));
  }
  auto r = welch_t_test(x, y);
  CHECK(r.p < 1e-10);
  auto s = welch_t_test(y, x);
  CHECK(s.t == -r.t);
  CHECK(s.p == r.p);

  std::vector<double> one = {1.0}, flat = {2.0, 2.0}, flat2 = {3.0, 3.0};
  CHECK_THROWS_AS(welch_t_test(one, a), Error);
  CHECK_THROWS_AS(welch_t_test(flat, flat2), Error);
  std::vector<double> inf = {1.0, INFINITY};
  CHECK_THROWS_AS(welch_t_test(inf, a), Error);
}

TEST_CASE("welch: agrees with frozen reference values") {
  std::ifstream in(kData / "welch_reference.txt");
  REQUIRE(in);
  std::string line;
  std::vector<double> a, b;
  size_t cases = 0;
  auto values = [](const std::string &l) {
    std::istringstream ss(l.substr(2));
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(std::stod(tok));
    return out;
  };
  while (std::getline(in, line)) {
    if (line.rfind("a ", 0) == 0) {
      a = values(line);
    } else if (line.rfind("b ", 0) == 0) {
      b = values(line);
    } else if (line.rfind("ref ", 0) == 0) {
      std::istringstream ss(line.substr(4));
      std::string t, p, df;
      ss >> t >> p >> df;
      auto r = welch_t_test(a, b);
      CAPTURE(cases);
      CHECK(std::fabs(r.t - std::stod(t)) <= 1e-9 * std::max(1.0, std::fabs(std::stod(t))));
      CHECK(std::fabs(r.p - std::stod(p)) <= 1e-9);
      CHECK(std::fabs(r.df - std::stod(df)) <= 1e-9 * std::max(1.0, std::stod(df)));
      ++cases;
    }
  }
  CHECK(cases == 100);
}

TEST_CASE("emit_report writes deterministic csv files") {
  evidencer::testing::TempDir dir;
  emit_report({}, {}, dir.path(), "lr", "sample");
  CHECK(slurp(dir / "lr_sample_precision.csv") == "k,precision\n");
  CHECK(slurp(dir / "lr_sample_diversity.csv") == "k,avg_docs,avg_sources\n");

  PrecisionCurve p{{{1, 1.0}, {2, 0.5}, {3, 2.0 / 3.0}}};
  DiversityCurve d{{{1, 1.0, 1.0}, {3, 2.5, 1.5}}};
  emit_report(p, d, dir.path(), "lr", "sample");
  std::string first = slurp(dir / "lr_sample_precision.csv");
  CHECK(first == "k,precision\n1,1\n2,0.5\n3,0.6666666666666666\n");
  CHECK(slurp(dir / "lr_sample_diversity.csv") == "k,avg_docs,avg_sources\n1,1,1\n3,2.5,1.5\n");
  emit_report(p, d, dir.path(), "lr", "sample");
  CHECK(slurp(dir / "lr_sample_precision.csv") == first);
}
