#include <sstream>

#include "doctest.h"
#include "evidencer/error.h"
#include "evidencer/formats.h"
#include "test_support.h"

using namespace evidencer;
using evidencer::testing::TempDir;

TEST_CASE("csv quoting") {
  CHECK(formats::csv_escape("plain") == "plain");
  CHECK(formats::csv_escape("a,b") == "\"a,b\"");
  CHECK(formats::csv_escape("say \"hi\"") == "\"say \"\"hi\"\"\"");
  auto fields = formats::parse_csv_line("x,\"a,b\",\"q\"\"q\",", 1);
  CHECK(fields == std::vector<std::string>{"x", "a,b", "q\"q", ""});
  CHECK_THROWS_AS(formats::parse_csv_line("\"open", 3), ParseError);
}

TEST_CASE("csv header must match") {
  std::istringstream in("a,c\n1,2\n");
  CHECK_THROWS_AS(formats::read_csv(in, {"a", "b"}, "test"), ParseError);
  std::istringstream ragged("a,b\n1\n");
  try {
    formats::read_csv(ragged, {"a", "b"}, "test");
    FAIL("expected error");
  } catch (const ParseError &e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("numbers") {
  CHECK(formats::format_double(0.1) == "0.1");
  CHECK(formats::parse_double(formats::format_double(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS_AS(formats::parse_double("1.5x"), Error);
  CHECK(formats::parse_u32("42") == 42u);
  CHECK_THROWS_AS(formats::parse_u32("-1"), Error);
  CHECK_THROWS_AS(formats::parse_u32(""), Error);
}

TEST_CASE("motions file") {
  TempDir dir;
  auto r = evidencer::testing::example_resources();
  formats::write_text_file(dir / "motions.csv",
                           "motion_id,text,topic,action\n"
                           "m1,\"We should ban gambling, now\",Gambling,ban\n"
                           "m2,Abolish it,death penalty,\n");
  auto motions = formats::read_motions(dir / "motions.csv", r.redirects);
  REQUIRE(motions.size() == 2);
  CHECK(motions[0].text == "We should ban gambling, now");
  CHECK(motions[0].action == "ban");
  CHECK(motions[1].topic == "Capital punishment");
  CHECK_FALSE(motions[1].action.has_value());
  formats::write_text_file(dir / "bad.csv", "motion_id,text,topic,action\nm1,x,Lottery,\n");
  CHECK_THROWS_AS(formats::read_motions(dir / "bad.csv", r.redirects), Error);
}

TEST_CASE("candidates, rankings and labels round-trip") {
  TempDir dir;
  std::vector<Candidate> c = {
      {"m1", {"doc,1", 3}, "study-1", EvidenceType::kStudy, {{0, 0}, {2, 4}}},
      {"m2", {"d", 0}, "", EvidenceType::kExpert, {}}};
  formats::write_text_file(dir / "c.jsonl", formats::format_candidates(c));
  CHECK(formats::read_candidates(dir / "c.jsonl") == c);

  std::vector<ScoredCandidate> ranked = {{c[0], 0.1 + 0.2}, {c[1], 1e-300}};
  formats::write_text_file(dir / "r.csv", formats::format_ranking(ranked));
  auto back = formats::read_ranking(dir / "r.csv");
  REQUIRE(back.size() == 2);
  CHECK(back[0].score == ranked[0].score);
  CHECK(back[1].score == ranked[1].score);
  CHECK(back[0].candidate.sentence_ref == c[0].sentence_ref);
  CHECK(back[0].candidate.query_id == "study-1");

  std::vector<LabelRecord> labels = {{{"m1", {"d", 2}}, "ann", true}, {{"m1", {"d", 3}}, "b", false}};
  formats::write_text_file(dir / "l.csv", formats::format_label_records(labels));
  CHECK(formats::read_label_records(dir / "l.csv") == labels);
  formats::write_text_file(dir / "badlabel.csv",
                           "motion_id,doc_id,sent_idx,annotator_id,label\nm,d,0,a,maybe\n");
  CHECK_THROWS_AS(formats::read_label_records(dir / "badlabel.csv"), ParseError);
}

TEST_CASE("snapshots and gold") {
  TempDir dir;
  DatasetSnapshot s;
  s.iteration = 2;
  s.pairs = {{1, {"m", {"d", 0}}, true}, {2, {"m", {"d", 4}}, false}};
  std::string text = formats::format_snapshot(s);
  CHECK(text == "iteration,motion_id,doc_id,sent_idx,gold\n1,m,d,0,pos\n2,m,d,4,neg\n");
  formats::write_text_file(dir / "s.csv", text);
  auto gold = formats::read_gold(dir / "s.csv");
  CHECK(gold.size() == 2);
  CHECK(gold.at({"m", {"d", 0}}));

  std::vector<AggregatedLabel> labels = {{{"m", {"d", 1}}, true, 5, 2, 7}};
  formats::write_text_file(dir / "g.csv", formats::format_gold(labels));
  CHECK(formats::read_gold(dir / "g.csv").at({"m", {"d", 1}}));
}
