#include "evidencer/formats.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "evidencer/error.h"
#include "json.hpp"

namespace evidencer::formats {

namespace {

const std::vector<std::string> kMotionsHeader = {"motion_id", "text", "topic", "action"};
const std::vector<std::string> kRankingHeader = {"motion_id", "rank", "doc_id", "sent_idx",
                                                 "score", "evidence_type", "query_id"};
const std::vector<std::string> kRecordsHeader = {"motion_id", "doc_id", "sent_idx",
                                                 "annotator_id", "label"};
const std::vector<std::string> kNeedsHeader = {"motion_id", "doc_id", "sent_idx"};
const std::vector<std::string> kSnapshotHeader = {"iteration", "motion_id", "doc_id",
                                                  "sent_idx", "gold"};
const std::vector<std::string> kGoldHeader = {"motion_id", "doc_id", "sent_idx", "gold"};

std::string LabelName(bool positive) { return positive ? "pos" : "neg"; }

bool ParseLabel(const std::string &s, size_t line_no) {
  if (s == "pos") return true;
  if (s == "neg") return false;
  throw ParseError("label must be 'pos' or 'neg', got '" + s + "'", line_no);
}

std::string JoinLines(const std::vector<std::string> &header,
                      const std::vector<std::vector<std::string>> &rows) {
  std::string out = csv_join(header) + "\n";
  for (const auto &row : rows) out += csv_join(row) + "\n";
  return out;
}

std::string ReadFirstLine(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::vector<std::string> parse_csv_line(std::string_view line, size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  size_t i = 0;
  bool quoted = false;
  bool field_started_quoted = false;
  while (i <= line.size()) {
    if (i == line.size()) {
      if (quoted) throw ParseError("unterminated quoted field", line_no, i + 1);
      fields.push_back(std::move(field));
      break;
    }
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        quoted = false;
        ++i;
        if (i < line.size() && line[i] != ',') {
          throw ParseError("text after closing quote", line_no, i + 1);
        }
        continue;
      }
      field.push_back(c);
      ++i;
      continue;
    }
    if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_started_quoted = false;
      ++i;
      continue;
    }
    if (c == '"' && field.empty() && !field_started_quoted) {
      quoted = true;
      field_started_quoted = true;
      ++i;
      continue;
    }
    field.push_back(c);
    ++i;
  }
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_join(const std::vector<std::string> &fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(std::istream &in,
                                               const std::vector<std::string> &expected,
                                               const std::string &what) {
  std::string line;
  size_t line_no = 0;
  std::vector<std::vector<std::string>> rows;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!have_header) {
      if (parse_csv_line(line, line_no) != expected) {
        throw ParseError(what + ": expected header '" + csv_join(expected) + "'", line_no);
      }
      have_header = true;
      continue;
    }
    if (line.empty()) continue;
    auto fields = parse_csv_line(line, line_no);
    if (fields.size() != expected.size()) {
      throw ParseError(what + ": expected " + std::to_string(expected.size()) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    }
    rows.push_back(std::move(fields));
  }
  if (!have_header) throw ParseError(what + ": missing header", 1);
  return rows;
}

std::vector<std::vector<std::string>> read_csv_file(const std::filesystem::path &path,
                                                    const std::vector<std::string> &expected) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_csv(in, expected, path.string());
}

void write_text_file(const std::filesystem::path &path, const std::string &content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path.string());
}

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kParse, "bad number '" + std::string(s) + "'");
  }
  return v;
}

uint32_t parse_u32(std::string_view s) {
  uint32_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::kParse, "bad integer '" + std::string(s) + "'");
  }
  return v;
}

std::vector<Motion> read_motions(const std::filesystem::path &path, const RedirectTable &table) {
  std::vector<Motion> motions;
  std::set<std::string> seen;
  for (auto &row : read_csv_file(path, kMotionsHeader)) {
    if (row[0].empty()) throw Error(ErrorCode::kParse, path.string() + ": empty motion_id");
    if (!seen.insert(row[0]).second) {
      throw Error(ErrorCode::kParse, path.string() + ": duplicate motion_id " + row[0]);
    }
    std::optional<std::string> action;
    if (!row[3].empty()) action = row[3];
    motions.push_back(make_motion(row[0], row[1], row[2], std::move(action), table));
  }
  return motions;
}

std::string format_candidates(std::span<const Candidate> candidates) {
  std::string out;
  for (const Candidate &c : candidates) {
    nlohmann::ordered_json j;
    j["motion_id"] = c.motion_id;
    j["doc_id"] = c.sentence_ref.doc_id;
    j["sent_idx"] = c.sentence_ref.index;
    j["evidence_type"] = to_string(c.evidence_type);
    j["query_id"] = c.query_id;
    nlohmann::ordered_json spans = nlohmann::ordered_json::array();
    for (TokenRange r : c.match_spans) spans.push_back({r.first, r.last});
    j["spans"] = std::move(spans);
    out += j.dump() + "\n";
  }
  return out;
}

std::vector<Candidate> read_candidates(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<Candidate> out;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      Candidate c;
      c.motion_id = j.at("motion_id").get<std::string>();
      c.sentence_ref.doc_id = j.at("doc_id").get<std::string>();
      c.sentence_ref.index = j.at("sent_idx").get<uint32_t>();
      c.evidence_type = parse_evidence_type(j.at("evidence_type").get<std::string>());
      c.query_id = j.at("query_id").get<std::string>();
      for (const auto &span : j.at("spans")) {
        c.match_spans.push_back({span.at(0).get<uint32_t>(), span.at(1).get<uint32_t>()});
      }
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(path.string() + ": malformed candidate: " + e.what(), line_no);
    } catch (const Error &e) {
      throw ParseError(path.string() + ": " + e.what(), line_no);
    }
  }
  return out;
}

std::string format_ranking(std::span<const ScoredCandidate> ranked) {
  std::vector<std::vector<std::string>> rows;
  std::map<std::string, size_t> rank_in_motion;
  for (const ScoredCandidate &sc : ranked) {
    const Candidate &c = sc.candidate;
    size_t r = ++rank_in_motion[c.motion_id];
    rows.push_back({c.motion_id, std::to_string(r), c.sentence_ref.doc_id,
                    std::to_string(c.sentence_ref.index), format_double(sc.score),
                    std::string(to_string(c.evidence_type)), c.query_id});
  }
  return JoinLines(kRankingHeader, rows);
}

std::vector<ScoredCandidate> read_ranking(const std::filesystem::path &path) {
  std::vector<ScoredCandidate> out;
  for (auto &row : read_csv_file(path, kRankingHeader)) {
    ScoredCandidate sc;
    sc.candidate.motion_id = row[0];
    sc.candidate.sentence_ref = {row[2], parse_u32(row[3])};
    sc.score = parse_double(row[4]);
    sc.candidate.evidence_type = parse_evidence_type(row[5]);
    sc.candidate.query_id = row[6];
    out.push_back(std::move(sc));
  }
  return out;
}

std::string format_label_records(std::span<const LabelRecord> records) {
  std::vector<std::vector<std::string>> rows;
  for (const LabelRecord &r : records) {
    rows.push_back({r.pair.motion_id, r.pair.sentence.doc_id,
                    std::to_string(r.pair.sentence.index), r.annotator_id,
                    LabelName(r.positive)});
  }
  return JoinLines(kRecordsHeader, rows);
}

std::vector<LabelRecord> read_label_records(const std::filesystem::path &path) {
  std::vector<LabelRecord> out;
  size_t line_no = 1;
  for (auto &row : read_csv_file(path, kRecordsHeader)) {
    ++line_no;
    LabelRecord r;
    r.pair = {row[0], {row[1], parse_u32(row[2])}};
    r.annotator_id = row[3];
    if (r.annotator_id.empty()) throw ParseError("empty annotator_id", line_no);
    r.positive = ParseLabel(row[4], line_no);
    out.push_back(std::move(r));
  }
  return out;
}

std::string format_needs_labels(std::span<const UnderLabeled> pairs) {
  std::vector<std::vector<std::string>> rows;
  for (const UnderLabeled &u : pairs) {
    rows.push_back({u.pair.motion_id, u.pair.sentence.doc_id,
                    std::to_string(u.pair.sentence.index)});
  }
  return JoinLines(kNeedsHeader, rows);
}

std::string format_snapshot(const DatasetSnapshot &snapshot) {
  std::vector<std::vector<std::string>> rows;
  for (const LabeledPair &p : snapshot.pairs) {
    rows.push_back({std::to_string(p.iteration), p.pair.motion_id, p.pair.sentence.doc_id,
                    std::to_string(p.pair.sentence.index), LabelName(p.gold)});
  }
  return JoinLines(kSnapshotHeader, rows);
}

std::string format_gold(std::span<const AggregatedLabel> labels) {
  std::vector<std::vector<std::string>> rows;
  for (const AggregatedLabel &l : labels) {
    rows.push_back({l.pair.motion_id, l.pair.sentence.doc_id,
                    std::to_string(l.pair.sentence.index), LabelName(l.gold)});
  }
  return JoinLines(kGoldHeader, rows);
}

std::map<PairKey, bool> read_gold(const std::filesystem::path &path) {
  const bool snapshot = parse_csv_line(ReadFirstLine(path), 1) == kSnapshotHeader;
  std::map<PairKey, bool> gold;
  size_t line_no = 1;
  for (auto &row : read_csv_file(path, snapshot ? kSnapshotHeader : kGoldHeader)) {
    ++line_no;
    size_t o = snapshot ? 1 : 0;
    PairKey key{row[o], {row[o + 1], parse_u32(row[o + 2])}};
    bool label = ParseLabel(row[o + 3], line_no);
    auto [it, inserted] = gold.emplace(key, label);
    if (!inserted && it->second != label) {
      throw ParseError("conflicting gold labels for " + to_string(key), line_no);
    }
  }
  return gold;
}

}  // namespace evidencer::formats
