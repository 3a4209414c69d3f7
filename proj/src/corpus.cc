#include "evidencer/corpus.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <set>

#include "evidencer/error.h"
#include "evidencer/text.h"
#include "json.hpp"

namespace evidencer {

namespace {

constexpr std::array<std::string_view, 48> kAbbreviations = {
    "adm", "apr", "aug", "capt", "cf", "co", "col", "corp", "dec", "dept",
    "dr", "e.g", "est", "etc", "feb", "fig", "gen", "gov", "i.e", "inc",
    "jan", "jr", "jul", "jun", "lt", "ltd", "mar", "messrs", "mr", "mrs",
    "ms", "mt", "no", "nov", "oct", "prof", "rep", "rev", "sen", "sep",
    "sept", "sgt", "sr", "st", "u.k", "u.s", "vol", "vs"};

bool IsAbbreviation(std::u32string_view word) {
  if (word.size() == 1 && text::is_word_char(word[0]) &&
      !text::is_digit(word[0])) {
    return true;  // an initial, as in "J. Smith"
  }
  std::u32string folded(word);
  for (char32_t &c : folded) c = text::fold_case(c);
  std::string key = text::encode(folded);
  return std::find(kAbbreviations.begin(), kAbbreviations.end(), key) !=
         kAbbreviations.end();
}

// The word immediately before position `dot`, without leading punctuation.
std::u32string_view WordBefore(const std::u32string &cps, size_t dot) {
  size_t begin = dot;
  while (begin > 0 && !text::is_space(cps[begin - 1])) --begin;
  while (begin < dot && !text::is_word_char(cps[begin])) ++begin;
  return std::u32string_view(cps).substr(begin, dot - begin);
}

bool IsBoundary(const std::u32string &cps, size_t i) {
  char32_t c = cps[i];
  if (c != '.' && c != '!' && c != '?') return false;
  size_t j = i + 1;
  if (j >= cps.size() || !text::is_space(cps[j])) return false;
  while (j < cps.size() && text::is_space(cps[j])) ++j;
  if (j >= cps.size()) return false;
  if (!text::is_upper(cps[j]) && !text::is_digit(cps[j])) return false;
  if (c == '.' && IsAbbreviation(WordBefore(cps, i))) return false;
  return true;
}

std::string RequireStringField(const nlohmann::json &record,
                               const char *field, size_t line) {
  auto it = record.find(field);
  if (it == record.end()) {
    throw ParseError(std::string("missing field '") + field + "'", line);
  }
  if (!it->is_string()) {
    throw ParseError(std::string("field '") + field + "' is not a string",
                     line);
  }
  return it->get<std::string>();
}

}  // namespace

std::string_view to_string(EvidenceType type) {
  return type == EvidenceType::kStudy ? "study" : "expert";
}

EvidenceType parse_evidence_type(std::string_view name) {
  std::string folded = text::fold_case(name);
  if (folded == "study") return EvidenceType::kStudy;
  if (folded == "expert") return EvidenceType::kExpert;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown evidence type '" + std::string(name) + "'");
}

std::string to_string(const SentenceId &id) {
  return id.doc_id + "#" + std::to_string(id.index);
}

std::string_view to_string(EntityKind kind) {
  switch (kind) {
    case EntityKind::kNumber: return "number";
    case EntityKind::kPerson: return "person";
    case EntityKind::kOrganization: return "org";
  }
  return "number";
}

std::optional<EntityKind> parse_entity_kind(std::string_view name) {
  if (name == "number") return EntityKind::kNumber;
  if (name == "person") return EntityKind::kPerson;
  if (name == "org" || name == "organization") {
    return EntityKind::kOrganization;
  }
  return std::nullopt;
}

std::vector<Document> ingest_corpus(std::istream &in) {
  std::vector<Document> docs;
  std::set<std::string> seen;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (std::all_of(line.begin(), line.end(),
                    [](char c) { return c == ' ' || c == '\t' || c == '\r'; })) {
      continue;
    }
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error &e) {
      throw ParseError(std::string("malformed record: ") + e.what(), line_no);
    }
    if (!record.is_object()) throw ParseError("record is not an object", line_no);
    Document doc;
    doc.doc_id = RequireStringField(record, "doc_id", line_no);
    doc.source = RequireStringField(record, "source", line_no);
    doc.title = RequireStringField(record, "title", line_no);
    doc.text = RequireStringField(record, "text", line_no);
    if (doc.doc_id.empty()) throw ParseError("empty doc_id", line_no);
    if (!seen.insert(doc.doc_id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate doc_id '" + doc.doc_id + "' at line " +
                      std::to_string(line_no));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> read_corpus_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open corpus " + path.string());
  return ingest_corpus(in);
}

std::vector<Sentence> segment_sentences(const Document &doc) {
  std::vector<Sentence> out;
  const std::u32string cps = text::decode_or_throw(doc.text);
  auto emit = [&](size_t begin, size_t end) {
    while (begin < end && text::is_space(cps[begin])) ++begin;
    while (end > begin && text::is_space(cps[end - 1])) --end;
    if (begin == end) return;
    Sentence s;
    s.id = {doc.doc_id, static_cast<uint32_t>(out.size())};
    s.text = text::encode(std::u32string_view(cps).substr(begin, end - begin));
    s.tokens = tokenize(s.text);
    out.push_back(std::move(s));
  };
  size_t start = 0;
  for (size_t i = 0; i < cps.size(); ++i) {
    if (IsBoundary(cps, i)) {
      emit(start, i + 1);
      start = i + 1;
    }
  }
  emit(start, cps.size());
  return out;
}

std::vector<Token> tokenize(std::string_view utf8) {
  const std::u32string cps = text::decode_or_throw(utf8);
  std::vector<Token> tokens;
  const size_t n = cps.size();
  auto push = [&](size_t begin, size_t end) {
    std::u32string_view piece = std::u32string_view(cps).substr(begin, end - begin);
    Token t;
    t.surface = text::encode(piece);
    std::u32string folded(piece);
    for (char32_t &c : folded) c = text::fold_case(c);
    t.normalized = text::encode(folded);
    t.span = {static_cast<uint32_t>(begin), static_cast<uint32_t>(end)};
    tokens.push_back(std::move(t));
  };
  size_t i = 0;
  while (i < n) {
    char32_t c = cps[i];
    if (text::is_space(c)) {
      ++i;
      continue;
    }
    if (!text::is_word_char(c)) {
      push(i, i + 1);
      ++i;
      continue;
    }
    size_t j = i + 1;
    while (j < n) {
      char32_t d = cps[j];
      if (text::is_word_char(d)) {
        ++j;
        continue;
      }
      bool has_next = j + 1 < n;
      if ((d == '.' || d == ',') && has_next && text::is_digit(cps[j - 1]) &&
          text::is_digit(cps[j + 1])) {
        j += 2;
        continue;
      }
      if ((d == '\'' || d == 0x2019) && has_next &&
          text::is_word_char(cps[j + 1])) {
        j += 2;
        continue;
      }
      break;
    }
    push(i, j);
    i = j;
  }
  return tokens;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (Token &t : tokenize(text)) out.push_back(std::move(t.normalized));
  return out;
}

std::string normalize_phrase(std::string_view text) {
  std::string out;
  for (const std::string &tok : normalized_tokens(text)) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::vector<std::string> split_phrase(std::string_view phrase) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < phrase.size()) {
    size_t space = phrase.find(' ', pos);
    if (space == std::string_view::npos) space = phrase.size();
    if (space > pos) out.emplace_back(phrase.substr(pos, space - pos));
    pos = space + 1;
  }
  return out;
}

std::string slice(std::string_view utf8, CharSpan span) {
  const std::u32string cps = text::decode_or_throw(utf8);
  size_t end = std::min<size_t>(span.end, cps.size());
  size_t start = std::min<size_t>(span.start, end);
  return text::encode(std::u32string_view(cps).substr(start, end - start));
}

}  // namespace evidencer
