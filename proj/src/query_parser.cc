#include <fstream>
#include <istream>

#include "evidencer/error.h"
#include "evidencer/query.h"
#include "evidencer/text.h"

namespace evidencer {

namespace {

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  Query parse() {
    Query q;
    skip_space();
    size_t type_start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ':' && !is_space(text_[pos_])) ++pos_;
    std::string_view type_name = text_.substr(type_start, pos_ - type_start);
    if (type_name.empty()) fail("expected evidence type", type_start);
    try {
      q.evidence_type = parse_evidence_type(type_name);
    } catch (const Error &) {
      fail("unknown evidence type '" + std::string(type_name) + "'", type_start);
    }
    skip_space();
    expect(':');
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      if (consume("gap<=")) {
        size_t num_start = pos_;
        while (pos_ < text_.size() && text::is_digit(text_[pos_])) ++pos_;
        if (num_start == pos_) fail("expected number after 'gap<='", num_start);
        std::string digits(text_.substr(num_start, pos_ - num_start));
        if (digits.size() > 9) fail("gap too large", num_start);
        q.max_gap = static_cast<uint32_t>(std::stoul(digits));
        skip_space();
        if (pos_ < text_.size()) fail("unexpected text after gap", pos_);
        break;
      }
      q.slots.push_back(parse_slot());
    }
    if (q.slots.empty()) fail("query has no slots", pos_);
    return q;
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

  [[noreturn]] void fail(const std::string &message, size_t at) const {
    throw ParseError(message, 0, at + 1);
  }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  bool consume(std::string_view word) {
    if (text_.substr(pos_, word.size()) == word) {
      pos_ += word.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) {
      fail(std::string("expected '") + c + "'", pos_);
    }
    ++pos_;
  }

  // The slot keyword must end at a space or the end of input.
  void expect_slot_end() {
    if (pos_ < text_.size() && !is_space(text_[pos_])) fail("expected space between slots", pos_);
  }

  std::string parenthesized(size_t at) {
    expect('(');
    size_t start = pos_;
    while (pos_ < text_.size() && text_[pos_] != ')') ++pos_;
    if (pos_ >= text_.size()) fail("unterminated '('", at);
    std::string inner(text_.substr(start, pos_ - start));
    ++pos_;
    if (inner.empty()) fail("empty argument", start);
    for (char c : inner) {
      if (is_space(c)) fail("whitespace inside argument", start);
    }
    return inner;
  }

  QuerySlot parse_slot() {
    size_t at = pos_;
    if (consume("TOPIC")) {
      expect_slot_end();
      return TopicSlot{};
    }
    if (consume("ACTION")) {
      expect_slot_end();
      return ActionSlot{};
    }
    if (consume("lex")) {
      std::string name = parenthesized(at);
      expect_slot_end();
      return LexiconSlot{std::move(name)};
    }
    if (consume("ent")) {
      std::string kind_name = parenthesized(at);
      auto kind = parse_entity_kind(kind_name);
      if (!kind || kind_name == "organization") {
        fail("entity kind must be number, person or org", at);
      }
      expect_slot_end();
      return EntitySlot{*kind};
    }
    if (pos_ < text_.size() && text_[pos_] == '"') {
      ++pos_;
      size_t start = pos_;
      while (pos_ < text_.size() && text_[pos_] != '"') ++pos_;
      if (pos_ >= text_.size()) fail("unterminated string", at);
      std::string_view word = text_.substr(start, pos_ - start);
      ++pos_;
      std::vector<std::string> toks;
      try {
        toks = normalized_tokens(word);
      } catch (const Error &) {
        fail("invalid UTF-8 in literal", start);
      }
      if (toks.size() != 1) fail("literal must be exactly one token", start);
      expect_slot_end();
      return LiteralSlot{std::move(toks[0])};
    }
    fail("expected a slot (TOPIC, ACTION, \"word\", lex(...), ent(...))", at);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

struct SlotPrinter {
  std::string operator()(const TopicSlot &) const { return "TOPIC"; }
  std::string operator()(const ActionSlot &) const { return "ACTION"; }
  std::string operator()(const LiteralSlot &s) const { return "\"" + s.word + "\""; }
  std::string operator()(const LexiconSlot &s) const { return "lex(" + s.name + ")"; }
  std::string operator()(const EntitySlot &s) const {
    return "ent(" + std::string(to_string(s.kind)) + ")";
  }
};

}  // namespace

Query parse_query(std::string_view text, std::string query_id) {
  Query q = QueryParser(text).parse();
  q.query_id = std::move(query_id);
  size_t topics = 0;
  for (const QuerySlot &slot : q.slots) {
    if (std::holds_alternative<TopicSlot>(slot)) ++topics;
  }
  if (topics != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "query must contain exactly one TOPIC slot (found " +
                    std::to_string(topics) + "): " + std::string(text));
  }
  return q;
}

std::string format_query(const Query &query) {
  std::string out(to_string(query.evidence_type));
  out += ":";
  for (const QuerySlot &slot : query.slots) {
    out += " ";
    out += std::visit(SlotPrinter{}, slot);
  }
  if (query.max_gap) out += " gap<=" + std::to_string(*query.max_gap);
  return out;
}

Cascade parse_cascade(std::istream &in) {
  Cascade cascade;
  bool have_header = false;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::string_view body = std::string_view(line).substr(first);
    if (!have_header) {
      // cascade <type> cap=<N>
      std::vector<std::string> parts;
      size_t p = 0;
      while (p < body.size()) {
        size_t q = body.find_first_of(" \t", p);
        if (q == std::string_view::npos) q = body.size();
        if (q > p) parts.emplace_back(body.substr(p, q - p));
        p = q + 1;
      }
      if (parts.size() != 3 || parts[0] != "cascade" || parts[2].rfind("cap=", 0) != 0) {
        throw ParseError("expected 'cascade <evidence_type> cap=<N>'", line_no);
      }
      try {
        cascade.evidence_type = parse_evidence_type(parts[1]);
      } catch (const Error &e) {
        throw ParseError(e.what(), line_no);
      }
      std::string cap = parts[2].substr(4);
      if (cap.empty() || cap.size() > 12 ||
          cap.find_first_not_of("0123456789") != std::string::npos) {
        throw ParseError("cap must be a positive integer", line_no);
      }
      cascade.cap = std::stoull(cap);
      if (cascade.cap == 0) throw ParseError("cap must be positive", line_no);
      have_header = true;
      continue;
    }
    std::string id = std::string(to_string(cascade.evidence_type)) + "-" +
                     std::to_string(cascade.queries.size() + 1);
    Query q;
    try {
      q = parse_query(body, id);
    } catch (const ParseError &e) {
      throw ParseError(e.what(), line_no);
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }
    if (q.evidence_type != cascade.evidence_type) {
      throw ParseError("query evidence type differs from cascade header", line_no);
    }
    cascade.queries.push_back(std::move(q));
  }
  if (!have_header) throw ParseError("missing cascade header", line_no);
  return cascade;
}

Cascade load_cascade(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open cascade " + path.string());
  try {
    return parse_cascade(in);
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

}  // namespace evidencer
