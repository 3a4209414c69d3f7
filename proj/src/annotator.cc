#include "evidencer/annotator.h"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>

#include "evidencer/error.h"
#include "evidencer/text.h"

namespace evidencer {

namespace {

constexpr std::array<std::string_view, 33> kNumberWords = {
    "zero",     "one",      "two",       "three",    "four",    "five",
    "six",      "seven",    "eight",     "nine",     "ten",     "eleven",
    "twelve",   "thirteen", "fourteen",  "fifteen",  "sixteen", "seventeen",
    "eighteen", "nineteen", "twenty",    "thirty",   "forty",   "fifty",
    "sixty",    "seventy",  "eighty",    "ninety",   "hundred", "thousand",
    "million",  "billion",  "trillion"};

std::vector<std::string> NormalizedOf(const Sentence &sentence) {
  std::vector<std::string> out;
  out.reserve(sentence.tokens.size());
  for (const Token &t : sentence.tokens) out.push_back(t.normalized);
  return out;
}

// Greedy left-to-right longest match. `matches(begin, len)` tests the token
// window [begin, begin + len).
template <typename Match>
std::vector<TokenRange> GreedyLongest(size_t n, size_t max_len, Match matches) {
  std::vector<TokenRange> out;
  size_t i = 0;
  while (i < n) {
    size_t best = 0;
    for (size_t len = std::min(max_len, n - i); len >= 1; --len) {
      if (matches(i, len)) {
        best = len;
        break;
      }
    }
    if (best == 0) {
      ++i;
      continue;
    }
    out.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(i + best - 1)});
    i += best;
  }
  return out;
}

std::vector<TokenRange> MatchLexicon(const std::vector<std::string> &tokens,
                                     const Lexicon &lexicon) {
  std::span<const std::string> all(tokens);
  return GreedyLongest(tokens.size(), lexicon.max_term_length(),
                       [&](size_t begin, size_t len) {
                         return lexicon.contains(all.subspan(begin, len));
                       });
}

bool IsNumericToken(std::string_view tok) {
  if (tok.empty() || !text::is_digit(static_cast<unsigned char>(tok[0]))) {
    return false;
  }
  return std::all_of(tok.begin(), tok.end(), [](char c) {
    return (c >= '0' && c <= '9') || c == '.' || c == ',';
  });
}

bool IsNumberUnit(std::string_view tok) {
  return IsNumericToken(tok) ||
         std::find(kNumberWords.begin(), kNumberWords.end(), tok) !=
             kNumberWords.end();
}

std::string Trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

Lexicon::Lexicon(std::string name, std::span<const std::string> terms)
    : name_(std::move(name)) {
  if (name_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "lexicon name is empty");
  }
  for (const std::string &term : terms) {
    std::vector<std::string> toks = normalized_tokens(term);
    if (toks.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "lexicon '" + name_ + "' has an empty term");
    }
    max_len_ = std::max(max_len_, toks.size());
    terms_.insert(std::move(toks));
  }
}

Lexicon Lexicon::parse(std::istream &in) {
  std::string line;
  size_t line_no = 0;
  std::string name;
  std::vector<std::string> terms;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string trimmed = Trim(line);
    if (!have_header) {
      if (trimmed.rfind("name=", 0) != 0) {
        throw ParseError("expected 'name=<lexicon name>' header", line_no);
      }
      name = Trim(std::string_view(trimmed).substr(5));
      if (name.empty()) throw ParseError("empty lexicon name", line_no);
      have_header = true;
      continue;
    }
    if (trimmed.empty() || trimmed[0] == '#') continue;
    if (!text::decode(trimmed)) throw ParseError("invalid UTF-8", line_no);
    terms.push_back(std::move(trimmed));
  }
  if (!have_header) throw ParseError("empty lexicon file", line_no);
  return Lexicon(std::move(name), terms);
}

Lexicon Lexicon::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open lexicon " + path.string());
  try {
    return parse(in);
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

bool Lexicon::contains(std::span<const std::string> tokens) const {
  if (tokens.empty() || tokens.size() > max_len_) return false;
  return terms_.count(std::vector<std::string>(tokens.begin(), tokens.end())) > 0;
}

void RedirectTable::insert(std::string key, std::string title) {
  auto [it, inserted] = map_.emplace(key, title);
  if (!inserted && it->second != title) {
    throw Error(ErrorCode::kInvalidArgument,
                "surface form '" + key + "' redirects to both '" + it->second +
                    "' and '" + title + "'");
  }
  max_len_ = std::max(max_len_, split_phrase(key).size());
}

void RedirectTable::add(std::string_view surface, std::string_view title) {
  std::string key = normalize_phrase(surface);
  std::string canonical = Trim(title);
  if (key.empty() || canonical.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty redirect surface or title");
  }
  std::string self_key = normalize_phrase(canonical);
  if (self_key.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "title has no tokens: " + canonical);
  }
  insert(std::move(key), canonical);
  insert(std::move(self_key), canonical);
  titles_.insert(std::move(canonical));
}

RedirectTable RedirectTable::parse(std::istream &in) {
  RedirectTable table;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty() || line[0] == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw ParseError("expected 'surface<TAB>canonical'", line_no);
    }
    if (!text::decode(line)) throw ParseError("invalid UTF-8", line_no);
    try {
      table.add(std::string_view(line).substr(0, tab),
                std::string_view(line).substr(tab + 1));
    } catch (const ParseError &) {
      throw;
    } catch (const Error &e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return table;
}

RedirectTable RedirectTable::load(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open redirect table " + path.string());
  }
  try {
    return parse(in);
  } catch (const ParseError &e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

const std::string *RedirectTable::find(std::string_view normalized_surface) const {
  auto it = map_.find(std::string(normalized_surface));
  return it == map_.end() ? nullptr : &it->second;
}

std::optional<std::string> RedirectTable::resolve(std::string_view raw) const {
  std::string trimmed = Trim(raw);
  if (titles_.count(trimmed)) return trimmed;
  if (const std::string *title = find(normalize_phrase(trimmed))) return *title;
  return std::nullopt;
}

std::vector<std::string> RedirectTable::surface_forms(std::string_view title) const {
  std::vector<std::string> out;
  for (const auto &[key, value] : map_) {
    if (value == title) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Motion make_motion(std::string motion_id, std::string text,
                   std::string_view topic, std::optional<std::string> action,
                   const RedirectTable &table) {
  std::optional<std::string> canonical = table.resolve(topic);
  if (!canonical) {
    throw Error(ErrorCode::kInvalidArgument,
                "motion '" + motion_id + "': topic '" + std::string(topic) +
                    "' is not in the redirect table");
  }
  Motion m;
  m.motion_id = std::move(motion_id);
  m.text = std::move(text);
  m.topic = *canonical;
  if (action && !normalize_phrase(*action).empty()) m.action = std::move(action);
  m.topic_surface_forms = table.surface_forms(m.topic);
  return m;
}

std::vector<AnnotationSpan> tag_lexicons(const Sentence &sentence,
                                         std::span<const Lexicon> lexicons) {
  std::vector<AnnotationSpan> out;
  if (lexicons.empty()) return out;
  const std::vector<std::string> tokens = NormalizedOf(sentence);
  for (const Lexicon &lexicon : lexicons) {
    for (TokenRange r : MatchLexicon(tokens, lexicon)) {
      out.push_back({r, LexiconHit{lexicon.name()}});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AnnotationSpan> tag_named_entities(const Sentence &sentence,
                                               const Gazetteers &gazetteers) {
  std::vector<AnnotationSpan> out;
  const std::vector<std::string> tokens = NormalizedOf(sentence);
  const size_t n = tokens.size();
  size_t i = 0;
  while (i < n) {
    if (!IsNumberUnit(tokens[i])) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < n && IsNumberUnit(tokens[j + 1])) ++j;
    if (j + 1 < n && (tokens[j + 1] == "%" || tokens[j + 1] == "percent")) ++j;
    out.push_back({{static_cast<uint32_t>(i), static_cast<uint32_t>(j)},
                   NamedEntity{EntityKind::kNumber}});
    i = j + 1;
  }
  if (!gazetteers.person.terms().empty()) {
    for (TokenRange r : MatchLexicon(tokens, gazetteers.person)) {
      out.push_back({r, NamedEntity{EntityKind::kPerson}});
    }
  }
  if (!gazetteers.organization.terms().empty()) {
    for (TokenRange r : MatchLexicon(tokens, gazetteers.organization)) {
      out.push_back({r, NamedEntity{EntityKind::kOrganization}});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<AnnotationSpan> wikify(const Sentence &sentence,
                                   const RedirectTable &table) {
  std::vector<AnnotationSpan> out;
  if (table.empty()) return out;
  const std::vector<std::string> tokens = NormalizedOf(sentence);
  std::string key;
  auto ranges = GreedyLongest(tokens.size(), table.max_key_length(),
                              [&](size_t begin, size_t len) {
                                key.clear();
                                for (size_t k = begin; k < begin + len; ++k) {
                                  if (k > begin) key.push_back(' ');
                                  key += tokens[k];
                                }
                                return table.find(key) != nullptr;
                              });
  for (TokenRange r : ranges) {
    key.clear();
    for (uint32_t k = r.first; k <= r.last; ++k) {
      if (k > r.first) key.push_back(' ');
      key += tokens[k];
    }
    out.push_back({r, WikiLink{*table.find(key)}});
  }
  return out;
}

void annotate(Sentence &sentence, const AnnotationResources &resources) {
  std::vector<AnnotationSpan> all = tag_lexicons(sentence, resources.lexicons);
  for (auto &span : tag_named_entities(sentence, resources.gazetteers)) {
    all.push_back(std::move(span));
  }
  for (auto &span : wikify(sentence, resources.redirects)) {
    all.push_back(std::move(span));
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  sentence.annotations = std::move(all);
}

std::vector<TokenRange> phrase_occurrences(const Sentence &sentence,
                                           std::span<const std::string> phrase) {
  std::vector<TokenRange> out;
  const size_t n = sentence.tokens.size();
  const size_t len = phrase.size();
  if (len == 0 || len > n) return out;
  for (size_t i = 0; i + len <= n; ++i) {
    bool ok = true;
    for (size_t k = 0; k < len && ok; ++k) {
      ok = sentence.tokens[i + k].normalized == phrase[k];
    }
    if (ok) {
      out.push_back({static_cast<uint32_t>(i), static_cast<uint32_t>(i + len - 1)});
    }
  }
  return out;
}

std::vector<TokenRange> topic_occurrences(const Sentence &sentence,
                                          const Motion &motion) {
  std::vector<TokenRange> out;
  for (const AnnotationSpan &span : sentence.annotations) {
    if (const auto *link = std::get_if<WikiLink>(&span.role);
        link && link->title == motion.topic) {
      out.push_back(span.range);
    }
  }
  for (const std::string &form : motion.topic_surface_forms) {
    std::vector<std::string> phrase = split_phrase(form);
    for (TokenRange r : phrase_occurrences(sentence, phrase)) out.push_back(r);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string mask_topic(const Sentence &sentence, const Motion &motion,
                       std::string_view mask_token) {
  std::vector<TokenRange> occurrences = topic_occurrences(sentence, motion);
  if (occurrences.empty()) return sentence.text;

  std::vector<TokenRange> merged;
  for (TokenRange r : occurrences) {
    if (!merged.empty() && r.first <= merged.back().last) {
      merged.back().last = std::max(merged.back().last, r.last);
    } else {
      merged.push_back(r);
    }
  }

  const std::u32string cps = text::decode_or_throw(sentence.text);
  const std::u32string mask = text::decode_or_throw(mask_token);
  std::u32string out;
  size_t pos = 0;
  for (TokenRange r : merged) {
    size_t begin = sentence.tokens[r.first].span.start;
    size_t end = sentence.tokens[r.last].span.end;
    if (begin < pos) begin = pos;
    size_t prefix_end = begin;
    while (prefix_end > pos && text::is_space(cps[prefix_end - 1])) --prefix_end;
    out.append(cps, pos, prefix_end - pos);
    if (prefix_end < begin) out.push_back(' ');
    out += mask;
    pos = end;
    size_t skip = pos;
    while (skip < cps.size() && text::is_space(cps[skip])) ++skip;
    if (skip > pos) out.push_back(' ');
    pos = skip;
  }
  out.append(cps, pos, cps.size() - pos);
  return text::encode(out);
}

}  // namespace evidencer
