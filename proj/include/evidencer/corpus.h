#ifndef EVIDENCER_CORPUS_H_
#define EVIDENCER_CORPUS_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace evidencer {

enum class EvidenceType { kStudy, kExpert };

std::string_view to_string(EvidenceType type);
// Accepts "study" or "expert" (case-insensitive).
EvidenceType parse_evidence_type(std::string_view name);

struct Document {
  std::string doc_id;
  std::string source;  // journal or outlet name
  std::string title;
  std::string text;

  bool operator==(const Document &) const = default;
};

// Sentences are identified by their document and their position in it.
// Ordering is by doc_id, then index; every "ascending sentence_ref" order in
// the engine is this order.
struct SentenceId {
  std::string doc_id;
  uint32_t index = 0;

  auto operator<=>(const SentenceId &) const = default;
};

// "doc_id#index"
std::string to_string(const SentenceId &id);

// Half-open [start, end) range of code point offsets.
struct CharSpan {
  uint32_t start = 0;
  uint32_t end = 0;

  auto operator<=>(const CharSpan &) const = default;
};

struct Token {
  std::string surface;
  std::string normalized;  // case-folded surface
  CharSpan span;

  bool operator==(const Token &) const = default;
};

// Inclusive token range [first, last].
struct TokenRange {
  uint32_t first = 0;
  uint32_t last = 0;

  auto operator<=>(const TokenRange &) const = default;
};

enum class EntityKind : uint8_t { kNumber, kPerson, kOrganization };

std::string_view to_string(EntityKind kind);
// Accepts "number", "person", "org" / "organization".
std::optional<EntityKind> parse_entity_kind(std::string_view name);

struct LexiconHit {
  std::string lexicon;
  auto operator<=>(const LexiconHit &) const = default;
};

struct NamedEntity {
  EntityKind kind = EntityKind::kNumber;
  auto operator<=>(const NamedEntity &) const = default;
};

struct WikiLink {
  std::string title;
  auto operator<=>(const WikiLink &) const = default;
};

using Role = std::variant<LexiconHit, NamedEntity, WikiLink>;

struct AnnotationSpan {
  TokenRange range;
  Role role;

  auto operator<=>(const AnnotationSpan &) const = default;
};

struct Sentence {
  SentenceId id;
  std::string text;
  std::vector<Token> tokens;
  // Kept sorted and unique.
  std::vector<AnnotationSpan> annotations;

  bool operator==(const Sentence &) const = default;
};

struct Motion {
  std::string motion_id;
  std::string text;
  std::string topic;  // canonical wiki title
  std::optional<std::string> action;
  // Normalized surface forms (tokens joined by one space) that redirect to
  // `topic`, sorted.
  std::vector<std::string> topic_surface_forms;
};

// Reads newline-delimited JSON records with string fields doc_id, source,
// title and text. Blank lines are skipped. Throws ParseError carrying the
// 1-based line number for malformed records, and Error(kInvalidArgument)
// naming the id for a duplicate doc_id.
std::vector<Document> ingest_corpus(std::istream &in);
std::vector<Document> read_corpus_file(const std::filesystem::path &path);

// Splits on '.', '!' or '?' followed by whitespace and then an uppercase
// letter or a digit. A period does not end a sentence when the word before
// it is a known abbreviation or a single letter. Sentence text runs from its
// first non-whitespace character through the terminal punctuation (or the
// last non-whitespace character of the document).
std::vector<Sentence> segment_sentences(const Document &doc);

// Word tokens are runs of letters and digits; '.' or ',' between two digits
// and an apostrophe between two word characters stay inside the token.
// Every other non-whitespace character is a token of its own.
std::vector<Token> tokenize(std::string_view text);

// Lowercased tokens of `text` joined by single spaces. This is the key form
// used by lexicons, gazetteers and the redirect table.
std::string normalize_phrase(std::string_view text);
std::vector<std::string> normalized_tokens(std::string_view text);

// Splits a normalized phrase back into its tokens.
std::vector<std::string> split_phrase(std::string_view phrase);

// Substring of `text` covering code points [span.start, span.end).
std::string slice(std::string_view text, CharSpan span);

}  // namespace evidencer

#endif  // EVIDENCER_CORPUS_H_
