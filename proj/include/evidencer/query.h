#ifndef EVIDENCER_QUERY_H_
#define EVIDENCER_QUERY_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evidencer/corpus.h"
#include "evidencer/index.h"

namespace evidencer {

struct TopicSlot {
  bool operator==(const TopicSlot &) const = default;
};
struct ActionSlot {
  bool operator==(const ActionSlot &) const = default;
};
struct LiteralSlot {
  std::string word;  // one normalized token
  bool operator==(const LiteralSlot &) const = default;
};
struct LexiconSlot {
  std::string name;
  bool operator==(const LexiconSlot &) const = default;
};
struct EntitySlot {
  EntityKind kind = EntityKind::kNumber;
  bool operator==(const EntitySlot &) const = default;
};

using QuerySlot = std::variant<TopicSlot, ActionSlot, LiteralSlot, LexiconSlot, EntitySlot>;

// Slots must occur in a sentence in order, not necessarily adjacent. When
// max_gap is set, at most that many tokens may separate consecutive matched
// slots.
struct Query {
  std::string query_id;
  EvidenceType evidence_type = EvidenceType::kStudy;
  std::vector<QuerySlot> slots;
  std::optional<uint32_t> max_gap;

  bool operator==(const Query &) const = default;
};

inline constexpr size_t kDefaultCascadeCap = 12000;

struct Cascade {
  EvidenceType evidence_type = EvidenceType::kStudy;
  std::vector<Query> queries;  // priority order
  size_t cap = kDefaultCascadeCap;
};

struct Candidate {
  std::string motion_id;
  SentenceId sentence_ref;
  std::string query_id;
  EvidenceType evidence_type = EvidenceType::kStudy;
  std::vector<TokenRange> match_spans;  // one per slot

  bool operator==(const Candidate &) const = default;
};

// Grammar, one query per string:
//   query := evidence_type ':' slot+ ('gap<=' N)?
//   slot  := 'TOPIC' | 'ACTION' | '"' word '"' | 'lex(' name ')'
//          | 'ent(' ('number' | 'person' | 'org') ')'
// Throws ParseError with a 1-based column for syntax errors, and
// Error(kInvalidArgument) when the query does not have exactly one TOPIC.
Query parse_query(std::string_view text, std::string query_id = {});

// Canonical text form; parse_query(format_query(q)) == q up to query_id.
std::string format_query(const Query &query);

// Cascade file: a header line "cascade <evidence_type> cap=<N>" followed by
// one query per line. Blank lines and '#' comments are skipped. Queries get
// ids "<type>-<n>", n counting from 1 in file order.
Cascade parse_cascade(std::istream &in);
Cascade load_cascade(const std::filesystem::path &path);

// Throws Error(kInvalidArgument) when the query does not have exactly one
// TOPIC slot, or has an ACTION slot and the motion has no action.
void check_compatible(const Query &query, const Motion &motion);

// Candidate token ranges for one slot in one sentence, sorted.
std::vector<TokenRange> slot_occurrences(const QuerySlot &slot,
                                         const Sentence &sentence,
                                         const Motion &motion);

// Picks one occurrence per slot so that spans are strictly increasing and
// respect max_gap. Among all valid assignments, returns the lexicographically
// smallest by slot order (leftmost-greedy with backtracking).
std::optional<std::vector<TokenRange>> assign_slots(
    std::span<const std::vector<TokenRange>> occurrences,
    std::optional<uint32_t> max_gap);

std::optional<Candidate> match_sentence(const Query &query,
                                        const Sentence &sentence,
                                        const Motion &motion);

// Index-driven retrieval: posting-list intersection followed by positional
// matching. Results are in ascending sentence_ref order.
std::vector<Candidate> retrieve_query(const SemanticIndex &index,
                                      const Query &query, const Motion &motion);

// Reference semantics: match_sentence over every sentence, sorted by
// sentence_ref.
std::vector<Candidate> brute_force_retrieve(std::span<const Sentence> corpus,
                                            const Query &query,
                                            const Motion &motion);

// Runs queries in priority order, skipping sentences that earlier queries
// already contributed, and stops once `cap` candidates are collected. The
// query that crosses the cap contributes its lowest sentence_refs first.
std::vector<Candidate> execute_cascade(const SemanticIndex &index,
                                       const Cascade &cascade,
                                       const Motion &motion);

// Study results first, then Expert results for sentences Study did not
// retrieve.
std::vector<Candidate> retrieve_for_motion(const SemanticIndex &index,
                                           const Cascade &study,
                                           const Cascade &expert,
                                           const Motion &motion);

}  // namespace evidencer

#endif  // EVIDENCER_QUERY_H_
