#ifndef EVIDENCER_ANNOTATOR_H_
#define EVIDENCER_ANNOTATOR_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evidencer/corpus.h"

namespace evidencer {

inline constexpr std::string_view kDefaultMaskToken = "[TOPIC]";

// A named set of normalized terms. Multi-word terms are token sequences.
class Lexicon {
 public:
  Lexicon() = default;
  // Terms are normalized with normalize_phrase(). Throws
  // Error(kInvalidArgument) for an empty name or a term with no tokens.
  Lexicon(std::string name, std::span<const std::string> terms);

  // File format: first line "name=<name>", then one term per line. Blank
  // lines and lines starting with '#' are ignored.
  static Lexicon parse(std::istream &in);
  static Lexicon load(const std::filesystem::path &path);

  const std::string &name() const { return name_; }
  const std::set<std::vector<std::string>> &terms() const { return terms_; }
  size_t max_term_length() const { return max_len_; }
  bool contains(std::span<const std::string> tokens) const;

 private:
  std::string name_;
  std::set<std::vector<std::string>> terms_;
  size_t max_len_ = 0;
};

// Maps normalized surface forms to canonical wiki titles. Every canonical
// title also maps to itself through its own normalized form.
class RedirectTable {
 public:
  RedirectTable() = default;

  // Throws Error(kInvalidArgument) on an empty surface or title, or when a
  // canonical title's own normalized form already redirects elsewhere.
  void add(std::string_view surface, std::string_view title);

  // Two tab-separated columns: surface, canonical title.
  static RedirectTable parse(std::istream &in);
  static RedirectTable load(const std::filesystem::path &path);

  // `surface` must already be normalized.
  const std::string *find(std::string_view normalized_surface) const;
  // Resolves a raw title or surface form to its canonical title.
  std::optional<std::string> resolve(std::string_view raw) const;
  // Sorted normalized surface forms that redirect to `title`.
  std::vector<std::string> surface_forms(std::string_view title) const;

  size_t max_key_length() const { return max_len_; }
  size_t size() const { return map_.size(); }
  bool empty() const { return map_.empty(); }

 private:
  void insert(std::string key, std::string title);

  std::unordered_map<std::string, std::string> map_;
  std::set<std::string> titles_;
  size_t max_len_ = 0;
};

struct Gazetteers {
  Lexicon person;
  Lexicon organization;
};

struct AnnotationResources {
  std::vector<Lexicon> lexicons;
  Gazetteers gazetteers;
  RedirectTable redirects;
};

// Builds a motion, resolving `topic` through the redirect table. Throws
// Error(kInvalidArgument) if the topic is unknown to the table.
Motion make_motion(std::string motion_id, std::string text,
                   std::string_view topic, std::optional<std::string> action,
                   const RedirectTable &table);

// Per lexicon, greedy left-to-right longest match over normalized tokens.
// Spans from different lexicons may overlap.
std::vector<AnnotationSpan> tag_lexicons(const Sentence &sentence,
                                         std::span<const Lexicon> lexicons);

// Number spans come from a fixed pattern: a maximal run of numeric tokens
// (digits, with inner '.' or ',') or spelled-out number words, optionally
// followed by "%" or "percent". Person and Organization spans come from
// gazetteer longest match.
std::vector<AnnotationSpan> tag_named_entities(const Sentence &sentence,
                                               const Gazetteers &gazetteers);

// Greedy left-to-right longest match against redirect keys; matched tokens
// are consumed.
std::vector<AnnotationSpan> wikify(const Sentence &sentence,
                                   const RedirectTable &table);

// Replaces the sentence's annotations with all three layers, sorted.
void annotate(Sentence &sentence, const AnnotationResources &resources);

// Token ranges where the motion's topic occurs, either as a WikiLink to the
// topic or as one of its surface forms. Sorted, possibly overlapping.
std::vector<TokenRange> topic_occurrences(const Sentence &sentence,
                                          const Motion &motion);

// Every occurrence of `phrase` (normalized tokens) in the sentence.
std::vector<TokenRange> phrase_occurrences(const Sentence &sentence,
                                           std::span<const std::string> phrase);

// Replaces each topic occurrence with `mask_token`. Overlapping occurrences
// merge into one replacement, and whitespace touching a replacement
// collapses to a single space.
std::string mask_topic(const Sentence &sentence, const Motion &motion,
                       std::string_view mask_token = kDefaultMaskToken);

}  // namespace evidencer

#endif  // EVIDENCER_ANNOTATOR_H_
