#ifndef EVIDENCER_INDEX_H_
#define EVIDENCER_INDEX_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evidencer/corpus.h"

namespace evidencer {

struct IndexKey {
  enum class Kind : uint8_t { kTerm = 0, kLexicon = 1, kEntity = 2, kWiki = 3 };

  Kind kind = Kind::kTerm;
  std::string payload;

  static IndexKey term(std::string normalized) {
    return {Kind::kTerm, std::move(normalized)};
  }
  static IndexKey lexicon(std::string name) {
    return {Kind::kLexicon, std::move(name)};
  }
  static IndexKey entity(EntityKind kind) {
    return {Kind::kEntity, std::string(to_string(kind))};
  }
  static IndexKey wiki(std::string title) {
    return {Kind::kWiki, std::move(title)};
  }
  // The key an annotation span is indexed under.
  static IndexKey of(const Role &role);

  auto operator<=>(const IndexKey &) const = default;
};

std::string to_string(const IndexKey &key);

// Sentence ordinals are dense positions in the index's sentence store, which
// is sorted by SentenceId. Comparing ordinals therefore compares ids.
using SentenceOrdinal = uint32_t;

struct Posting {
  SentenceOrdinal sentence = 0;
  uint32_t first = 0;  // first token, inclusive
  uint32_t last = 0;   // last token, inclusive

  auto operator<=>(const Posting &) const = default;
};

struct DocumentInfo {
  std::string doc_id;
  std::string source;

  bool operator==(const DocumentInfo &) const = default;
};

// An immutable positional index over annotated sentences. Safe for
// concurrent readers.
class SemanticIndex {
 public:
  SemanticIndex() = default;

  // Empty span for an absent key.
  std::span<const Posting> lookup(const IndexKey &key) const;

  const std::vector<Sentence> &sentences() const { return sentences_; }
  const Sentence &sentence(SentenceOrdinal ord) const { return sentences_[ord]; }
  // nullptr when absent.
  const Sentence *find(const SentenceId &id) const;
  std::optional<SentenceOrdinal> ordinal(const SentenceId &id) const;

  // Source (outlet) of a document; empty when the document is unknown.
  const std::string &source_of(const std::string &doc_id) const;
  const std::vector<DocumentInfo> &documents() const { return documents_; }

  size_t doc_count() const { return documents_.size(); }
  size_t sentence_count() const { return sentences_.size(); }
  const std::map<IndexKey, std::vector<Posting>> &postings() const {
    return postings_;
  }

  bool operator==(const SemanticIndex &) const = default;

 private:
  friend class IndexBuilder;
  friend SemanticIndex load_index(const std::filesystem::path &path);

  std::map<IndexKey, std::vector<Posting>> postings_;
  std::vector<Sentence> sentences_;     // sorted by id
  std::vector<DocumentInfo> documents_;  // sorted by doc_id
};

// Accumulates documents and annotated sentences, then produces the index.
class IndexBuilder {
 public:
  // Registers document provenance. Documents that yield no sentences still
  // count towards doc_count().
  void add_document(const Document &doc);
  // Throws Error(kInvalidArgument) naming the id on a duplicate SentenceId.
  void add(Sentence sentence);

  SemanticIndex finish() &&;

 private:
  std::map<std::string, std::string> documents_;
  std::map<SentenceId, Sentence> sentences_;
};

// Builds an index from already-annotated sentences. Every token yields a
// Term posting and every annotation span yields one posting under its role
// key. Documents are registered with an empty source.
SemanticIndex build_index(std::span<const Sentence> sentences);

// Binary persistence; the layout is documented in docs/index_format.md.
// load_index throws Error with kVersionMismatch (bad magic or version),
// kTruncated (shorter than declared), kChecksum (CRC mismatch or trailing
// bytes), or kIo.
void save_index(const SemanticIndex &index, const std::filesystem::path &path);
SemanticIndex load_index(const std::filesystem::path &path);

inline constexpr uint32_t kIndexFormatVersion = 1;

}  // namespace evidencer

#endif  // EVIDENCER_INDEX_H_
