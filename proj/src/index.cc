#include "evidencer/index.h"

#include <algorithm>

#include "evidencer/error.h"

namespace evidencer {

IndexKey IndexKey::of(const Role &role) {
  struct Visitor {
    IndexKey operator()(const LexiconHit &hit) const { return lexicon(hit.lexicon); }
    IndexKey operator()(const NamedEntity &ne) const { return entity(ne.kind); }
    IndexKey operator()(const WikiLink &link) const { return wiki(link.title); }
  };
  return std::visit(Visitor{}, role);
}

std::string to_string(const IndexKey &key) {
  switch (key.kind) {
    case IndexKey::Kind::kTerm: return "term:" + key.payload;
    case IndexKey::Kind::kLexicon: return "lex:" + key.payload;
    case IndexKey::Kind::kEntity: return "ent:" + key.payload;
    case IndexKey::Kind::kWiki: return "wiki:" + key.payload;
  }
  return key.payload;
}

std::span<const Posting> SemanticIndex::lookup(const IndexKey &key) const {
  auto it = postings_.find(key);
  if (it == postings_.end()) return {};
  return it->second;
}

std::optional<SentenceOrdinal> SemanticIndex::ordinal(const SentenceId &id) const {
  auto it = std::lower_bound(
      sentences_.begin(), sentences_.end(), id,
      [](const Sentence &s, const SentenceId &target) { return s.id < target; });
  if (it == sentences_.end() || it->id != id) return std::nullopt;
  return static_cast<SentenceOrdinal>(it - sentences_.begin());
}

const Sentence *SemanticIndex::find(const SentenceId &id) const {
  auto ord = ordinal(id);
  return ord ? &sentences_[*ord] : nullptr;
}

const std::string &SemanticIndex::source_of(const std::string &doc_id) const {
  static const std::string kEmpty;
  auto it = std::lower_bound(
      documents_.begin(), documents_.end(), doc_id,
      [](const DocumentInfo &d, const std::string &target) { return d.doc_id < target; });
  if (it == documents_.end() || it->doc_id != doc_id) return kEmpty;
  return it->source;
}

void IndexBuilder::add_document(const Document &doc) {
  documents_[doc.doc_id] = doc.source;
}

void IndexBuilder::add(Sentence sentence) {
  SentenceId id = sentence.id;
  auto [it, inserted] = sentences_.emplace(id, std::move(sentence));
  if (!inserted) {
    throw Error(ErrorCode::kInvalidArgument,
                "duplicate sentence id " + to_string(id));
  }
  documents_.try_emplace(id.doc_id, std::string());
}

SemanticIndex IndexBuilder::finish() && {
  SemanticIndex index;
  index.sentences_.reserve(sentences_.size());
  for (auto &[id, sentence] : sentences_) {
    index.sentences_.push_back(std::move(sentence));
  }
  for (auto &[doc_id, source] : documents_) {
    index.documents_.push_back({doc_id, std::move(source)});
  }
  for (SentenceOrdinal ord = 0; ord < index.sentences_.size(); ++ord) {
    const Sentence &s = index.sentences_[ord];
    for (uint32_t t = 0; t < s.tokens.size(); ++t) {
      index.postings_[IndexKey::term(s.tokens[t].normalized)].push_back({ord, t, t});
    }
    for (const AnnotationSpan &span : s.annotations) {
      if (span.range.last >= s.tokens.size() || span.range.first > span.range.last) {
        throw Error(ErrorCode::kInvalidArgument,
                    "annotation outside token range in " + to_string(s.id));
      }
      index.postings_[IndexKey::of(span.role)].push_back(
          {ord, span.range.first, span.range.last});
    }
  }
  // Sentences are visited in order, but annotation spans of one sentence may
  // arrive unsorted by position.
  for (auto &[key, list] : index.postings_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
  }
  sentences_.clear();
  documents_.clear();
  return index;
}

SemanticIndex build_index(std::span<const Sentence> sentences) {
  IndexBuilder builder;
  for (const Sentence &s : sentences) builder.add(s);
  return std::move(builder).finish();
}

}  // namespace evidencer
