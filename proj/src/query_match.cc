#include <algorithm>

#include "evidencer/annotator.h"
#include "evidencer/error.h"
#include "evidencer/query.h"

namespace evidencer {

namespace {

class SlotAssigner {
 public:
  SlotAssigner(std::span<const std::vector<TokenRange>> occurrences,
               std::optional<uint32_t> max_gap)
      : occ_(occurrences), max_gap_(max_gap), dead_(occurrences.size()) {
    for (size_t i = 0; i < occ_.size(); ++i) dead_[i].assign(occ_[i].size(), false);
    chosen_.resize(occ_.size());
  }

  std::optional<std::vector<TokenRange>> run() {
    if (occ_.empty()) return std::nullopt;
    if (!solve(0, std::nullopt)) return std::nullopt;
    return chosen_;
  }

 private:
  bool solve(size_t slot, std::optional<uint32_t> prev_last) {
    const std::vector<TokenRange> &options = occ_[slot];
    for (size_t i = 0; i < options.size(); ++i) {
      const TokenRange &r = options[i];
      if (prev_last) {
        if (r.first <= *prev_last) continue;
        // Options are sorted by first token, so later ones only widen the gap.
        if (max_gap_ && r.first - *prev_last - 1 > *max_gap_) break;
      }
      if (dead_[slot][i]) continue;
      chosen_[slot] = r;
      if (slot + 1 == occ_.size() || solve(slot + 1, r.last)) return true;
      dead_[slot][i] = true;
    }
    return false;
  }

  std::span<const std::vector<TokenRange>> occ_;
  std::optional<uint32_t> max_gap_;
  std::vector<std::vector<bool>> dead_;
  std::vector<TokenRange> chosen_;
};

}  // namespace

void check_compatible(const Query &query, const Motion &motion) {
  size_t topics = std::count_if(query.slots.begin(), query.slots.end(), [](const QuerySlot &s) {
    return std::holds_alternative<TopicSlot>(s);
  });
  if (topics != 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "query '" + query.query_id + "' must contain exactly one TOPIC slot");
  }
  if (motion.action) return;
  for (const QuerySlot &slot : query.slots) {
    if (std::holds_alternative<ActionSlot>(slot)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "query '" + query.query_id + "' has an ACTION slot but motion '" +
                      motion.motion_id + "' has no action");
    }
  }
}

std::vector<TokenRange> slot_occurrences(const QuerySlot &slot,
                                         const Sentence &sentence,
                                         const Motion &motion) {
  std::vector<TokenRange> out;
  if (std::holds_alternative<TopicSlot>(slot)) {
    return topic_occurrences(sentence, motion);
  }
  if (std::holds_alternative<ActionSlot>(slot)) {
    if (!motion.action) return out;
    std::vector<std::string> phrase = normalized_tokens(*motion.action);
    return phrase_occurrences(sentence, phrase);
  }
  if (const auto *lit = std::get_if<LiteralSlot>(&slot)) {
    for (uint32_t i = 0; i < sentence.tokens.size(); ++i) {
      if (sentence.tokens[i].normalized == lit->word) out.push_back({i, i});
    }
    return out;
  }
  for (const AnnotationSpan &span : sentence.annotations) {
    bool hit = false;
    if (const auto *lex = std::get_if<LexiconSlot>(&slot)) {
      const auto *role = std::get_if<LexiconHit>(&span.role);
      hit = role && role->lexicon == lex->name;
    } else if (const auto *ent = std::get_if<EntitySlot>(&slot)) {
      const auto *role = std::get_if<NamedEntity>(&span.role);
      hit = role && role->kind == ent->kind;
    }
    if (hit) out.push_back(span.range);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<std::vector<TokenRange>> assign_slots(
    std::span<const std::vector<TokenRange>> occurrences,
    std::optional<uint32_t> max_gap) {
  return SlotAssigner(occurrences, max_gap).run();
}

std::optional<Candidate> match_sentence(const Query &query,
                                        const Sentence &sentence,
                                        const Motion &motion) {
  check_compatible(query, motion);
  std::vector<std::vector<TokenRange>> occurrences;
  occurrences.reserve(query.slots.size());
  for (const QuerySlot &slot : query.slots) {
    occurrences.push_back(slot_occurrences(slot, sentence, motion));
    if (occurrences.back().empty()) return std::nullopt;
  }
  auto spans = assign_slots(occurrences, query.max_gap);
  if (!spans) return std::nullopt;
  return Candidate{motion.motion_id, sentence.id, query.query_id,
                   query.evidence_type, std::move(*spans)};
}

std::vector<Candidate> brute_force_retrieve(std::span<const Sentence> corpus,
                                            const Query &query,
                                            const Motion &motion) {
  check_compatible(query, motion);
  std::vector<Candidate> out;
  for (const Sentence &sentence : corpus) {
    if (auto c = match_sentence(query, sentence, motion)) out.push_back(std::move(*c));
  }
  std::sort(out.begin(), out.end(), [](const Candidate &a, const Candidate &b) {
    return a.sentence_ref < b.sentence_ref;
  });
  return out;
}

}  // namespace evidencer
