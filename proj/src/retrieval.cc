#include <algorithm>
#include <set>

#include "evidencer/annotator.h"
#include "evidencer/query.h"

namespace evidencer {

namespace {

bool HasPosting(std::span<const Posting> list, SentenceOrdinal sentence, uint32_t pos) {
  return std::binary_search(list.begin(), list.end(), Posting{sentence, pos, pos});
}

// Positions where the token sequence `phrase` occurs.
std::vector<Posting> PhrasePostings(const SemanticIndex &index,
                                    std::span<const std::string> phrase) {
  std::vector<Posting> out;
  if (phrase.empty()) return out;
  std::vector<std::span<const Posting>> lists;
  for (const std::string &tok : phrase) {
    lists.push_back(index.lookup(IndexKey::term(tok)));
    if (lists.back().empty()) return out;
  }
  const uint32_t len = static_cast<uint32_t>(phrase.size());
  for (const Posting &head : lists[0]) {
    bool ok = true;
    for (uint32_t k = 1; k < len && ok; ++k) {
      ok = HasPosting(lists[k], head.sentence, head.first + k);
    }
    if (ok) out.push_back({head.sentence, head.first, head.first + len - 1});
  }
  return out;
}

struct SlotPostings {
  std::vector<Posting> owned;
  std::span<const Posting> view;
};

SlotPostings PostingsFor(const SemanticIndex &index, const QuerySlot &slot,
                         const Motion &motion) {
  SlotPostings result;
  if (std::holds_alternative<TopicSlot>(slot)) {
    auto wiki = index.lookup(IndexKey::wiki(motion.topic));
    result.owned.assign(wiki.begin(), wiki.end());
    for (const std::string &form : motion.topic_surface_forms) {
      std::vector<std::string> phrase = split_phrase(form);
      for (const Posting &p : PhrasePostings(index, phrase)) result.owned.push_back(p);
    }
    std::sort(result.owned.begin(), result.owned.end());
    result.owned.erase(std::unique(result.owned.begin(), result.owned.end()),
                       result.owned.end());
    result.view = result.owned;
  } else if (std::holds_alternative<ActionSlot>(slot)) {
    if (motion.action) {
      std::vector<std::string> phrase = normalized_tokens(*motion.action);
      result.owned = PhrasePostings(index, phrase);
    }
    result.view = result.owned;
  } else if (const auto *lit = std::get_if<LiteralSlot>(&slot)) {
    result.view = index.lookup(IndexKey::term(lit->word));
  } else if (const auto *lex = std::get_if<LexiconSlot>(&slot)) {
    result.view = index.lookup(IndexKey::lexicon(lex->name));
  } else {
    result.view = index.lookup(IndexKey::entity(std::get<EntitySlot>(slot).kind));
  }
  return result;
}

std::span<const Posting> PostingsInSentence(std::span<const Posting> list,
                                            SentenceOrdinal sentence) {
  auto lo = std::lower_bound(list.begin(), list.end(), sentence,
                             [](const Posting &p, SentenceOrdinal s) { return p.sentence < s; });
  auto hi = std::upper_bound(lo, list.end(), sentence,
                             [](SentenceOrdinal s, const Posting &p) { return s < p.sentence; });
  return {lo, hi};
}

}  // namespace

std::vector<Candidate> retrieve_query(const SemanticIndex &index,
                                      const Query &query, const Motion &motion) {
  check_compatible(query, motion);
  std::vector<Candidate> out;
  if (query.slots.empty()) return out;

  std::vector<SlotPostings> per_slot;
  per_slot.reserve(query.slots.size());
  size_t smallest = 0;
  for (const QuerySlot &slot : query.slots) {
    per_slot.push_back(PostingsFor(index, slot, motion));
    if (per_slot.back().view.empty()) return out;
    if (per_slot.back().view.size() < per_slot[smallest].view.size()) {
      smallest = per_slot.size() - 1;
    }
  }

  std::vector<std::vector<TokenRange>> occurrences(query.slots.size());
  std::optional<SentenceOrdinal> last_seen;
  for (const Posting &driver : per_slot[smallest].view) {
    if (last_seen == driver.sentence) continue;
    last_seen = driver.sentence;
    bool everywhere = true;
    for (size_t s = 0; s < per_slot.size() && everywhere; ++s) {
      std::span<const Posting> here = PostingsInSentence(per_slot[s].view, driver.sentence);
      everywhere = !here.empty();
      occurrences[s].clear();
      for (const Posting &p : here) occurrences[s].push_back({p.first, p.last});
    }
    if (!everywhere) continue;
    auto spans = assign_slots(occurrences, query.max_gap);
    if (!spans) continue;
    out.push_back({motion.motion_id, index.sentence(driver.sentence).id,
                   query.query_id, query.evidence_type, std::move(*spans)});
  }
  return out;
}

std::vector<Candidate> execute_cascade(const SemanticIndex &index,
                                       const Cascade &cascade,
                                       const Motion &motion) {
  std::vector<Candidate> out;
  std::set<SentenceId> seen;
  for (const Query &query : cascade.queries) {
    if (out.size() >= cascade.cap) break;
    for (Candidate &c : retrieve_query(index, query, motion)) {
      if (!seen.insert(c.sentence_ref).second) continue;
      out.push_back(std::move(c));
      if (out.size() >= cascade.cap) break;
    }
  }
  return out;
}

std::vector<Candidate> retrieve_for_motion(const SemanticIndex &index,
                                           const Cascade &study,
                                           const Cascade &expert,
                                           const Motion &motion) {
  std::vector<Candidate> out = execute_cascade(index, study, motion);
  std::set<SentenceId> seen;
  for (const Candidate &c : out) seen.insert(c.sentence_ref);
  for (Candidate &c : execute_cascade(index, expert, motion)) {
    if (seen.insert(c.sentence_ref).second) out.push_back(std::move(c));
  }
  return out;
}

}  // namespace evidencer
