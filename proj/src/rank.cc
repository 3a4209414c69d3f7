#include <algorithm>
#include <map>

#include "evidencer/ranker.h"

namespace evidencer {

std::vector<ScoredCandidate> dedup_ranked(std::span<const ScoredCandidate> ranked,
                                          const ScoringContext &context,
                                          const std::set<std::string> &stop_words,
                                          double threshold) {
  std::vector<ScoredCandidate> out;
  std::map<std::string, std::vector<std::set<std::string>>> kept_by_motion;
  for (const ScoredCandidate &sc : ranked) {
    const Candidate &c = sc.candidate;
    std::set<std::string> words =
        content_tokens(context.sentence_for(c), context.motion_for(c), stop_words);
    auto &kept = kept_by_motion[c.motion_id];
    bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const auto &other) {
      return word_overlap(words, other) >= threshold;
    });
    if (duplicate) continue;
    kept.push_back(std::move(words));
    out.push_back(sc);
  }
  return out;
}

void sort_ranked(std::vector<ScoredCandidate> &ranked) {
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const ScoredCandidate &a, const ScoredCandidate &b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (a.candidate.sentence_ref != b.candidate.sentence_ref) {
                       return a.candidate.sentence_ref < b.candidate.sentence_ref;
                     }
                     return a.candidate.motion_id < b.candidate.motion_id;
                   });
}

std::vector<ScoredCandidate> rank(std::span<const Candidate> candidates, Scorer &scorer,
                                  const ScoringContext &context, const RankOptions &options) {
  std::vector<ScoredCandidate> ranked = score_batch(scorer, candidates);
  sort_ranked(ranked);
  if (!options.dedup) return ranked;
  return dedup_ranked(ranked, context, options.stop_words, options.dedup_threshold);
}

std::vector<BinaryLabel> binarize(std::span<const ScoredCandidate> scored, double threshold) {
  std::vector<BinaryLabel> out;
  out.reserve(scored.size());
  for (const ScoredCandidate &sc : scored) out.push_back({sc.candidate, sc.score >= threshold});
  return out;
}

}  // namespace evidencer
