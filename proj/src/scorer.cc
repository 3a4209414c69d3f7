#include <cmath>

#include "evidencer/error.h"
#include "evidencer/ranker.h"

namespace evidencer {

std::string_view to_string(InputVariant variant) {
  switch (variant) {
    case InputVariant::kSentenceMotion: return "S+M";
    case InputVariant::kMaskedSentenceMotion: return "MaskS+M";
    case InputVariant::kMaskedSentence: return "MaskS";
  }
  return "S+M";
}

InputVariant parse_input_variant(std::string_view name) {
  if (name == "S+M") return InputVariant::kSentenceMotion;
  if (name == "MaskS+M") return InputVariant::kMaskedSentenceMotion;
  if (name == "MaskS") return InputVariant::kMaskedSentence;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown input variant '" + std::string(name) + "' (S+M, MaskS+M, MaskS)");
}

const Sentence &ScoringContext::sentence_for(const Candidate &candidate) const {
  const Sentence *s = index ? index->find(candidate.sentence_ref) : nullptr;
  if (!s) {
    throw Error(ErrorCode::kInvalidArgument,
                "sentence " + to_string(candidate.sentence_ref) + " is not in the index");
  }
  return *s;
}

const Motion &ScoringContext::motion_for(const Candidate &candidate) const {
  if (motions) {
    auto it = motions->find(candidate.motion_id);
    if (it != motions->end()) return it->second;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown motion '" + candidate.motion_id + "'");
}

std::vector<double> LogisticScorer::score(std::span<const Candidate> candidates) {
  std::vector<double> out;
  out.reserve(candidates.size());
  for (const Candidate &c : candidates) {
    FeatureVector fv =
        extract_features(c, context_.sentence_for(c), context_.motion_for(c));
    out.push_back(logistic_score(model_, fv));
  }
  return out;
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec &spec, const ScoringContext &context) {
  if (const auto *builtin = std::get_if<BuiltinScorerSpec>(&spec)) {
    return std::make_unique<LogisticScorer>(builtin->model, context);
  }
  return std::make_unique<ExternalScorer>(std::get<ExternalScorerOptions>(spec), context);
}

std::vector<ScoredCandidate> score_batch(Scorer &scorer, std::span<const Candidate> candidates) {
  std::vector<double> scores = scorer.score(candidates);
  if (scores.size() != candidates.size()) {
    throw Error(ErrorCode::kProtocol, "scorer returned " + std::to_string(scores.size()) +
                                          " scores for " + std::to_string(candidates.size()) +
                                          " candidates");
  }
  std::vector<ScoredCandidate> out;
  out.reserve(candidates.size());
  for (size_t i = 0; i < candidates.size(); ++i) {
    double s = scores[i];
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
      throw Error(ErrorCode::kProtocol, "invalid score for record " +
                                            to_string(candidates[i].sentence_ref) + "@" +
                                            candidates[i].motion_id);
    }
    out.push_back({candidates[i], s});
  }
  return out;
}

}  // namespace evidencer
