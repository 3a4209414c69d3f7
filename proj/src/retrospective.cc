#include <algorithm>
#include <map>

#include "evidencer/error.h"
#include "evidencer/labeling.h"

namespace evidencer {

namespace {

void RecomputeFraction(DatasetSnapshot &snapshot) {
  size_t pos = 0;
  for (const LabeledPair &p : snapshot.pairs) pos += p.gold;
  snapshot.positive_fraction =
      snapshot.pairs.empty() ? 0.0
                             : static_cast<double>(pos) / static_cast<double>(snapshot.pairs.size());
}

}  // namespace

DatasetSnapshot retrospective_iteration(std::span<const Candidate> pool, Scorer &scorer,
                                        const LoopConfig &config, AnnotationSource &source,
                                        const DatasetSnapshot &accumulated) {
  if (config.k == 0) throw Error(ErrorCode::kInvalidArgument, "k must be positive");

  std::set<PairKey> labeled;
  for (const LabeledPair &p : accumulated.pairs) labeled.insert(p.pair);
  std::vector<Candidate> fresh;
  std::set<PairKey> in_pool;
  for (const Candidate &c : pool) {
    PairKey key{c.motion_id, c.sentence_ref};
    if (labeled.count(key) || !in_pool.insert(key).second) continue;
    fresh.push_back(c);
  }

  DatasetSnapshot next = accumulated;
  next.iteration = accumulated.iteration + 1;
  next.warnings.clear();

  std::vector<ScoredCandidate> scored = score_batch(scorer, fresh);
  // Group key: motion, then evidence type (or a single bucket).
  std::map<std::pair<std::string, int>, std::vector<ScoredCandidate>> groups;
  for (ScoredCandidate &sc : scored) {
    int type = config.per_type ? static_cast<int>(sc.candidate.evidence_type) : -1;
    groups[{sc.candidate.motion_id, type}].push_back(std::move(sc));
  }
  std::vector<PairKey> selected;
  for (auto &[key, group] : groups) {
    sort_ranked(group);
    if (group.size() < config.k) {
      next.warnings.push_back("motion " + key.first + ": only " + std::to_string(group.size()) +
                              " unlabeled candidates for k=" + std::to_string(config.k));
    }
    for (size_t i = 0; i < group.size() && i < config.k; ++i) {
      selected.push_back({group[i].candidate.motion_id, group[i].candidate.sentence_ref});
    }
  }

  source.annotate(selected);
  const std::set<PairKey> wanted(selected.begin(), selected.end());
  AggregationResult aggregated;
  for (size_t round = 0;; ++round) {
    FilterResult filtered = filter_annotators(source.history(), config.filter);
    std::vector<LabelRecord> relevant;
    for (const LabelRecord &r : source.history()) {
      if (wanted.count(r.pair)) relevant.push_back(r);
    }
    aggregated = aggregate_labels(relevant, filtered.trusted, config.min_trusted);
    // Pairs nobody labeled at all are under-labeled too.
    std::set<PairKey> seen;
    for (const auto &l : aggregated.labels) seen.insert(l.pair);
    for (const auto &u : aggregated.under_labeled) seen.insert(u.pair);
    for (const PairKey &p : wanted) {
      if (!seen.count(p)) aggregated.under_labeled.push_back({p, 0});
    }
    std::sort(aggregated.under_labeled.begin(), aggregated.under_labeled.end(),
              [](const UnderLabeled &a, const UnderLabeled &b) { return a.pair < b.pair; });
    if (aggregated.under_labeled.empty() || round >= config.max_top_up_rounds) break;
    if (source.top_up(aggregated.under_labeled, filtered.trusted, config.min_trusted).empty()) {
      break;
    }
  }

  std::map<PairKey, bool> gold;
  for (const AggregatedLabel &l : aggregated.labels) gold.emplace(l.pair, l.gold);
  for (const PairKey &p : selected) {
    auto it = gold.find(p);
    if (it != gold.end()) next.pairs.push_back({next.iteration, p, it->second});
  }
  if (!aggregated.under_labeled.empty()) {
    next.warnings.push_back(std::to_string(aggregated.under_labeled.size()) +
                            " pairs stayed below the trusted-annotation floor");
  }
  RecomputeFraction(next);
  return next;
}

LoopResult run_loop_on_pool(std::span<const Candidate> pool, Scorer &bootstrap,
                            const ScorerTrainer &trainer, const LoopConfig &config,
                            size_t iterations, AnnotationSource &source) {
  if (iterations == 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  LoopResult result;
  DatasetSnapshot snapshot;
  Scorer *current = &bootstrap;
  for (size_t i = 0; i < iterations; ++i) {
    snapshot = retrospective_iteration(pool, *current, config, source, snapshot);
    result.snapshots.push_back(snapshot);
    result.final_scorer = trainer(snapshot, pool);
    current = result.final_scorer.get();
  }
  return result;
}

LoopResult run_loop(const SemanticIndex &index, const Cascade &study, const Cascade &expert,
                    std::span<const Motion> motions, Scorer &bootstrap,
                    const ScorerTrainer &trainer, const LoopConfig &config, size_t iterations,
                    AnnotationSource &source) {
  if (iterations == 0) throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  std::vector<Candidate> pool;
  for (const Motion &motion : motions) {
    for (Candidate &c : retrieve_for_motion(index, study, expert, motion)) {
      pool.push_back(std::move(c));
    }
  }
  return run_loop_on_pool(pool, bootstrap, trainer, config, iterations, source);
}

ScorerTrainer make_logistic_trainer(ScoringContext context, TrainConfig config) {
  return [context = std::move(context), config](const DatasetSnapshot &snapshot,
                                                std::span<const Candidate> pool)
             -> std::unique_ptr<Scorer> {
    std::map<PairKey, const Candidate *> by_pair;
    for (const Candidate &c : pool) by_pair.emplace(PairKey{c.motion_id, c.sentence_ref}, &c);
    std::vector<LabeledExample> data;
    for (const LabeledPair &p : snapshot.pairs) {
      auto it = by_pair.find(p.pair);
      if (it == by_pair.end()) continue;
      const Candidate &c = *it->second;
      data.push_back({extract_features(c, context.sentence_for(c), context.motion_for(c)), p.gold});
    }
    if (data.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "no labeled pairs to train on");
    }
    return std::make_unique<LogisticScorer>(train_logistic(data, config), context);
  };
}

}  // namespace evidencer
