#ifndef EVIDENCER_LABELING_H_
#define EVIDENCER_LABELING_H_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "evidencer/corpus.h"
#include "evidencer/query.h"
#include "evidencer/ranker.h"

namespace evidencer {

// A (motion, sentence) pair: the unit that gets labeled.
struct PairKey {
  std::string motion_id;
  SentenceId sentence;

  auto operator<=>(const PairKey &) const = default;
};

std::string to_string(const PairKey &pair);

struct LabelRecord {
  PairKey pair;
  std::string annotator_id;
  bool positive = false;

  bool operator==(const LabelRecord &) const = default;
};

// Cohen's kappa for two aligned binary label lists. If chance agreement is
// 1, returns 1 when observed agreement is 1 and 0 otherwise. Throws
// Error(kInvalidArgument) for empty or unequal-length input.
double cohen_kappa(std::span<const bool> a, std::span<const bool> b);

struct PairwiseAgreement {
  double kappa = 0.0;
  size_t common = 0;
};

struct AnnotatorReport {
  std::string annotator_id;
  // Only partners sharing at least min_common items.
  std::map<std::string, PairwiseAgreement> pairwise;
  // Weighted by common-item count over partners still trusted when the
  // annotator was last evaluated; empty when there were none.
  std::optional<double> weighted_avg_kappa;
  bool trusted = true;
};

inline constexpr size_t kDefaultMinCommon = 50;
inline constexpr double kDefaultMinKappa = 0.3;
inline constexpr size_t kDefaultMinTrusted = 7;

struct FilterOptions {
  size_t min_common = kDefaultMinCommon;
  double min_avg_kappa = kDefaultMinKappa;
  // 0 iterates to a fixed point; otherwise at most this many discard passes.
  size_t max_passes = 0;
  // Annotators without any qualifying partner stay trusted.
  bool trust_without_overlap = true;
};

struct FilterResult {
  std::set<std::string> trusted;
  std::vector<AnnotatorReport> reports;  // sorted by annotator_id
};

// Pairwise kappas over partners sharing >= min_common items, then repeated
// passes that discard every annotator whose weighted average kappa against
// the remaining annotators is below min_avg_kappa. If an annotator labels
// the same pair twice, the first record counts.
FilterResult filter_annotators(std::span<const LabelRecord> records,
                               const FilterOptions &options = {});

struct AggregatedLabel {
  PairKey pair;
  bool gold = false;
  size_t pos_count = 0;
  size_t neg_count = 0;
  size_t trusted_total = 0;
};

struct UnderLabeled {
  PairKey pair;
  size_t trusted_count = 0;
};

struct AggregationResult {
  std::vector<AggregatedLabel> labels;      // sorted by pair
  std::vector<UnderLabeled> under_labeled;  // sorted by pair
};

// Majority over trusted annotators' records; ties are negative. Pairs with
// fewer than min_trusted trusted records, including pairs only untrusted
// annotators labeled, are reported as under-labeled.
AggregationResult aggregate_labels(std::span<const LabelRecord> records,
                                   const std::set<std::string> &trusted,
                                   size_t min_trusted = kDefaultMinTrusted);

// Sum of kappa * common over trusted pairs, divided by the sum of common.
// Throws Error(kInvalidArgument) when no trusted pair qualifies.
double weighted_overall_kappa(std::span<const AnnotatorReport> reports);

struct LabeledPair {
  size_t iteration = 0;  // iteration that labeled the pair
  PairKey pair;
  bool gold = false;

  bool operator==(const LabeledPair &) const = default;
};

struct DatasetSnapshot {
  size_t iteration = 0;
  std::vector<LabeledPair> pairs;  // in labeling order
  double positive_fraction = 0.0;
  std::vector<std::string> warnings;

  bool contains(const PairKey &pair) const;
  // Positive fraction among pairs labeled in `iteration`; 0 when none.
  double positive_fraction_of(size_t iteration) const;
};

// Supplies annotations for pairs. history() holds every record produced so
// far; annotator filtering runs over all of it.
class AnnotationSource {
 public:
  virtual ~AnnotationSource() = default;
  virtual std::vector<LabelRecord> annotate(std::span<const PairKey> pairs) = 0;
  // Requests more labels for pairs below the trusted floor. Returns the new
  // records, or nothing when the source cannot provide more.
  virtual std::vector<LabelRecord> top_up(std::span<const UnderLabeled> pairs,
                                          const std::set<std::string> &trusted,
                                          size_t min_trusted) = 0;
  virtual const std::vector<LabelRecord> &history() const = 0;
};

struct OracleConfig {
  std::map<PairKey, bool> ground_truth;  // missing pairs are negative
  // One entry per simulated annotator; each in [0, 0.5).
  std::vector<double> noise_rates;
  size_t annotators_per_pair = 10;
  uint64_t seed = 0;
};

// Simulated crowd. Each pair goes to annotators_per_pair distinct annotators
// drawn from the pool; each flips the true label with its noise rate.
// Top-up draws annotators who have not yet labeled the pair.
class OracleAnnotators : public AnnotationSource {
 public:
  explicit OracleAnnotators(OracleConfig config);

  std::vector<LabelRecord> annotate(std::span<const PairKey> pairs) override;
  std::vector<LabelRecord> top_up(std::span<const UnderLabeled> pairs,
                                  const std::set<std::string> &trusted,
                                  size_t min_trusted) override;
  const std::vector<LabelRecord> &history() const override { return history_; }

  static std::string annotator_name(size_t i);

 private:
  LabelRecord label(const PairKey &pair, size_t annotator);

  OracleConfig config_;
  std::mt19937_64 rng_;
  std::map<PairKey, std::set<size_t>> used_;
  std::vector<LabelRecord> history_;
};

// Reads label records from a CSV file. Cannot top up: under-labeled pairs
// are appended to the needs-labels file instead.
class FileSource : public AnnotationSource {
 public:
  FileSource(const std::filesystem::path &labels, std::filesystem::path needs_labels);

  std::vector<LabelRecord> annotate(std::span<const PairKey> pairs) override;
  std::vector<LabelRecord> top_up(std::span<const UnderLabeled> pairs,
                                  const std::set<std::string> &trusted,
                                  size_t min_trusted) override;
  const std::vector<LabelRecord> &history() const override { return history_; }

 private:
  std::map<PairKey, std::vector<LabelRecord>> by_pair_;
  std::filesystem::path needs_labels_;
  std::vector<LabelRecord> history_;
};

inline constexpr size_t kDefaultTopK = 40;

struct LoopConfig {
  size_t k = kDefaultTopK;
  bool per_type = true;
  FilterOptions filter;
  size_t min_trusted = kDefaultMinTrusted;
  size_t max_top_up_rounds = 5;
};

// One round of retrospective labeling: score the unlabeled pool, take the
// top k per motion (and per evidence type when per_type), annotate, filter
// annotators, aggregate, and append the gold pairs.
DatasetSnapshot retrospective_iteration(std::span<const Candidate> pool, Scorer &scorer,
                                        const LoopConfig &config, AnnotationSource &source,
                                        const DatasetSnapshot &accumulated);

// Produces the scorer for the next iteration from the labels so far.
using ScorerTrainer = std::function<std::unique_ptr<Scorer>(
    const DatasetSnapshot &snapshot, std::span<const Candidate> pool)>;

struct LoopResult {
  std::vector<DatasetSnapshot> snapshots;  // one per iteration
  std::unique_ptr<Scorer> final_scorer;    // trained on the last snapshot
};

// Iteration 1 ranks with `bootstrap`; iteration i > 1 ranks with the scorer
// trained on snapshot i - 1. The trainer runs after every iteration. Throws
// Error(kInvalidArgument) when iterations is 0.
LoopResult run_loop_on_pool(std::span<const Candidate> pool, Scorer &bootstrap,
                            const ScorerTrainer &trainer, const LoopConfig &config,
                            size_t iterations, AnnotationSource &source);

// Retrieves the pool with both cascades for every motion, then runs the loop.
LoopResult run_loop(const SemanticIndex &index, const Cascade &study, const Cascade &expert,
                    std::span<const Motion> motions, Scorer &bootstrap,
                    const ScorerTrainer &trainer, const LoopConfig &config, size_t iterations,
                    AnnotationSource &source);

// Trainer that fits a logistic model on extract_features of the labeled pairs.
ScorerTrainer make_logistic_trainer(ScoringContext context, TrainConfig config = {});

}  // namespace evidencer

#endif  // EVIDENCER_LABELING_H_
