#ifndef EVIDENCER_RANKER_H_
#define EVIDENCER_RANKER_H_

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "evidencer/corpus.h"
#include "evidencer/index.h"
#include "evidencer/query.h"

namespace evidencer {

// Lexicon whose hits feed the topic-to-sentiment distance feature.
inline constexpr std::string_view kSentimentLexicon = "sentiment";

using FeatureVector = std::map<std::string, double>;

struct LogisticModel {
  double bias = 0.0;
  std::map<std::string, double> weights;

  LogisticModel negated() const;
  bool operator==(const LogisticModel &) const = default;
};

struct ScoredCandidate {
  Candidate candidate;
  double score = 0.0;  // in [0, 1]

  bool operator==(const ScoredCandidate &) const = default;
};

// Features, all deterministic:
//   lex:<name>       hit count per lexicon
//   ent:<kind>       entity count per kind
//   len:<bucket>     1 for the token-count bucket (0-9, 10-19, 20-39, 40+)
//   topic_pos:<b>    1 for where the first topic mention starts
//                    (start, middle, end, or none)
//   query:<id>       1 for the matched query, when the candidate has one
//   sentiment_gap    tokens between the topic and the nearest sentiment hit
FeatureVector extract_features(const Candidate &candidate, const Sentence &sentence,
                               const Motion &motion);

double sigmoid(double z);

// sigmoid(bias + sum of weight * value); absent features weigh zero.
double logistic_score(const LogisticModel &model, const FeatureVector &features);

struct LabeledExample {
  FeatureVector features;
  bool positive = false;
};

struct TrainConfig {
  double learning_rate = 1.0;
  size_t epochs = 300;
  double l2 = 1e-3;
};

// Mean cross-entropy plus (l2 / 2) * |w|^2. The bias is not regularized.
double logistic_loss(const LogisticModel &model, std::span<const LabeledExample> data,
                     double l2);
// Gradient of logistic_loss, laid out as a model: weights hold d/dw and bias
// holds d/db. Covers every feature present in `data` or `model`.
LogisticModel logistic_gradient(const LogisticModel &model,
                                std::span<const LabeledExample> data, double l2);

// Full-batch gradient descent from the zero model. A step that would raise
// the loss is halved until it does not, so the loss never increases across
// epochs. Throws Error(kInvalidArgument) on empty data.
LogisticModel train_logistic(std::span<const LabeledExample> data,
                             const TrainConfig &config,
                             std::vector<double> *loss_history = nullptr);

// Text model format: "bias <value>" followed by "<feature_id> <weight>" lines.
// Values are written in shortest round-trip form.
std::string format_model(const LogisticModel &model);
LogisticModel parse_model(std::istream &in);
void save_model(const LogisticModel &model, const std::filesystem::path &path);
LogisticModel load_model(const std::filesystem::path &path);

enum class InputVariant { kSentenceMotion, kMaskedSentenceMotion, kMaskedSentence };

// "S+M", "MaskS+M", "MaskS"
std::string_view to_string(InputVariant variant);
InputVariant parse_input_variant(std::string_view name);

// Gives scorers access to sentence text, annotations and motions.
struct ScoringContext {
  const SemanticIndex *index = nullptr;
  const std::map<std::string, Motion> *motions = nullptr;
  std::string mask_token = "[TOPIC]";

  // Throw Error(kInvalidArgument) for unknown sentences or motions.
  const Sentence &sentence_for(const Candidate &candidate) const;
  const Motion &motion_for(const Candidate &candidate) const;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  // One score per candidate, same order.
  virtual std::vector<double> score(std::span<const Candidate> candidates) = 0;
};

class LogisticScorer : public Scorer {
 public:
  LogisticScorer(LogisticModel model, ScoringContext context)
      : model_(std::move(model)), context_(std::move(context)) {}

  std::vector<double> score(std::span<const Candidate> candidates) override;
  const LogisticModel &model() const { return model_; }

 private:
  LogisticModel model_;
  ScoringContext context_;
};

struct ExternalScorerOptions {
  std::string command;  // run through /bin/sh -c
  InputVariant variant = InputVariant::kSentenceMotion;
  int timeout_ms = 30000;
};

// Talks to a scorer plugin over its stdin/stdout using the JSON-lines
// protocol described in docs/scorer_protocol.md. The connection is a serial
// request/response channel. Construction spawns the plugin and completes
// the handshake.
class ExternalScorer : public Scorer {
 public:
  ExternalScorer(ExternalScorerOptions options, ScoringContext context);
  ~ExternalScorer() override;

  ExternalScorer(const ExternalScorer &) = delete;
  ExternalScorer &operator=(const ExternalScorer &) = delete;

  std::vector<double> score(std::span<const Candidate> candidates) override;

  // Closes the plugin's input and waits for it to exit. Throws
  // Error(kProtocol) if it exits with a nonzero status.
  void close();

  const std::string &plugin_name() const { return plugin_name_; }

 private:
  void write_line(const std::string &line);
  std::string read_line();

  ExternalScorerOptions options_;
  ScoringContext context_;
  int fd_ = -1;
  int pid_ = -1;
  std::string buffer_;
  std::string plugin_name_;
};

struct BuiltinScorerSpec {
  LogisticModel model;
};

using ScorerSpec = std::variant<BuiltinScorerSpec, ExternalScorerOptions>;

std::unique_ptr<Scorer> make_scorer(const ScorerSpec &spec, const ScoringContext &context);

// Scores candidates, checking every score is finite and in [0, 1]. Throws
// Error(kProtocol) naming the offending record otherwise.
std::vector<ScoredCandidate> score_batch(Scorer &scorer,
                                         std::span<const Candidate> candidates);

// Bundled English stop-word list (150 words).
const std::set<std::string> &default_stop_words();
// One word per line; '#' comments allowed.
std::set<std::string> load_stop_words(const std::filesystem::path &path);

// Normalized word tokens minus stop words, minus tokens of the motion's
// topic surface forms, minus pure punctuation.
std::set<std::string> content_tokens(const Sentence &sentence, const Motion &motion,
                                     const std::set<std::string> &stop_words);

// |a ∩ b| / min(|a|, |b|); 0 when either set is empty.
double word_overlap(const std::set<std::string> &a, const std::set<std::string> &b);

inline constexpr double kDefaultDedupThreshold = 0.8;

// Greedy top-down pass over a list ranked by descending score: a candidate is
// dropped when its content tokens overlap those of a retained, higher-ranked
// candidate of the same motion by at least `threshold`.
std::vector<ScoredCandidate> dedup_ranked(std::span<const ScoredCandidate> ranked,
                                          const ScoringContext &context,
                                          const std::set<std::string> &stop_words,
                                          double threshold = kDefaultDedupThreshold);

struct RankOptions {
  bool dedup = false;
  double dedup_threshold = kDefaultDedupThreshold;
  std::set<std::string> stop_words = default_stop_words();
};

// Descending score, ties broken by ascending sentence_ref, then motion_id.
void sort_ranked(std::vector<ScoredCandidate> &ranked);

std::vector<ScoredCandidate> rank(std::span<const Candidate> candidates, Scorer &scorer,
                                  const ScoringContext &context,
                                  const RankOptions &options = {});

struct BinaryLabel {
  Candidate candidate;
  bool positive = false;
};

inline constexpr double kDefaultBinarizeThreshold = 0.5;

// Positive iff score >= threshold.
std::vector<BinaryLabel> binarize(std::span<const ScoredCandidate> scored,
                                  double threshold = kDefaultBinarizeThreshold);

}  // namespace evidencer

#endif  // EVIDENCER_RANKER_H_
