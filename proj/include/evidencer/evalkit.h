#ifndef EVIDENCER_EVALKIT_H_
#define EVIDENCER_EVALKIT_H_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "evidencer/index.h"
#include "evidencer/labeling.h"
#include "evidencer/ranker.h"

namespace evidencer {

struct PrecisionPoint {
  size_t k = 0;
  double precision = 0.0;

  bool operator==(const PrecisionPoint &) const = default;
};

struct PrecisionCurve {
  std::vector<PrecisionPoint> points;  // k strictly increasing

  bool operator==(const PrecisionCurve &) const = default;
};

// Precision over labeled prefixes of a single motion's ranked list. ks must
// be positive and strictly increasing. Throws Error(kInvalidArgument) when a
// k exceeds the list or a pair in the top max(ks) has no gold label; the
// message lists the missing pairs.
PrecisionCurve precision_at_k(std::span<const ScoredCandidate> ranked,
                              const std::map<PairKey, bool> &gold, std::span<const size_t> ks);

// Pointwise mean. Throws Error(kInvalidArgument) for an empty list or
// mismatched k grids.
PrecisionCurve average_curves(std::span<const PrecisionCurve> curves);

struct DiversityPoint {
  size_t k = 0;
  double avg_docs = 0.0;
  double avg_sources = 0.0;

  bool operator==(const DiversityPoint &) const = default;
};

struct DiversityCurve {
  std::vector<DiversityPoint> points;

  bool operator==(const DiversityCurve &) const = default;
};

struct Provenance {
  std::string doc_id;
  std::string source;
};

// Distinct documents and sources among the top k of each list, averaged
// over lists. Lists shorter than k contribute their whole length.
DiversityCurve diversity_at_k(std::span<const std::vector<Provenance>> lists,
                              std::span<const size_t> ks);

std::vector<Provenance> provenance_of(std::span<const ScoredCandidate> ranked,
                                      const SemanticIndex &index);

// Splits a ranked list into per-motion lists, keeping relative order.
std::map<std::string, std::vector<ScoredCandidate>> split_by_motion(
    std::span<const ScoredCandidate> ranked);

struct WelchResult {
  double t = 0.0;
  double p = 1.0;
  double df = 0.0;
};

// Two-sided Welch t-test. Throws Error(kInvalidArgument) when a sample has
// fewer than 2 values or a value is not finite. Two constant samples give
// t = 0, p = 1 when their means agree and throw otherwise.
WelchResult welch_t_test(std::span<const double> a, std::span<const double> b);

// Writes <model>_<corpus>_precision.csv (k,precision) and
// <model>_<corpus>_diversity.csv (k,avg_docs,avg_sources) under dir.
void emit_report(const PrecisionCurve &precision, const DiversityCurve &diversity,
                 const std::filesystem::path &dir, const std::string &model,
                 const std::string &corpus);

}  // namespace evidencer

#endif  // EVIDENCER_EVALKIT_H_
