#include <algorithm>
#include <map>
#include <memory>
#include <tuple>

#include "evidencer/error.h"
#include "evidencer/labeling.h"

namespace evidencer {

namespace {

using AnnotatorLabels = std::map<PairKey, bool>;

std::map<std::string, AnnotatorLabels> ByAnnotator(std::span<const LabelRecord> records) {
  std::map<std::string, AnnotatorLabels> out;
  for (const LabelRecord &r : records) out[r.annotator_id].emplace(r.pair, r.positive);
  return out;
}

std::optional<PairwiseAgreement> Agreement(const AnnotatorLabels &a, const AnnotatorLabels &b,
                                           size_t min_common) {
  const AnnotatorLabels &small = a.size() <= b.size() ? a : b;
  const AnnotatorLabels &large = a.size() <= b.size() ? b : a;
  std::vector<std::pair<bool, bool>> shared;
  for (const auto &[pair, label] : small) {
    auto it = large.find(pair);
    if (it != large.end()) shared.emplace_back(label, it->second);
  }
  const size_t n = shared.size();
  if (n < min_common || n == 0) return std::nullopt;
  // std::vector<bool> is not contiguous, so copy into plain arrays.
  auto la = std::make_unique<bool[]>(n);
  auto lb = std::make_unique<bool[]>(n);
  for (size_t i = 0; i < n; ++i) std::tie(la[i], lb[i]) = shared[i];
  return PairwiseAgreement{cohen_kappa({la.get(), n}, {lb.get(), n}), n};
}

std::optional<double> WeightedAverage(const AnnotatorReport &report,
                                      const std::set<std::string> &remaining) {
  double num = 0.0;
  double den = 0.0;
  for (const auto &[other, agreement] : report.pairwise) {
    if (!remaining.count(other)) continue;
    num += agreement.kappa * static_cast<double>(agreement.common);
    den += static_cast<double>(agreement.common);
  }
  if (den == 0.0) return std::nullopt;
  return num / den;
}

}  // namespace

std::string to_string(const PairKey &pair) {
  return pair.motion_id + "/" + to_string(pair.sentence);
}

double cohen_kappa(std::span<const bool> a, std::span<const bool> b) {
  if (a.empty() || a.size() != b.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "kappa needs two non-empty label lists of equal length");
  }
  // Integer counts keep the only rounding in the final division.
  const int64_t n = static_cast<int64_t>(a.size());
  int64_t agree = 0, a_pos = 0, b_pos = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i];
    a_pos += a[i];
    b_pos += b[i];
  }
  const int64_t chance = a_pos * b_pos + (n - a_pos) * (n - b_pos);  // p_e * n^2
  const int64_t n2 = n * n;
  if (chance == n2) return agree == n ? 1.0 : 0.0;
  return static_cast<double>(n * agree - chance) / static_cast<double>(n2 - chance);
}

FilterResult filter_annotators(std::span<const LabelRecord> records,
                               const FilterOptions &options) {
  const auto by_annotator = ByAnnotator(records);
  std::map<std::string, AnnotatorReport> reports;
  for (const auto &[id, labels] : by_annotator) reports[id].annotator_id = id;
  for (auto a = by_annotator.begin(); a != by_annotator.end(); ++a) {
    for (auto b = std::next(a); b != by_annotator.end(); ++b) {
      auto agreement = Agreement(a->second, b->second, options.min_common);
      if (!agreement) continue;
      reports[a->first].pairwise[b->first] = *agreement;
      reports[b->first].pairwise[a->first] = *agreement;
    }
  }

  std::set<std::string> remaining;
  for (const auto &[id, report] : reports) remaining.insert(id);
  size_t passes = 0;
  while (options.max_passes == 0 || passes < options.max_passes) {
    std::vector<std::string> discard;
    for (const std::string &id : remaining) {
      AnnotatorReport &report = reports[id];
      report.weighted_avg_kappa = WeightedAverage(report, remaining);
      bool keep = report.weighted_avg_kappa
                      ? *report.weighted_avg_kappa >= options.min_avg_kappa
                      : options.trust_without_overlap;
      if (!keep) discard.push_back(id);
    }
    ++passes;
    if (discard.empty()) break;
    for (const std::string &id : discard) {
      reports[id].trusted = false;
      remaining.erase(id);
    }
  }
  for (const std::string &id : remaining) {
    reports[id].weighted_avg_kappa = WeightedAverage(reports[id], remaining);
  }

  FilterResult result;
  result.trusted = remaining;
  for (auto &[id, report] : reports) result.reports.push_back(std::move(report));
  return result;
}

double weighted_overall_kappa(std::span<const AnnotatorReport> reports) {
  std::set<std::string> trusted;
  for (const AnnotatorReport &r : reports) {
    if (r.trusted) trusted.insert(r.annotator_id);
  }
  double num = 0.0;
  double den = 0.0;
  for (const AnnotatorReport &r : reports) {
    if (!r.trusted) continue;
    for (const auto &[other, agreement] : r.pairwise) {
      if (other <= r.annotator_id || !trusted.count(other)) continue;
      num += agreement.kappa * static_cast<double>(agreement.common);
      den += static_cast<double>(agreement.common);
    }
  }
  if (den == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "no qualifying pair of trusted annotators");
  }
  return num / den;
}

}  // namespace evidencer
