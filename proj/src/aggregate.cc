#include <algorithm>
#include <map>

#include "evidencer/labeling.h"

namespace evidencer {

AggregationResult aggregate_labels(std::span<const LabelRecord> records,
                                   const std::set<std::string> &trusted,
                                   size_t min_trusted) {
  // pair -> annotator -> label; the first record per annotator counts.
  std::map<PairKey, std::map<std::string, bool>> votes;
  for (const LabelRecord &r : records) {
    auto &by_annotator = votes[r.pair];
    if (trusted.count(r.annotator_id)) by_annotator.emplace(r.annotator_id, r.positive);
  }
  AggregationResult result;
  for (const auto &[pair, by_annotator] : votes) {
    size_t pos = 0;
    for (const auto &[annotator, positive] : by_annotator) pos += positive;
    const size_t total = by_annotator.size();
    if (total < min_trusted) {
      result.under_labeled.push_back({pair, total});
      continue;
    }
    const size_t neg = total - pos;
    result.labels.push_back({pair, pos > neg, pos, neg, total});
  }
  return result;
}

bool DatasetSnapshot::contains(const PairKey &pair) const {
  return std::any_of(pairs.begin(), pairs.end(),
                     [&](const LabeledPair &p) { return p.pair == pair; });
}

double DatasetSnapshot::positive_fraction_of(size_t it) const {
  size_t total = 0, pos = 0;
  for (const LabeledPair &p : pairs) {
    if (p.iteration != it) continue;
    ++total;
    pos += p.gold;
  }
  return total == 0 ? 0.0 : static_cast<double>(pos) / static_cast<double>(total);
}

}  // namespace evidencer
