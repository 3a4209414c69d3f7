#include <algorithm>
#include <cstdio>
#include <fstream>

#include "evidencer/error.h"
#include "evidencer/formats.h"
#include "evidencer/labeling.h"

namespace evidencer {

OracleAnnotators::OracleAnnotators(OracleConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  if (config_.noise_rates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "oracle needs at least one annotator");
  }
  for (double rate : config_.noise_rates) {
    if (!(rate >= 0.0 && rate < 0.5)) {
      throw Error(ErrorCode::kInvalidArgument, "annotator noise rate must be in [0, 0.5)");
    }
  }
  if (config_.annotators_per_pair == 0 ||
      config_.annotators_per_pair > config_.noise_rates.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "annotators_per_pair must be between 1 and the pool size");
  }
}

std::string OracleAnnotators::annotator_name(size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "sim%03zu", i);
  return buf;
}

LabelRecord OracleAnnotators::label(const PairKey &pair, size_t annotator) {
  auto it = config_.ground_truth.find(pair);
  bool truth = it != config_.ground_truth.end() && it->second;
  bool flip = std::bernoulli_distribution(config_.noise_rates[annotator])(rng_);
  used_[pair].insert(annotator);
  LabelRecord record{pair, annotator_name(annotator), truth != flip};
  history_.push_back(record);
  return record;
}

std::vector<LabelRecord> OracleAnnotators::annotate(std::span<const PairKey> pairs) {
  std::vector<LabelRecord> out;
  const size_t pool = config_.noise_rates.size();
  std::vector<size_t> order(pool);
  for (const PairKey &pair : pairs) {
    const std::set<size_t> &used = used_[pair];
    order.clear();
    for (size_t a = 0; a < pool; ++a) {
      if (!used.count(a)) order.push_back(a);
    }
    std::shuffle(order.begin(), order.end(), rng_);
    order.resize(std::min(order.size(), config_.annotators_per_pair));
    std::sort(order.begin(), order.end());
    for (size_t a : order) out.push_back(label(pair, a));
  }
  return out;
}

std::vector<LabelRecord> OracleAnnotators::top_up(std::span<const UnderLabeled> pairs,
                                                  const std::set<std::string> &trusted,
                                                  size_t min_trusted) {
  std::vector<LabelRecord> out;
  const size_t pool = config_.noise_rates.size();
  for (const UnderLabeled &u : pairs) {
    if (u.trusted_count >= min_trusted) continue;
    size_t need = min_trusted - u.trusted_count;
    const std::set<size_t> &used = used_[u.pair];
    // Trusted annotators first, then anyone not yet asked, each group shuffled.
    std::vector<size_t> preferred, others;
    for (size_t a = 0; a < pool; ++a) {
      if (used.count(a)) continue;
      (trusted.count(annotator_name(a)) ? preferred : others).push_back(a);
    }
    std::shuffle(preferred.begin(), preferred.end(), rng_);
    std::shuffle(others.begin(), others.end(), rng_);
    preferred.insert(preferred.end(), others.begin(), others.end());
    preferred.resize(std::min(preferred.size(), need));
    for (size_t a : preferred) out.push_back(label(u.pair, a));
  }
  return out;
}

FileSource::FileSource(const std::filesystem::path &labels,
                       std::filesystem::path needs_labels)
    : needs_labels_(std::move(needs_labels)) {
  for (LabelRecord &r : formats::read_label_records(labels)) {
    PairKey key = r.pair;
    by_pair_[key].push_back(std::move(r));
  }
}

std::vector<LabelRecord> FileSource::annotate(std::span<const PairKey> pairs) {
  std::vector<LabelRecord> out;
  for (const PairKey &pair : pairs) {
    auto it = by_pair_.find(pair);
    if (it == by_pair_.end()) continue;
    for (const LabelRecord &r : it->second) {
      out.push_back(r);
      history_.push_back(r);
    }
    by_pair_.erase(it);
  }
  return out;
}

std::vector<LabelRecord> FileSource::top_up(std::span<const UnderLabeled> pairs,
                                            const std::set<std::string> &,
                                            size_t) {
  if (!needs_labels_.empty()) {
    bool exists = std::filesystem::exists(needs_labels_);
    std::string text = formats::format_needs_labels(pairs);
    if (exists) text = text.substr(text.find('\n') + 1);  // header already there
    std::ofstream out(needs_labels_, std::ios::app);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + needs_labels_.string());
    out << text;
  }
  return {};
}

}  // namespace evidencer
