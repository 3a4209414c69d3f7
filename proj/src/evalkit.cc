#include "evidencer/evalkit.h"

#include <algorithm>
#include <cmath>
#include <set>

#include <boost/math/distributions/students_t.hpp>

#include "evidencer/error.h"
#include "evidencer/formats.h"

namespace evidencer {

namespace {

void CheckGrid(std::span<const size_t> ks) {
  for (size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] == 0 || (i > 0 && ks[i] <= ks[i - 1])) {
      throw Error(ErrorCode::kInvalidArgument, "k values must be positive and strictly increasing");
    }
  }
}

}  // namespace

PrecisionCurve precision_at_k(std::span<const ScoredCandidate> ranked,
                              const std::map<PairKey, bool> &gold, std::span<const size_t> ks) {
  CheckGrid(ks);
  PrecisionCurve curve;
  if (ks.empty()) return curve;
  const size_t max_k = ks.back();
  if (max_k > ranked.size()) {
    throw Error(ErrorCode::kInvalidArgument, "k=" + std::to_string(max_k) + " exceeds list of " +
                                                 std::to_string(ranked.size()));
  }
  std::vector<size_t> cumulative(max_k + 1, 0);
  std::string missing;
  for (size_t i = 0; i < max_k; ++i) {
    PairKey key{ranked[i].candidate.motion_id, ranked[i].candidate.sentence_ref};
    auto it = gold.find(key);
    if (it == gold.end()) {
      missing += (missing.empty() ? "" : ", ") + to_string(key);
      continue;
    }
    cumulative[i + 1] = cumulative[i] + (it->second ? 1 : 0);
  }
  if (!missing.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "missing gold labels: " + missing);
  }
  for (size_t k : ks) {
    curve.points.push_back({k, static_cast<double>(cumulative[k]) / static_cast<double>(k)});
  }
  return curve;
}

PrecisionCurve average_curves(std::span<const PrecisionCurve> curves) {
  if (curves.empty()) throw Error(ErrorCode::kInvalidArgument, "no curves to average");
  PrecisionCurve out = curves.front();
  for (size_t i = 0; i < out.points.size(); ++i) {
    double sum = 0.0;
    for (const PrecisionCurve &c : curves) {
      if (c.points.size() != out.points.size() || c.points[i].k != out.points[i].k) {
        throw Error(ErrorCode::kInvalidArgument, "curves have different k grids");
      }
      sum += c.points[i].precision;
    }
    out.points[i].precision = sum / static_cast<double>(curves.size());
  }
  for (const PrecisionCurve &c : curves) {
    if (c.points.size() != out.points.size()) {
      throw Error(ErrorCode::kInvalidArgument, "curves have different k grids");
    }
  }
  return out;
}

DiversityCurve diversity_at_k(std::span<const std::vector<Provenance>> lists,
                              std::span<const size_t> ks) {
  CheckGrid(ks);
  DiversityCurve curve;
  for (size_t k : ks) {
    double docs = 0.0, sources = 0.0;
    for (const auto &list : lists) {
      std::set<std::string_view> d, s;
      for (size_t i = 0; i < k && i < list.size(); ++i) {
        d.insert(list[i].doc_id);
        s.insert(list[i].source);
      }
      docs += static_cast<double>(d.size());
      sources += static_cast<double>(s.size());
    }
    double n = lists.empty() ? 1.0 : static_cast<double>(lists.size());
    curve.points.push_back({k, docs / n, sources / n});
  }
  return curve;
}

std::vector<Provenance> provenance_of(std::span<const ScoredCandidate> ranked,
                                      const SemanticIndex &index) {
  std::vector<Provenance> out;
  out.reserve(ranked.size());
  for (const ScoredCandidate &sc : ranked) {
    const std::string &doc = sc.candidate.sentence_ref.doc_id;
    out.push_back({doc, index.source_of(doc)});
  }
  return out;
}

std::map<std::string, std::vector<ScoredCandidate>> split_by_motion(
    std::span<const ScoredCandidate> ranked) {
  std::map<std::string, std::vector<ScoredCandidate>> out;
  for (const ScoredCandidate &sc : ranked) out[sc.candidate.motion_id].push_back(sc);
  return out;
}

WelchResult welch_t_test(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "welch test needs at least 2 values per sample");
  }
  auto moments = [](std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidArgument, "non-finite sample value");
      mean += v;
    }
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  auto [ma, va] = moments(a);
  auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  const double sa = va / na, sb = vb / nb;
  const double se2 = sa + sb;
  if (se2 == 0.0) {
    if (ma == mb) return {0.0, 1.0, na + nb - 2.0};
    throw Error(ErrorCode::kInvalidArgument, "both samples have zero variance");
  }
  WelchResult r;
  r.t = (ma - mb) / std::sqrt(se2);
  r.df = se2 * se2 / (sa * sa / (na - 1.0) + sb * sb / (nb - 1.0));
  boost::math::students_t dist(r.df);
  r.p = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t))));
  return r;
}

void emit_report(const PrecisionCurve &precision, const DiversityCurve &diversity,
                 const std::filesystem::path &dir, const std::string &model,
                 const std::string &corpus) {
  std::string p = "k,precision\n";
  for (const PrecisionPoint &pt : precision.points) {
    p += std::to_string(pt.k) + "," + formats::format_double(pt.precision) + "\n";
  }
  std::string d = "k,avg_docs,avg_sources\n";
  for (const DiversityPoint &pt : diversity.points) {
    d += std::to_string(pt.k) + "," + formats::format_double(pt.avg_docs) + "," +
         formats::format_double(pt.avg_sources) + "\n";
  }
  formats::write_text_file(dir / (model + "_" + corpus + "_precision.csv"), p);
  formats::write_text_file(dir / (model + "_" + corpus + "_diversity.csv"), d);
}

}  // namespace evidencer
