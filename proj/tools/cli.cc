#include "cli.h"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "evidencer/annotator.h"
#include "evidencer/error.h"
#include "evidencer/evalkit.h"
#include "evidencer/formats.h"
#include "evidencer/index.h"
#include "evidencer/labeling.h"
#include "evidencer/query.h"
#include "evidencer/ranker.h"
#include "json.hpp"

namespace evidencer::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct ScorerConfig {
  std::string type = "builtin";
  fs::path model;
  std::string command;
  InputVariant variant = InputVariant::kSentenceMotion;
  int timeout_ms = 30000;
};

struct OracleSettings {
  size_t annotators = 12;
  size_t per_pair = 10;
  double noise_min = 0.05;
  double noise_max = 0.25;
};

struct RunConfig {
  fs::path corpus, redirects, motions, index, out, reports;
  fs::path study_cascade, expert_cascade;
  fs::path person_gazetteer, organization_gazetteer;
  std::vector<fs::path> lexicons;
  fs::path labels, truth, stop_words;
  std::optional<size_t> cap;
  size_t k = kDefaultTopK;
  size_t iterations = 3;
  bool per_type = true;
  bool dedup = true;
  double dedup_threshold = kDefaultDedupThreshold;
  double binarize_threshold = kDefaultBinarizeThreshold;
  double min_kappa = kDefaultMinKappa;
  size_t min_common = kDefaultMinCommon;
  size_t min_trusted = kDefaultMinTrusted;
  size_t max_passes = 0;
  uint64_t seed = 0;
  std::string mask_token{kDefaultMaskToken};
  ScorerConfig scorer;
  OracleSettings oracle;
  std::vector<size_t> eval_ks = {1, 5, 10, 20, 40};
  std::string model_name = "model";
  std::string corpus_name = "corpus";
};

Error ConfigError(const std::string &msg) { return Error(ErrorCode::kConfig, msg); }

template <typename T>
T Get(const json &obj, const char *key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception &) {
    throw ConfigError(std::string("config field '") + key + "' has the wrong type");
  }
}

fs::path PathField(const json &obj, const char *key, const fs::path &base) {
  std::string p = Get<std::string>(obj, key, "");
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void CheckKeys(const json &obj, const std::set<std::string> &allowed, const std::string &where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto &[key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config field '" + key + "' in " + where);
  }
}

RunConfig LoadConfig(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path.string());
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config " + path.string() + " is not valid JSON");
  CheckKeys(j,
            {"corpus", "lexicons", "gazetteers", "redirects", "cascades", "motions", "index",
             "out", "reports", "labels", "truth", "stop_words", "cap", "k", "iterations",
             "per_type", "dedup", "thresholds", "seed", "mask_token", "scorer", "oracle", "eval"},
            "config");
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  RunConfig c;
  c.corpus = PathField(j, "corpus", base);
  c.redirects = PathField(j, "redirects", base);
  c.motions = PathField(j, "motions", base);
  c.index = PathField(j, "index", base);
  c.out = PathField(j, "out", base);
  c.reports = PathField(j, "reports", base);
  c.labels = PathField(j, "labels", base);
  c.truth = PathField(j, "truth", base);
  c.stop_words = PathField(j, "stop_words", base);
  if (c.out.empty()) c.out = base / "out";
  if (c.reports.empty()) c.reports = c.out / "reports";
  if (c.index.empty()) c.index = c.out / "index.evix";
  for (const std::string &p : Get<std::vector<std::string>>(j, "lexicons", {})) {
    c.lexicons.push_back(fs::path(p).is_absolute() ? fs::path(p) : base / p);
  }
  json gaz = Get<json>(j, "gazetteers", json::object());
  CheckKeys(gaz, {"person", "organization"}, "gazetteers");
  c.person_gazetteer = PathField(gaz, "person", base);
  c.organization_gazetteer = PathField(gaz, "organization", base);
  json cascades = Get<json>(j, "cascades", json::object());
  CheckKeys(cascades, {"study", "expert"}, "cascades");
  c.study_cascade = PathField(cascades, "study", base);
  c.expert_cascade = PathField(cascades, "expert", base);

  if (j.contains("cap")) c.cap = Get<size_t>(j, "cap", 0);
  c.k = Get<size_t>(j, "k", c.k);
  c.iterations = Get<size_t>(j, "iterations", c.iterations);
  c.per_type = Get<bool>(j, "per_type", c.per_type);
  c.dedup = Get<bool>(j, "dedup", c.dedup);
  c.seed = Get<uint64_t>(j, "seed", c.seed);
  c.mask_token = Get<std::string>(j, "mask_token", c.mask_token);

  json th = Get<json>(j, "thresholds", json::object());
  CheckKeys(th, {"dedup", "binarize", "kappa", "min_common", "min_trusted", "max_passes"},
            "thresholds");
  c.dedup_threshold = Get<double>(th, "dedup", c.dedup_threshold);
  c.binarize_threshold = Get<double>(th, "binarize", c.binarize_threshold);
  c.min_kappa = Get<double>(th, "kappa", c.min_kappa);
  c.min_common = Get<size_t>(th, "min_common", c.min_common);
  c.min_trusted = Get<size_t>(th, "min_trusted", c.min_trusted);
  c.max_passes = Get<size_t>(th, "max_passes", c.max_passes);

  json sc = Get<json>(j, "scorer", json::object());
  CheckKeys(sc, {"type", "model", "command", "variant", "timeout_ms"}, "scorer");
  c.scorer.type = Get<std::string>(sc, "type", c.scorer.type);
  c.scorer.model = PathField(sc, "model", base);
  c.scorer.command = Get<std::string>(sc, "command", "");
  c.scorer.timeout_ms = Get<int>(sc, "timeout_ms", c.scorer.timeout_ms);
  try {
    c.scorer.variant = parse_input_variant(Get<std::string>(sc, "variant", "S+M"));
  } catch (const Error &e) {
    throw ConfigError(e.what());
  }

  json oc = Get<json>(j, "oracle", json::object());
  CheckKeys(oc, {"annotators", "per_pair", "noise_min", "noise_max"}, "oracle");
  c.oracle.annotators = Get<size_t>(oc, "annotators", c.oracle.annotators);
  c.oracle.per_pair = Get<size_t>(oc, "per_pair", c.oracle.per_pair);
  c.oracle.noise_min = Get<double>(oc, "noise_min", c.oracle.noise_min);
  c.oracle.noise_max = Get<double>(oc, "noise_max", c.oracle.noise_max);

  json ev = Get<json>(j, "eval", json::object());
  CheckKeys(ev, {"ks", "model_name", "corpus_name"}, "eval");
  c.eval_ks = Get<std::vector<size_t>>(ev, "ks", c.eval_ks);
  c.model_name = Get<std::string>(ev, "model_name", c.model_name);
  c.corpus_name = Get<std::string>(ev, "corpus_name", c.corpus_name);
  return c;
}

void RequireFile(const fs::path &p, const std::string &what) {
  if (p.empty()) throw ConfigError(what + " is not configured");
  if (!fs::is_regular_file(p)) throw ConfigError(what + " not found: " + p.string());
}

// Range checks plus existence of every input file.
std::vector<std::string> Validate(const RunConfig &c) {
  std::vector<std::string> problems;
  auto check = [&](bool ok, const std::string &msg) {
    if (!ok) problems.push_back(msg);
  };
  check(c.dedup_threshold > 0.0 && c.dedup_threshold <= 1.0, "thresholds.dedup must be in (0, 1]");
  check(c.binarize_threshold >= 0.0 && c.binarize_threshold <= 1.0,
        "thresholds.binarize must be in [0, 1]");
  check(c.min_kappa >= -1.0 && c.min_kappa <= 1.0, "thresholds.kappa must be in [-1, 1]");
  check(c.min_common >= 1, "thresholds.min_common must be >= 1");
  check(c.min_trusted >= 1, "thresholds.min_trusted must be >= 1");
  check(c.k >= 1, "k must be >= 1");
  check(c.iterations >= 1, "iterations must be >= 1");
  check(!c.cap || *c.cap >= 1, "cap must be >= 1");
  check(!c.mask_token.empty(), "mask_token must not be empty");
  check(c.oracle.noise_min >= 0.0 && c.oracle.noise_max < 0.5 &&
            c.oracle.noise_min <= c.oracle.noise_max,
        "oracle noise must satisfy 0 <= noise_min <= noise_max < 0.5");
  check(c.oracle.per_pair >= 1 && c.oracle.per_pair <= c.oracle.annotators,
        "oracle.per_pair must be between 1 and oracle.annotators");
  check(c.scorer.type == "builtin" || c.scorer.type == "external",
        "scorer.type must be builtin or external");
  check(c.scorer.timeout_ms > 0, "scorer.timeout_ms must be positive");
  for (size_t i = 0; i < c.eval_ks.size(); ++i) {
    check(c.eval_ks[i] >= 1 && (i == 0 || c.eval_ks[i] > c.eval_ks[i - 1]),
          "eval.ks must be positive and strictly increasing");
  }
  auto file = [&](const fs::path &p, const std::string &what) {
    try {
      RequireFile(p, what);
    } catch (const Error &e) {
      problems.push_back(e.what());
    }
  };
  file(c.corpus, "corpus");
  file(c.redirects, "redirects");
  file(c.motions, "motions");
  file(c.study_cascade, "cascades.study");
  file(c.expert_cascade, "cascades.expert");
  file(c.person_gazetteer, "gazetteers.person");
  file(c.organization_gazetteer, "gazetteers.organization");
  for (const fs::path &p : c.lexicons) file(p, "lexicon");
  if (c.scorer.type == "builtin") file(c.scorer.model, "scorer.model");
  if (c.scorer.type == "external" && c.scorer.command.empty()) {
    problems.push_back("scorer.command is required for an external scorer");
  }
  if (!c.stop_words.empty()) file(c.stop_words, "stop_words");
  if (!c.labels.empty()) file(c.labels, "labels");
  if (!c.truth.empty()) file(c.truth, "truth");
  return problems;
}

AnnotationResources LoadResources(const RunConfig &c) {
  AnnotationResources r;
  for (const fs::path &p : c.lexicons) r.lexicons.push_back(Lexicon::load(p));
  if (!c.person_gazetteer.empty()) r.gazetteers.person = Lexicon::load(c.person_gazetteer);
  if (!c.organization_gazetteer.empty()) {
    r.gazetteers.organization = Lexicon::load(c.organization_gazetteer);
  }
  RequireFile(c.redirects, "redirects");
  r.redirects = RedirectTable::load(c.redirects);
  return r;
}

std::map<std::string, Motion> LoadMotions(const RunConfig &c, const RedirectTable &table) {
  RequireFile(c.motions, "motions");
  std::map<std::string, Motion> out;
  for (Motion &m : formats::read_motions(c.motions, table)) {
    std::string id = m.motion_id;
    if (!out.emplace(id, std::move(m)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate motion id " + id);
    }
  }
  return out;
}

Cascade LoadCascade(const RunConfig &c, const fs::path &path, EvidenceType expected) {
  RequireFile(path, "cascade");
  Cascade cascade = load_cascade(path);
  if (cascade.evidence_type != expected) {
    throw ConfigError("cascade " + path.string() + " is not a " +
                      std::string(to_string(expected)) + " cascade");
  }
  if (c.cap) cascade.cap = *c.cap;
  return cascade;
}

std::vector<std::string> Sorted(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  return v;
}

std::unique_ptr<Scorer> MakeScorer(const RunConfig &c, const ScoringContext &ctx) {
  if (c.scorer.type == "external") {
    return make_scorer(ExternalScorerOptions{c.scorer.command, c.scorer.variant, c.scorer.timeout_ms},
                       ctx);
  }
  RequireFile(c.scorer.model, "scorer.model");
  return make_scorer(BuiltinScorerSpec{load_model(c.scorer.model)}, ctx);
}

std::set<std::string> StopWords(const RunConfig &c) {
  return c.stop_words.empty() ? default_stop_words() : load_stop_words(c.stop_words);
}

FilterOptions Filter(const RunConfig &c) {
  FilterOptions f;
  f.min_common = c.min_common;
  f.min_avg_kappa = c.min_kappa;
  f.max_passes = c.max_passes;
  return f;
}

std::vector<double> NoiseRates(const OracleSettings &o) {
  std::vector<double> rates;
  for (size_t i = 0; i < o.annotators; ++i) {
    double t = o.annotators == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(o.annotators - 1);
    rates.push_back(o.noise_min + (o.noise_max - o.noise_min) * t);
  }
  return rates;
}

void PrintOverallKappa(std::ostream &out, std::span<const AnnotatorReport> reports) {
  std::string line;
  try {
    line = formats::format_double(weighted_overall_kappa(reports));
  } catch (const Error &) {
    line = "undefined (no annotator pair shares enough items)";
  }
  out << "overall kappa " << line << "\n";
}

fs::path OrDefault(const std::string &flag, const fs::path &fallback) {
  return flag.empty() ? fallback : fs::path(flag);
}

// Shared state for one invocation.
struct Session {
  std::string config_path;
  std::optional<uint64_t> seed_flag;
  std::string out_flag;
  RunConfig config;
  std::ostream *out = nullptr;

  void load() {
    if (config_path.empty()) throw ConfigError("--config is required");
    config = LoadConfig(config_path);
    if (seed_flag) {
      config.seed = *seed_flag;
    } else if (const char *env = std::getenv("EVIDENCER_SEED"); env && *env) {
      char *end = nullptr;
      unsigned long long v = std::strtoull(env, &end, 10);
      if (*end != '\0') throw ConfigError("EVIDENCER_SEED must be an unsigned integer");
      config.seed = v;
    }
    if (!out_flag.empty()) config.out = out_flag;
  }
};

void CmdIngest(Session &s) {
  RequireFile(s.config.corpus, "corpus");
  std::vector<Document> docs = read_corpus_file(s.config.corpus);
  std::string jsonl;
  size_t sentences = 0;
  for (const Document &d : docs) {
    for (const Sentence &sent : segment_sentences(d)) {
      json row = json::object();
      row["doc_id"] = sent.id.doc_id;
      row["sent_idx"] = sent.id.index;
      row["tokens"] = sent.tokens.size();
      row["text"] = sent.text;
      jsonl += row.dump() + "\n";
      ++sentences;
    }
  }
  formats::write_text_file(s.config.out / "sentences.jsonl", jsonl);
  *s.out << docs.size() << " documents, " << sentences << " sentences\n";
}

void CmdIndex(Session &s) {
  RequireFile(s.config.corpus, "corpus");
  AnnotationResources resources = LoadResources(s.config);
  IndexBuilder builder;
  for (const Document &d : read_corpus_file(s.config.corpus)) {
    builder.add_document(d);
    for (Sentence &sent : segment_sentences(d)) {
      annotate(sent, resources);
      builder.add(std::move(sent));
    }
  }
  SemanticIndex index = std::move(builder).finish();
  fs::create_directories(s.config.index.parent_path());
  save_index(index, s.config.index);
  *s.out << "indexed " << index.doc_count() << " documents, " << index.sentence_count()
         << " sentences, " << index.postings().size() << " keys -> " << s.config.index.string()
         << "\n";
}

std::vector<Candidate> Retrieve(const Session &s, const SemanticIndex &index,
                                const std::map<std::string, Motion> &motions,
                                const std::vector<std::string> &only) {
  Cascade study = LoadCascade(s.config, s.config.study_cascade, EvidenceType::kStudy);
  Cascade expert = LoadCascade(s.config, s.config.expert_cascade, EvidenceType::kExpert);
  std::vector<Candidate> all;
  for (const auto &[id, motion] : motions) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    for (Candidate &c : retrieve_for_motion(index, study, expert, motion)) all.push_back(std::move(c));
  }
  for (const std::string &id : only) {
    if (!motions.count(id)) throw Error(ErrorCode::kInvalidArgument, "unknown motion " + id);
  }
  return all;
}

void CmdRetrieve(Session &s, const std::vector<std::string> &only) {
  AnnotationResources resources = LoadResources(s.config);
  auto motions = LoadMotions(s.config, resources.redirects);
  SemanticIndex index = load_index(s.config.index);
  std::vector<Candidate> all = Retrieve(s, index, motions, Sorted(only));
  formats::write_text_file(s.config.out / "candidates.jsonl", formats::format_candidates(all));
  *s.out << all.size() << " candidates -> " << (s.config.out / "candidates.jsonl").string() << "\n";
}

void CmdRank(Session &s, const std::string &candidates_flag, bool no_dedup) {
  AnnotationResources resources = LoadResources(s.config);
  auto motions = LoadMotions(s.config, resources.redirects);
  SemanticIndex index = load_index(s.config.index);
  std::vector<Candidate> candidates =
      formats::read_candidates(OrDefault(candidates_flag, s.config.out / "candidates.jsonl"));
  ScoringContext ctx{&index, &motions, s.config.mask_token};
  std::unique_ptr<Scorer> scorer = MakeScorer(s.config, ctx);
  RankOptions options;
  options.dedup = s.config.dedup && !no_dedup;
  options.dedup_threshold = s.config.dedup_threshold;
  options.stop_words = StopWords(s.config);
  std::vector<ScoredCandidate> ranked = rank(candidates, *scorer, ctx, options);
  size_t positive = 0;
  for (const BinaryLabel &b : binarize(ranked, s.config.binarize_threshold)) positive += b.positive;
  formats::write_text_file(s.config.out / "ranking.csv", formats::format_ranking(ranked));
  *s.out << ranked.size() << " ranked (" << candidates.size() - ranked.size()
         << " near-duplicates removed), " << positive << " at or above "
         << formats::format_double(s.config.binarize_threshold) << " -> "
         << (s.config.out / "ranking.csv").string() << "\n";
}

void CmdLabelLoop(Session &s, std::optional<size_t> iterations, std::optional<size_t> k) {
  const RunConfig &c = s.config;
  AnnotationResources resources = LoadResources(c);
  auto motions = LoadMotions(c, resources.redirects);
  SemanticIndex index = load_index(c.index);
  std::vector<Candidate> pool = Retrieve(s, index, motions, {});
  ScoringContext ctx{&index, &motions, c.mask_token};
  std::unique_ptr<Scorer> bootstrap = MakeScorer(c, ctx);

  std::unique_ptr<AnnotationSource> source;
  if (!c.labels.empty()) {
    source = std::make_unique<FileSource>(c.labels, c.out / "needs_labels.csv");
    fs::remove(c.out / "needs_labels.csv");
  } else {
    RequireFile(c.truth, "truth (or labels)");
    OracleConfig oc;
    oc.ground_truth = formats::read_gold(c.truth);
    oc.noise_rates = NoiseRates(c.oracle);
    oc.annotators_per_pair = c.oracle.per_pair;
    oc.seed = c.seed;
    source = std::make_unique<OracleAnnotators>(std::move(oc));
  }
  LoopConfig lc;
  lc.k = k.value_or(c.k);
  lc.per_type = c.per_type;
  lc.filter = Filter(c);
  lc.min_trusted = c.min_trusted;
  LoopResult result = run_loop_on_pool(pool, *bootstrap, make_logistic_trainer(ctx), lc,
                                       iterations.value_or(c.iterations), *source);
  for (const DatasetSnapshot &snap : result.snapshots) {
    fs::path file = c.out / ("snapshot_" + std::to_string(snap.iteration) + ".csv");
    formats::write_text_file(file, formats::format_snapshot(snap));
    *s.out << "iteration " << snap.iteration << ": " << snap.pairs.size() << " pairs, new positive "
           << formats::format_double(snap.positive_fraction_of(snap.iteration)) << ", cumulative "
           << formats::format_double(snap.positive_fraction) << "\n";
    for (const std::string &w : snap.warnings) *s.out << "  warning: " << w << "\n";
  }
  formats::write_text_file(c.out / "label_records.csv",
                           formats::format_label_records(source->history()));
  if (auto *lr = dynamic_cast<LogisticScorer *>(result.final_scorer.get())) {
    save_model(lr->model(), c.out / "final.model");
  }
  FilterResult f = filter_annotators(source->history(), lc.filter);
  PrintOverallKappa(*s.out, f.reports);
}

void CmdAggregate(Session &s, const std::string &labels_flag) {
  const RunConfig &c = s.config;
  fs::path labels = OrDefault(labels_flag, c.labels);
  RequireFile(labels, "labels");
  std::vector<LabelRecord> records = formats::read_label_records(labels);
  FilterResult f = filter_annotators(records, Filter(c));
  AggregationResult agg = aggregate_labels(records, f.trusted, c.min_trusted);
  formats::write_text_file(c.out / "gold.csv", formats::format_gold(agg.labels));
  formats::write_text_file(c.out / "needs_labels.csv", formats::format_needs_labels(agg.under_labeled));
  std::string report = "annotator_id,weighted_avg_kappa,partners,trusted\n";
  for (const AnnotatorReport &r : f.reports) {
    report += formats::csv_join({r.annotator_id,
                                 r.weighted_avg_kappa ? formats::format_double(*r.weighted_avg_kappa) : "",
                                 std::to_string(r.pairwise.size()), r.trusted ? "yes" : "no"}) +
              "\n";
  }
  formats::write_text_file(c.out / "annotators.csv", report);
  *s.out << records.size() << " records, " << f.trusted.size() << "/" << f.reports.size()
         << " annotators trusted, " << agg.labels.size() << " gold labels, "
         << agg.under_labeled.size() << " pairs need more labels\n";
  PrintOverallKappa(*s.out, f.reports);
}

void CmdEval(Session &s, const std::string &ranking_flag, const std::string &gold_flag,
             const std::string &baseline_flag) {
  const RunConfig &c = s.config;
  SemanticIndex index = load_index(c.index);
  std::vector<ScoredCandidate> ranked =
      formats::read_ranking(OrDefault(ranking_flag, c.out / "ranking.csv"));
  fs::path gold_path = OrDefault(gold_flag, c.truth);
  RequireFile(gold_path, "gold labels");
  std::map<PairKey, bool> gold = formats::read_gold(gold_path);
  auto per_motion = split_by_motion(ranked);

  // Only k values every motion's list can support share one grid.
  size_t shortest = SIZE_MAX;
  for (const auto &[id, list] : per_motion) shortest = std::min(shortest, list.size());
  std::vector<size_t> ks;
  for (size_t k : c.eval_ks) {
    if (k <= shortest) {
      ks.push_back(k);
    } else {
      *s.out << "skipping k=" << k << ": a motion has only " << shortest << " ranked candidates\n";
    }
  }
  std::vector<PrecisionCurve> curves;
  std::vector<std::vector<Provenance>> provenance;
  for (const auto &[id, list] : per_motion) {
    curves.push_back(precision_at_k(list, gold, ks));
    provenance.push_back(provenance_of(list, index));
  }
  PrecisionCurve precision = curves.empty() ? PrecisionCurve{} : average_curves(curves);
  DiversityCurve diversity = diversity_at_k(provenance, ks);
  emit_report(precision, diversity, c.reports, c.model_name, c.corpus_name);
  for (const PrecisionPoint &p : precision.points) {
    *s.out << "P@" << p.k << " = " << formats::format_double(p.precision) << "\n";
  }
  if (!baseline_flag.empty() && !ks.empty()) {
    auto other = split_by_motion(formats::read_ranking(baseline_flag));
    std::vector<double> a, b;
    const size_t k = ks.back();
    for (const auto &[id, list] : per_motion) {
      for (size_t i = 0; i < k && i < list.size(); ++i) a.push_back(list[i].score);
    }
    for (const auto &[id, list] : other) {
      for (size_t i = 0; i < k && i < list.size(); ++i) b.push_back(list[i].score);
    }
    WelchResult w = welch_t_test(a, b);
    *s.out << "welch top-" << k << ": t = " << formats::format_double(w.t)
           << ", p = " << formats::format_double(w.p) << ", df = " << formats::format_double(w.df)
           << "\n";
  }
  *s.out << "reports -> " << c.reports.string() << "\n";
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
      return kConfigError;
    case ErrorCode::kIo:
      return kIoError;
    case ErrorCode::kParse:
      return kParseError;
    case ErrorCode::kInvalidArgument:
      return kInvalidInput;
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kTruncated:
    case ErrorCode::kChecksum:
      return kIndexFormat;
    case ErrorCode::kProtocol:
    case ErrorCode::kTimeout:
      return kScorerError;
  }
  return kInternal;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Sentence-level evidence retrieval: index a corpus, retrieve candidate evidence "
               "for motions, rank it, and grow a labeled dataset."};
  app.name("evidencer");
  app.require_subcommand(1);
  app.fallthrough();
  Session session;
  session.out = &out;
  app.add_option("-c,--config", session.config_path, "Run configuration (JSON)");
  app.add_option("--seed", session.seed_flag,
                 "Seed for every random choice; falls back to EVIDENCER_SEED, then the config");
  app.add_option("-o,--out", session.out_flag, "Output directory (overrides config 'out')");

  auto *ingest = app.add_subcommand("ingest", "Segment and tokenize the corpus into sentences.jsonl");
  auto *index = app.add_subcommand("index", "Annotate the corpus and write the binary index");

  std::vector<std::string> motions;
  auto *retrieve = app.add_subcommand("retrieve", "Run both cascades and write candidates.jsonl");
  retrieve->add_option("-m,--motion", motions, "Motion id to retrieve for (repeatable; default all)");

  std::string candidates;
  bool no_dedup = false;
  auto *rank_cmd = app.add_subcommand("rank", "Score, sort and deduplicate candidates into ranking.csv");
  rank_cmd->add_option("--candidates", candidates, "Candidate file (default <out>/candidates.jsonl)");
  rank_cmd->add_flag("--no-dedup", no_dedup, "Keep near-duplicate sentences");

  std::optional<size_t> iterations, k;
  auto *loop = app.add_subcommand(
      "label-loop", "Retrospective labeling: label the top k, retrain, repeat; writes snapshots");
  loop->add_option("--iterations", iterations, "Number of iterations (default from config)");
  loop->add_option("-k", k, "Candidates labeled per motion and evidence type");

  std::string labels;
  auto *aggregate = app.add_subcommand(
      "aggregate-labels", "Filter annotators by agreement and write majority gold labels");
  aggregate->add_option("--labels", labels, "Label records CSV (default config 'labels')");

  std::string ranking, gold, baseline;
  auto *eval = app.add_subcommand("eval", "Precision@k and diversity reports for a ranking");
  eval->add_option("--ranking", ranking, "Ranking CSV (default <out>/ranking.csv)");
  eval->add_option("--gold", gold, "Gold labels or snapshot CSV (default config 'truth')");
  eval->add_option("--baseline", baseline, "Second ranking; compares top-k scores by Welch t-test");

  auto *validate = app.add_subcommand("validate-config", "Check ranges and input files");

  for (CLI::App *sub : app.get_subcommands({})) {
    sub->footer(
        "Global options (before or after the subcommand):\n"
        "  -c,--config FILE   run configuration (JSON); paths resolve against its directory\n"
        "  --seed N           seed for all randomness; else EVIDENCER_SEED, else config 'seed'\n"
        "  -o,--out DIR       output directory, overriding config 'out'");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    session.load();
    if (validate->parsed()) {
      auto problems = Validate(session.config);
      for (const std::string &p : problems) err << "config: " << p << "\n";
      if (!problems.empty()) return kConfigError;
      out << "config ok\n";
    } else if (ingest->parsed()) {
      CmdIngest(session);
    } else if (index->parsed()) {
      CmdIndex(session);
    } else if (retrieve->parsed()) {
      CmdRetrieve(session, motions);
    } else if (rank_cmd->parsed()) {
      CmdRank(session, candidates, no_dedup);
    } else if (loop->parsed()) {
      CmdLabelLoop(session, iterations, k);
    } else if (aggregate->parsed()) {
      CmdAggregate(session, labels);
    } else if (eval->parsed()) {
      CmdEval(session, ranking, gold, baseline);
    }
  } catch (const Error &e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return StatusFor(e.code());
  } catch (const fs::filesystem_error &e) {
    err << "error [io]: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception &e) {
    err << "error [internal]: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}

}  // namespace evidencer::cli
