#include <algorithm>
#include <fstream>

#include "evidencer/annotator.h"
#include "evidencer/error.h"
#include "evidencer/ranker.h"
#include "evidencer/text.h"

namespace evidencer {

namespace {

std::string LengthBucket(size_t tokens) {
  if (tokens < 10) return "0-9";
  if (tokens < 20) return "10-19";
  if (tokens < 40) return "20-39";
  return "40+";
}

std::string PositionBucket(uint32_t first, size_t tokens) {
  // Thirds of the sentence, by token index.
  if (3 * static_cast<size_t>(first) < tokens) return "start";
  if (3 * static_cast<size_t>(first) < 2 * tokens) return "middle";
  return "end";
}

uint32_t TokensBetween(TokenRange a, TokenRange b) {
  if (a.last < b.first) return b.first - a.last - 1;
  if (b.last < a.first) return a.first - b.last - 1;
  return 0;
}

}  // namespace

FeatureVector extract_features(const Candidate &candidate, const Sentence &sentence,
                               const Motion &motion) {
  FeatureVector fv;
  std::vector<TokenRange> sentiment_hits;
  for (const AnnotationSpan &span : sentence.annotations) {
    if (const auto *hit = std::get_if<LexiconHit>(&span.role)) {
      fv["lex:" + hit->lexicon] += 1.0;
      if (hit->lexicon == kSentimentLexicon) sentiment_hits.push_back(span.range);
    } else if (const auto *ne = std::get_if<NamedEntity>(&span.role)) {
      fv["ent:" + std::string(to_string(ne->kind))] += 1.0;
    }
  }
  const size_t n = sentence.tokens.size();
  fv["len:" + LengthBucket(n)] = 1.0;

  std::vector<TokenRange> topic = topic_occurrences(sentence, motion);
  fv["topic_pos:" + (topic.empty() ? std::string("none") : PositionBucket(topic[0].first, n))] =
      1.0;

  if (!candidate.query_id.empty()) fv["query:" + candidate.query_id] = 1.0;

  if (!topic.empty() && !sentiment_hits.empty()) {
    uint32_t best = UINT32_MAX;
    for (TokenRange t : topic) {
      for (TokenRange s : sentiment_hits) best = std::min(best, TokensBetween(t, s));
    }
    fv["sentiment_gap"] = best;
  }
  return fv;
}

const std::set<std::string> &default_stop_words() {
  static const std::set<std::string> kWords = {
      "a",       "about",   "above",   "after",   "again",   "against", "all",
      "also",    "am",      "an",      "and",     "any",     "are",     "as",
      "at",      "be",      "because", "been",    "before",  "being",   "below",
      "between", "both",    "but",     "by",      "can",     "could",   "did",
      "do",      "does",    "doing",   "down",    "during",  "each",    "even",
      "ever",    "few",     "for",     "from",    "further", "had",     "has",
      "have",    "having",  "he",      "her",     "here",    "hers",    "herself",
      "him",     "himself", "his",     "how",     "however", "i",       "if",
      "in",      "into",    "is",      "it",      "its",     "itself",  "just",
      "may",     "me",      "might",   "more",    "most",    "much",    "must",
      "my",      "myself",  "no",      "nor",     "not",     "now",     "of",
      "off",     "on",      "once",    "one",     "only",    "or",      "other",
      "our",     "ours",    "ourselves", "out",   "over",    "own",     "same",
      "shall",   "she",     "should",  "so",      "some",    "such",    "than",
      "that",    "the",     "their",   "theirs",  "them",    "themselves", "then",
      "there",   "these",   "they",    "this",    "those",   "through", "to",
      "too",     "under",   "until",   "up",      "upon",    "us",      "very",
      "was",     "we",      "were",    "what",    "when",    "where",   "whether",
      "which",   "while",   "who",     "whom",    "whose",   "why",     "will",
      "with",    "within",  "without", "would",   "yet",     "you",     "your",
      "yours",   "yourself", "yourselves", "said", "says",   "many",    "every",
      "another", "either",  "neither",
  };
  return kWords;
}

std::set<std::string> load_stop_words(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open stop-word list " + path.string());
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::string norm = normalize_phrase(line);
    if (norm.empty() || norm[0] == '#') continue;
    words.insert(std::move(norm));
  }
  return words;
}

std::set<std::string> content_tokens(const Sentence &sentence, const Motion &motion,
                                     const std::set<std::string> &stop_words) {
  std::set<std::string> topic_tokens;
  for (const std::string &form : motion.topic_surface_forms) {
    for (std::string &tok : split_phrase(form)) topic_tokens.insert(std::move(tok));
  }
  std::set<std::string> out;
  for (const Token &t : sentence.tokens) {
    if (stop_words.count(t.normalized) || topic_tokens.count(t.normalized)) continue;
    if (!text::has_alnum(t.normalized)) continue;
    out.insert(t.normalized);
  }
  return out;
}

double word_overlap(const std::set<std::string> &a, const std::set<std::string> &b) {
  if (a.empty() || b.empty()) return 0.0;
  size_t common = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++common;
      ++ia;
      ++ib;
    }
  }
  return static_cast<double>(common) / static_cast<double>(std::min(a.size(), b.size()));
}

}  // namespace evidencer
