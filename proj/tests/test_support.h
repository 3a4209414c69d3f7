#ifndef EVIDENCER_TESTS_TEST_SUPPORT_H_
#define EVIDENCER_TESTS_TEST_SUPPORT_H_

#include <unistd.h>

#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "evidencer/annotator.h"
#include "evidencer/corpus.h"
#include "evidencer/index.h"
#include "evidencer/query.h"

namespace evidencer::testing {

inline Lexicon make_lexicon(const std::string &name, std::vector<std::string> terms) {
  return Lexicon(name, terms);
}

// Small resource set around the gambling and capital punishment examples.
inline AnnotationResources example_resources() {
  AnnotationResources r;
  r.lexicons.push_back(make_lexicon("study", {"research", "study", "survey", "analysis"}));
  r.lexicons.push_back(make_lexicon("expert", {"professor", "expert", "said", "according to"}));
  r.lexicons.push_back(
      make_lexicon("sentiment", {"harm", "risk", "danger", "benefit", "aggression", "deter"}));
  r.gazetteers.person = make_lexicon("person", {"John Smith", "Mary Jones"});
  r.gazetteers.organization =
      make_lexicon("organization", {"University of Glasgow", "Healthy Stadia"});
  r.redirects.add("gambling", "Gambling");
  r.redirects.add("betting", "Gambling");
  r.redirects.add("online gambling", "Online gambling");
  r.redirects.add("death penalty", "Capital punishment");
  r.redirects.add("execution", "Capital punishment");
  r.redirects.add("video games", "Video game");
  r.redirects.add("violent video games", "Video game controversies");
  return r;
}

inline Sentence make_sentence(const std::string &doc, uint32_t index, const std::string &text,
                              const AnnotationResources &resources) {
  Sentence s;
  s.id = {doc, index};
  s.text = text;
  s.tokens = tokenize(text);
  annotate(s, resources);
  return s;
}

inline const char *kGamblingSentence =
    "The University of Glasgow and Healthy Stadia research warns that gambling is a public "
    "health issue with potential for harm";

inline Query study_example_query() {
  return parse_query("study: lex(study) \"that\" TOPIC lex(sentiment)", "study-1");
}

// Random corpora over a tiny vocabulary so that matches are frequent and
// topic surface forms overlap with longer wiki keys.
class SyntheticCorpus {
 public:
  explicit SyntheticCorpus(uint64_t seed) : rng_(seed) {}

  std::vector<Sentence> sentences(size_t n, const AnnotationResources &resources) {
    static const std::vector<std::string> vocab = {
        "gambling", "betting", "online", "research", "study", "that", "shows", "harm",
        "risk",     "the",     "of",     "ban",      "advertising", "professor", "said",
        "12",       "three",   "percent", "%",       "John", "Smith", "execution", "death",
        "penalty",  "is",      "a",      "benefit",  "survey", ",", "video", "games"};
    std::uniform_int_distribution<size_t> len(1, 14);
    std::uniform_int_distribution<size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<int> docs(0, 9);
    std::vector<Sentence> out;
    std::map<std::string, uint32_t> next;
    for (size_t i = 0; i < n; ++i) {
      std::string doc = "d" + std::to_string(docs(rng_));
      std::string text;
      for (size_t t = len(rng_); t > 0; --t) {
        if (!text.empty()) text += ' ';
        text += vocab[pick(rng_)];
      }
      text += '.';
      out.push_back(make_sentence(doc, next[doc]++, text, resources));
    }
    return out;
  }

  Query query(size_t index, bool allow_action) {
    std::uniform_int_distribution<size_t> count(0, 3);
    std::uniform_int_distribution<int> kind(0, allow_action ? 4 : 3);
    static const std::vector<std::string> words = {"that", "the", "of", "is", "shows", ","};
    static const std::vector<std::string> lexicons = {"study", "expert", "sentiment"};
    static const std::vector<std::string> entities = {"number", "person", "org"};
    std::string text = "study:";
    size_t before = count(rng_), after = count(rng_);
    auto random_slot = [&]() -> std::string {
      switch (kind(rng_)) {
        case 0:
          return "\"" + words[rng_() % words.size()] + "\"";
        case 1:
          return "lex(" + lexicons[rng_() % lexicons.size()] + ")";
        case 2:
          return "ent(" + entities[rng_() % entities.size()] + ")";
        case 3:
          return "\"" + words[rng_() % words.size()] + "\"";
        default:
          return "ACTION";
      }
    };
    for (size_t i = 0; i < before; ++i) text += " " + random_slot();
    text += " TOPIC";
    for (size_t i = 0; i < after; ++i) text += " " + random_slot();
    if (rng_() % 3 == 0) text += " gap<=" + std::to_string(rng_() % 4);
    return parse_query(text, "q" + std::to_string(index));
  }

  std::mt19937_64 &rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Motion gambling_motion(const RedirectTable &table) {
  return make_motion("m1", "We should ban gambling advertising", "Gambling",
                     std::string("ban advertising"), table);
}

// A fresh directory under the build tree's temp area, removed on scope exit.
class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("evidencer_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;

  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace evidencer::testing

#endif  // EVIDENCER_TESTS_TEST_SUPPORT_H_
