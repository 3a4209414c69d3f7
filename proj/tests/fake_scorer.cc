// Test plugin for the scorer wire protocol.
//
//   fake_scorer echo <score>
//   fake_scorer length <model file>   logistic model over the len: bucket of
//                                     the sentence (or masked text for MaskS)
//   fake_scorer refuse | garbage | wrong-id | nan | stall | crash

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "evidencer/corpus.h"
#include "evidencer/ranker.h"
#include "json.hpp"

using nlohmann::json;

namespace {

std::string LengthBucket(size_t tokens) {
  if (tokens < 10) return "0-9";
  if (tokens < 20) return "10-19";
  if (tokens < 40) return "20-39";
  return "40+";
}

}  // namespace

int main(int argc, char **argv) {
  if (argc < 2) return 2;
  const std::string mode = argv[1];
  evidencer::LogisticModel model;
  if (mode == "length") {
    if (argc < 3) return 2;
    model = evidencer::load_model(argv[2]);
  }

  std::string line;
  if (!std::getline(std::cin, line)) return 3;
  json hello = json::parse(line, nullptr, false);
  if (hello.is_discarded() || hello.value("proto", "") != "evidencer-scorer" ||
      hello.value("version", 0) != 1 || mode == "refuse") {
    std::cout << json{{"ok", false}, {"error", "unsupported protocol"}}.dump() << std::endl;
    return 4;
  }
  const std::string variant = hello.value("variant", "");
  std::cout << json{{"ok", true}, {"name", "fake-" + mode}}.dump() << std::endl;

  while (std::getline(std::cin, line)) {
    json req = json::parse(line, nullptr, false);
    if (req.is_discarded() || !req.contains("id")) {
      std::cout << json{{"id", nullptr}, {"error", "malformed request"}}.dump() << std::endl;
      continue;
    }
    const std::string id = req["id"].get<std::string>();
    if (mode == "echo") {
      std::cout << json{{"id", id}, {"score", std::atof(argv[2])}}.dump() << std::endl;
    } else if (mode == "length") {
      const std::string text = variant == "MaskS" ? req["masked"].get<std::string>()
                                                  : req["sentence"].get<std::string>();
      evidencer::FeatureVector fv = {
          {"len:" + LengthBucket(evidencer::tokenize(text).size()), 1.0}};
      std::cout << json{{"id", id}, {"score", evidencer::logistic_score(model, fv)}}.dump()
                << std::endl;
    } else if (mode == "garbage") {
      std::cout << "not json at all" << std::endl;
    } else if (mode == "wrong-id") {
      std::cout << json{{"id", id + "x"}, {"score", 0.5}}.dump() << std::endl;
    } else if (mode == "nan") {
      std::cout << "{\"id\":" << json(id).dump() << ",\"score\":NaN}" << std::endl;
    } else if (mode == "stall") {
      sleep(5);
    } else if (mode == "crash") {
      return 1;
    }
  }
  return 0;
}
