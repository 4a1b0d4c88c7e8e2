#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "pas/adid/evaluation.hpp"
#include "pas/adid/identifier.hpp"

namespace pas::adid {

// Directory of .html files plus labels.json: {"<file>": ["<element path>", ...]}.
struct Corpus {
  std::string directory;
  std::map<std::string, std::string> pages;  // file name -> markup
  std::map<std::string, std::set<std::string>> labels;

  static Corpus load(const std::string& directory);
};

struct CorpusEvaluation {
  ConfusionMatrix matrix;
  IdentificationMetrics metrics;
  std::size_t pages = 0;
  std::vector<std::string> missed;           // "<file>#<path>"
  std::vector<std::string> false_positives;  // "<file>#<path>"
  std::size_t parse_warnings = 0;
};

CorpusEvaluation evaluate_corpus(const Corpus& corpus, const IdentifyOptions& options = {});

nlohmann::json to_json(const CorpusEvaluation& e);

}  // namespace pas::adid
