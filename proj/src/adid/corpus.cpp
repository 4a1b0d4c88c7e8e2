#include "pas/adid/corpus.hpp"

#include <filesystem>

#include "pas/error.hpp"
#include "pas/html/parser.hpp"
#include "pas/util/config_paths.hpp"
#include "pas/util/text.hpp"

namespace pas::adid {

namespace fs = std::filesystem;

Corpus Corpus::load(const std::string& directory) {
  Corpus c;
  c.directory = directory;
  if (!fs::is_directory(directory)) {
    throw Error(ErrorCode::kNotFound, "corpus directory not found", {{"path", directory}});
  }
  const auto labels_path = util::join_path(directory, "labels.json");
  const auto labels = nlohmann::json::parse(util::read_file(labels_path), nullptr, false);
  if (labels.is_discarded() || !labels.is_object()) {
    throw Error(ErrorCode::kInvalidArgument, "corpus: labels.json must be a JSON object");
  }
  for (const auto& [file, paths] : labels.items()) {
    c.labels[file] = paths.get<std::set<std::string>>();
  }
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".html") continue;
    c.pages[entry.path().filename().string()] = util::read_file(entry.path().string());
  }
  if (ec) throw Error(ErrorCode::kIo, "corpus: cannot list '" + directory + "'");
  for (const auto& [file, _] : c.labels) {
    if (!c.pages.count(file)) {
      throw Error(ErrorCode::kInvalidArgument, "corpus: labels name a missing page",
                  {{"file", file}});
    }
  }
  return c;
}

CorpusEvaluation evaluate_corpus(const Corpus& corpus, const IdentifyOptions& options) {
  CorpusEvaluation out;
  std::set<std::string> predicted;
  std::set<std::string> labeled;
  for (const auto& [file, markup] : corpus.pages) {
    const auto doc = html::parse(markup);
    out.parse_warnings += doc.warnings.size();
    for (const auto& r : identify_ads(doc, file, options)) {
      predicted.insert(file + "#" + r.element_path);
    }
    if (auto it = corpus.labels.find(file); it != corpus.labels.end()) {
      for (const auto& p : it->second) labeled.insert(file + "#" + p);
    }
    ++out.pages;
  }
  out.matrix = evaluate_identification(predicted, labeled);
  out.metrics = metrics(out.matrix);
  for (const auto& l : labeled) {
    if (!predicted.count(l)) out.missed.push_back(l);
  }
  for (const auto& p : predicted) {
    if (!labeled.count(p)) out.false_positives.push_back(p);
  }
  return out;
}

nlohmann::json to_json(const CorpusEvaluation& e) {
  auto j = to_json(e.matrix, e.metrics);
  j["pages"] = e.pages;
  j["missed"] = e.missed;
  j["false_positives"] = e.false_positives;
  j["parse_warnings"] = e.parse_warnings;
  return j;
}

}  // namespace pas::adid
