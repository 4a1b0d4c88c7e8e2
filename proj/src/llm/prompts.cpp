#include "pas/llm/prompts.hpp"

#include "pas/error.hpp"
#include "pas/util/config_paths.hpp"
#include "pas/util/text.hpp"

namespace pas::llm {

namespace {

std::string load_one(const std::string& dir, const char* file,
                     std::initializer_list<const char*> placeholders) {
  auto text = util::read_file(util::join_path(dir, file));
  for (const char* p : placeholders) {
    if (text.find(std::string("{") + p + "}") == std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("prompt template ") + file + " lacks placeholder {" + p + "}");
    }
  }
  return text;
}

}  // namespace

PromptTemplates PromptTemplates::load(const std::string& directory) {
  return {load_one(directory, "base_persona.txt", {"guidance"}),
          load_one(directory, "persona_variant.txt", {"base persona", "privacy attribute"}),
          load_one(directory, "longitudinal.txt", {"persona"}),
          load_one(directory, "alignment_rating.txt",
                   {"attribute", "low-end label", "high-end label", "ad description"})};
}

const PromptTemplates& PromptTemplates::defaults() {
  static const PromptTemplates t =
      load(util::join_path(util::default_config_dir(), "prompts"));
  return t;
}

}  // namespace pas::llm
