#include "pas/llm/schema.hpp"

namespace pas::llm {

namespace {

bool matches(const nlohmann::json& v, FieldType t) {
  switch (t) {
    case FieldType::kString: return v.is_string();
    case FieldType::kNumber: return v.is_number();
    case FieldType::kInteger:
      return v.is_number_integer() ||
             (v.is_number_float() && v.get<double>() == static_cast<double>(
                                                            static_cast<long long>(v.get<double>())));
    case FieldType::kBoolean: return v.is_boolean();
    case FieldType::kArray: return v.is_array();
    case FieldType::kObject: return v.is_object();
  }
  return false;
}

}  // namespace

std::string_view to_string(FieldType t) {
  switch (t) {
    case FieldType::kString: return "string";
    case FieldType::kNumber: return "number";
    case FieldType::kInteger: return "integer";
    case FieldType::kBoolean: return "boolean";
    case FieldType::kArray: return "array";
    case FieldType::kObject: return "object";
  }
  return "string";
}

std::vector<std::string> ResponseSchema::validate(
    const nlohmann::json& value) const {
  std::vector<std::string> problems;
  if (!value.is_object()) {
    problems.push_back("$: expected object");
    return problems;
  }
  for (const auto& f : fields) {
    auto it = value.find(f.name);
    if (it == value.end() || it->is_null()) {
      if (f.required) problems.push_back("$." + f.name + ": missing");
      continue;
    }
    if (!matches(*it, f.type)) {
      problems.push_back("$." + f.name + ": expected " +
                         std::string(to_string(f.type)));
    }
  }
  return problems;
}

nlohmann::json ResponseSchema::descriptor() const {
  nlohmann::json props = nlohmann::json::object();
  nlohmann::json required = nlohmann::json::array();
  for (const auto& f : fields) {
    props[f.name] = {{"type", std::string(to_string(f.type))}};
    if (f.required) required.push_back(f.name);
  }
  return {{"name", name},
          {"type", "object"},
          {"properties", props},
          {"required", required}};
}

std::optional<nlohmann::json> extract_json_object(std::string_view text) {
  for (auto start = text.find('{'); start != std::string_view::npos;
       start = text.find('{', start + 1)) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
      const char c = text[i];
      if (in_string) {
        if (escaped) {
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (--depth == 0) {
          auto parsed = nlohmann::json::parse(text.substr(start, i - start + 1),
                                              nullptr, false);
          if (!parsed.is_discarded()) return parsed;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

}  // namespace pas::llm
