#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace pas::llm {

enum class FieldType { kString, kNumber, kInteger, kBoolean, kArray, kObject };

struct SchemaField {
  std::string name;
  FieldType type = FieldType::kString;
  bool required = true;
};

// Flat structured-output descriptor. `name` doubles as the task tag the stub
// provider dispatches on.
struct ResponseSchema {
  std::string name;
  std::vector<SchemaField> fields;

  // Field-path diagnostics ("$.age: expected integer"); empty when valid.
  std::vector<std::string> validate(const nlohmann::json& value) const;
  nlohmann::json descriptor() const;
};

// First JSON object in `text`, tolerating surrounding prose and ``` fences.
std::optional<nlohmann::json> extract_json_object(std::string_view text);

std::string_view to_string(FieldType t);

}  // namespace pas::llm
