#include "pas/util/config_paths.hpp"

#include <cstdlib>
#include <filesystem>

namespace pas::util {

std::string default_config_dir() {
  if (const char* env = std::getenv("PAS_CONFIG_DIR"); env && *env) {
    return env;
  }
  return PAS_DEFAULT_CONFIG_DIR;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace pas::util
