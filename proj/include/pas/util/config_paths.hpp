#pragma once

#include <string>

namespace pas::util {

// $PAS_CONFIG_DIR when set, otherwise the config/ directory of the source
// tree this build was configured from.
std::string default_config_dir();

std::string join_path(const std::string& dir, const std::string& name);

}  // namespace pas::util
