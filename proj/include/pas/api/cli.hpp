#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pas::api {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// `sandbox <command> ...`. JSON on stdout unless --pretty; errors go to
// stderr as {"code","message","detail"}.
int cli_run(int argc, char** argv);
// Same, with the program name left out of `args`.
int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pas::api
