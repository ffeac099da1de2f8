#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace vfog::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kRuntimeError = 2 };

// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "VFOG_OUT_DIR";

// Entry point behind the `vfog` executable. Diagnostics go to `err`,
// progress and summaries to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(const std::string& bytes);

}  // namespace vfog::cli
