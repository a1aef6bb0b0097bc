#pragma once

#include "emgvalid/model.hpp"

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace emgvalid::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFail = 2;
inline constexpr int kExitMarginal = 3;

/// nullopt is an informational result and maps to success.
int exit_code(std::optional<VerdictLevel> v);

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

}  // namespace emgvalid::cli
