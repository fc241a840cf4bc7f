#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "promptsel/error.hpp"

namespace promptsel::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitTransport = 4;
inline constexpr int kExitValidation = 5;

int exit_code_for(ErrorKind kind) noexcept;

/// Seed used for test-subset sampling and shuffles when none is configured.
inline constexpr unsigned long long kDefaultSeed = 20240521ULL;

/// Runs one command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace promptsel::cli
