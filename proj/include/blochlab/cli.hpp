#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blochlab::cli {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kValidation = 1;
inline constexpr int kComputation = 2;
inline constexpr int kUsage = 64;
inline constexpr int kIo = 74;

// Runs one command line (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blochlab::cli
