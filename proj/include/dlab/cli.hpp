#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dlab::cli {

/// Exit codes: 0 success (and --help), 1 invalid input, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumerical = 2;

/// Runs `dispersion-lab <command> [flags]`; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses `key = value` lines ('#' comments, blank lines ignored) and
/// appends `--key value` for every key not already given in `args`.
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::string& config_text);

}  // namespace dlab::cli
