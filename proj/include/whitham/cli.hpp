#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace whitham::cli {

enum ExitCode : int { ok = 0, verdict_failed = 1, config_error = 2 };

/// Parses the arguments (without the program name), runs the command and
/// returns the exit code. Reports go to `out` when no --out path is given.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

/// `key = value` lines turned into flags; blank lines, `#` comments and
/// `[section]` headers are skipped, surrounding quotes removed, `_` in keys
/// read as `-`. Boolean values true/false become a bare flag or nothing.
std::vector<std::string> config_file_args(const std::string& path);

}  // namespace whitham::cli
