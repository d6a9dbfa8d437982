#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace jw::cli {

/// Exit statuses of the command-line front end.
inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Runs `jacobi-watson <args...>` (args exclude the program name). Reports
/// go to `out` unless --output names a file; diagnostics go to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// JSON text with every floating-point number printed to 17 significant
/// digits (non-finite values become null). Keys come out sorted.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// "a:b:n" (n uniform points, ends included) or a comma list "0.5,0.9".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace jw::cli
