#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace casbox::cli {

// Exit statuses of every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDomainFailure = 1;  // e.g. rule not bijective, FIPS battery failed
inline constexpr int kUsageError = 2;

// args[0] is the program name. Normal output goes to `out`, diagnostics and
// search progress to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The frozen convention set printed by --version.
std::string version_text();

}  // namespace casbox::cli
