#pragma once

// Command-line front end. Verbs: simulate, verify, compare, beat-search,
// oracle-check, codec-check, predicates. Reports are JSON envelopes
// {schema_version, command, results, timing} on `out`; diagnostics go to
// `err`.

#include <ostream>
#include <string>
#include <vector>

namespace unbeat::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFinding = 1;
inline constexpr int kExitUsage = 2;

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace unbeat::cli
