#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace krein::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Entry point of the krein_qm tool. CSV goes to --out or, without it, to
/// `out`; the one-line summary goes to `out` when --out is set and to `err`
/// otherwise.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Same, with argv[0] supplied.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krein::cli
