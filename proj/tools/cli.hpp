#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flockspc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitQuality = 3;

/// Entry point of the flockspc tool. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flockspc::cli
