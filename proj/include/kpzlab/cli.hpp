#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kpz::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitResource = 4;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutDirEnv = "KPZLAB_OUT_DIR";

const char* version();

/// Runs one kpzlab invocation. `args` excludes the program name. Human
/// messages go to `log`; failures are reported as a single JSON object on
/// `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& log, std::ostream& err);

/// %.17g: enough digits for every double to read back unchanged.
std::string format_double(double v);

}  // namespace kpz::cli
