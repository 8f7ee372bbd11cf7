#pragma once

#include <map>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clines::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kConfigError = 2,
    kInvariantViolation = 3,
    kNumericalFailure = 4,
};

/// Malformed configuration text, unknown key or unparsable value (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Flat "key = value" lines; '#' starts a comment, blank lines are skipped, '-' in keys reads as '_'.
std::map<std::string, std::string> parse_config_text(std::string_view text);

/// "a:b:step" (inclusive) or a comma-separated list.
std::vector<double> parse_number_list(std::string_view text);

/// Entry point behind the clinewave executable. Artifacts go to --out, else
/// $CLINEWAVE_OUT/<command>, else ./clinewave_out/<command>.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace clines::cli
