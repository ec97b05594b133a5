#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace meshcrit::cli {

enum ExitCode : int {
    kOk = 0,
    kNotConverged = 2,
    kNumericFailure = 3,
    kNoSignChange = 4,
    kUsage = 64,
};

/// "start:stop:step" (inclusive) or a single value. Throws std::invalid_argument
/// on malformed or empty ranges.
std::vector<int> parse_int_range(const std::string& text);
std::vector<double> parse_real_range(const std::string& text);

/// Flat "key = value" file ('#' comments) turned into "--key value" arguments.
std::vector<std::string> read_config_args(const std::filesystem::path& file);

/// Entry point behind the `meshcrit` executable. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace meshcrit::cli
