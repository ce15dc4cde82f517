#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace bayesgeom::cli {

enum ExitCode : int { ok = 0, validation_error = 2, numerical_error = 3 };

struct GridAxis {
    std::string parameter;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    bool log_scale = false;
    /// Extra values merged into the axis (sorted, duplicates removed).
    std::vector<double> include;

    std::vector<double> values() const;
};

GridAxis parse_axis(const nlohmann::json& j);

struct RunOptions {
    std::optional<std::string> output;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 1;
};

/// Executes one configuration document. Artifacts go to the configured
/// output path (or `out` when none is given); a short JSON summary goes to
/// `out` when an output file is written. Errors are reported on `err`.
int run(const nlohmann::json& config, const RunOptions& options, std::ostream& out, std::ostream& err);

/// Command-line entry: --config, --output, --seed, --threads.
int main_entry(int argc, char** argv);

}  // namespace bayesgeom::cli
