#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gme::cli {

/// Parsed command line. mu_grid holds a single value for non-sweep commands.
struct RunSpec {
    std::string command;
    int n = 1;
    int q = 2;
    double sigma2 = 1.0;
    std::vector<double> mu_grid;
    int order = 2;
    std::string method = "brute";  // brute | det
    std::int64_t samples = 100000;
    std::int64_t center_draws = 100;
    std::uint64_t seed = 0;
    int q_max = 10;  // selftest
    std::string out = "-";
    std::string format = "json";  // json | csv
};

/// Runs one command. Reports go to `out` (or the --out file), diagnostics to
/// `err`. Returns the process exit code: 0 success, 1 selftest tolerance
/// failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace gme::cli
