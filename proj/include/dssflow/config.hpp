#pragma once

#include <map>
#include <string>

namespace dssflow {

// Run configuration, parsed from a plain-text key-value file with [section]
// tables (keys flatten to "section.key").
struct RunConfig {
    std::string data_v = "azimuthal";
    std::string data_theta = "inverse-radius";
    std::string annulus_file_v;      // overrides data_v when set
    std::string annulus_file_theta;  // overrides data_theta
    std::string force = "none";
    double lambda = 2.0;

    double L = 16.0;
    int N = 32;
    double dealias_fraction = 2.0 / 3.0;
    double drift_window_fraction = 0.8;

    int n_s = 16;
    double epsilon = 0.1;
    double alpha = 0.0;  // 0 -> heuristic 0.05 (1 + ||V0||_{L4}) with fallback
    double q = 10.0 / 3.0;
    double delta = 0.0;
    double R0 = 0.0;  // 0 -> alpha-driven doubling search

    std::string mode = "periodic";  // or "stationary"
    double tol_solve = 1e-8;
    double tol_quad = 1e-8;
    double ds = 4e-3;
    int max_map_evals = 50;
    int n_snap = 16;

    std::string out_dir = "out";
    int threads = 1;
    unsigned seed = 12345;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_map(const std::map<std::string, std::string>& kv);
    void validate() const;  // throws ConfigError naming the offending field
    std::string canonical() const;
    std::uint64_t hash() const;
};

// Minimal parser for the config format: comments (#), [tables], key = value
// with quoted strings, numbers and booleans.
std::map<std::string, std::string> parse_config_text(const std::string& text);

}  // namespace dssflow
