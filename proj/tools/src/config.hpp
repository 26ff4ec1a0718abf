#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace cli {

// Resolved run parameters. Precedence: built-in defaults < config file <
// command-line flags. NaN sentinels mean "derive from the market target".
struct RunConfig {
    // pool
    double theta = std::nan("");
    double gamma1 = 0.99;
    double gamma2 = 0.99;
    // market / penalty (the symmetric-fee, w* = 1/2 default setting)
    double mu = 0.04;
    double r = 0.02;
    double sigma = 0.2;
    double lambda = 1.0;
    double w_star = std::nan("");
    // simulation
    double h = 1e-4;
    std::uint64_t n_paths = 1000;
    std::uint64_t seed = 0;
    double truncation_tol = 1e-6;
    std::string dynamics = "full";
    std::string noise = "rademacher";
    std::string boundary = "reflect";
    std::string horizon = "truncated";
    double w0 = std::nan("");
    // sweep grid
    double gamma_min = 0.8;
    double gamma_max = 0.9999;
    int gamma_steps = 41;
    // arb / value inputs
    double w = std::nan("");
    double price = 1.0;
    double r_alpha = std::nan("");
    double r_beta = std::nan("");
    // io
    std::string output = "-";
    std::string format; // per-command default when empty
    unsigned workers = 0;
};

// `key = value` lines, '#' comments, keys named after the long flags.
// Throws std::invalid_argument on unknown keys or malformed lines.
void apply_config_file(RunConfig& cfg, const std::string& path);

} // namespace cli
