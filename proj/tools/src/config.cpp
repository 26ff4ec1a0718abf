#include "config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <stdexcept>

namespace cli {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double to_real(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size())
        throw std::invalid_argument("config: bad numeric value for '" + key + "': " + v);
    return x;
}

} // namespace

void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open " + path);

    const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
        setters = {
            { "theta", [&](auto& k, auto& v) { cfg.theta = to_real(k, v); } },
            { "gamma", [&](auto& k, auto& v) { cfg.gamma1 = cfg.gamma2 = to_real(k, v); } },
            { "gamma1", [&](auto& k, auto& v) { cfg.gamma1 = to_real(k, v); } },
            { "gamma2", [&](auto& k, auto& v) { cfg.gamma2 = to_real(k, v); } },
            { "mu", [&](auto& k, auto& v) { cfg.mu = to_real(k, v); } },
            { "r", [&](auto& k, auto& v) { cfg.r = to_real(k, v); } },
            { "sigma", [&](auto& k, auto& v) { cfg.sigma = to_real(k, v); } },
            { "lambda", [&](auto& k, auto& v) { cfg.lambda = to_real(k, v); } },
            { "w-star", [&](auto& k, auto& v) { cfg.w_star = to_real(k, v); } },
            { "h", [&](auto& k, auto& v) { cfg.h = to_real(k, v); } },
            { "n-paths", [&](auto& k, auto& v) { cfg.n_paths = std::stoull(v); } },
            { "seed", [&](auto& k, auto& v) { cfg.seed = std::stoull(v); } },
            { "truncation-tol", [&](auto& k, auto& v) { cfg.truncation_tol = to_real(k, v); } },
            { "dynamics", [&](auto&, auto& v) { cfg.dynamics = v; } },
            { "noise", [&](auto&, auto& v) { cfg.noise = v; } },
            { "boundary", [&](auto&, auto& v) { cfg.boundary = v; } },
            { "horizon", [&](auto&, auto& v) { cfg.horizon = v; } },
            { "w0", [&](auto& k, auto& v) { cfg.w0 = to_real(k, v); } },
            { "gamma-min", [&](auto& k, auto& v) { cfg.gamma_min = to_real(k, v); } },
            { "gamma-max", [&](auto& k, auto& v) { cfg.gamma_max = to_real(k, v); } },
            { "gamma-steps", [&](auto& k, auto& v) { cfg.gamma_steps = std::stoi(v); } },
            { "w", [&](auto& k, auto& v) { cfg.w = to_real(k, v); } },
            { "price", [&](auto& k, auto& v) { cfg.price = to_real(k, v); } },
            { "r-alpha", [&](auto& k, auto& v) { cfg.r_alpha = to_real(k, v); } },
            { "r-beta", [&](auto& k, auto& v) { cfg.r_beta = to_real(k, v); } },
            { "output", [&](auto&, auto& v) { cfg.output = v; } },
            { "format", [&](auto&, auto& v) { cfg.format = v; } },
            { "workers", [&](auto& k, auto& v) { cfg.workers = unsigned(std::stoul(v)); } },
        };

    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno)
                                        + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw std::invalid_argument("config: " + path + ":" + std::to_string(lineno)
                                        + ": unknown key '" + key + "'");
        it->second(key, val);
    }
}

} // namespace cli
