// Acceptance suite: one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "g3m/arbitrage.hpp"
#include "g3m/simulator.hpp"
#include "g3m/value.hpp"

namespace fs = std::filesystem;
using namespace g3m;

namespace {

const MarketParams kMarket{ 0.04, 0.02, 0.2 };
const PenaltyParams kPenalty{ 1.0, 0.5 };

struct Outcome {
    bool pass = true;
    std::string detail;
    double seconds = 0.0;
};

template <typename F>
Outcome timed(F&& fn) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    fn(o);
    o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return o;
}

void require(Outcome& o, bool cond, const std::string& what) {
    if (!cond && o.pass) {
        o.pass = false;
        o.detail = what;
    }
}

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// 1. brute-force oracle vs the closed forms across the parameter grid
Outcome criterion_no_arb_oracle() {
    return timed([](Outcome& o) {
        auto stream = rng::path_stream(20260808, 1);
        double worst_interior = 0.0, worst_profit = 0.0, worst_step = 0.0;
        for (double th : { 0.2, 0.5, 0.8 })
            for (double g : { 0.9, 0.97, 0.997 }) {
                const PoolParams p{ th, g, g };
                const auto iv = no_arb_interval(p);
                const double wealth = 100.0;
                for (int k = 0; k < 12; ++k) { // 12 x 9 > 100 interior weights
                    const double w = iv.w_d + iv.width() * stream.u01();
                    const PoolState st{ wealth * (1.0 - w), wealth * w };
                    const auto bf = brute_force_arb_profit(st, 1.0, p, 2000);
                    worst_interior = std::max(worst_interior, bf.max_profit / wealth);
                }
                for (int k = 0; k < 12; ++k) { // and >100 exterior weights
                    const bool below = stream.u01() < 0.5;
                    const double w = below
                        ? 0.02 + (iv.w_d * 0.999 - 0.02) * stream.u01()
                        : iv.w_u_bound * 1.0005
                          + (0.98 - iv.w_u_bound * 1.0005) * stream.u01();
                    const PoolState st{ wealth * (1.0 - w), wealth * w };
                    const auto bf = brute_force_arb_profit(st, 1.0, p, 2000);
                    const auto opt = optimal_trade(st, 1.0, p);
                    require(o, bf.max_profit > 0.0, "no exterior profit found");
                    const double step_err =
                        std::abs(bf.argmax_delta_alpha - opt.delta_alpha)
                        / std::max(bf.alpha_step, 1e-300);
                    worst_step = std::max(worst_step, step_err);
                    worst_profit = std::max(worst_profit,
                        std::abs(bf.max_profit - opt.cost_fraction * wealth)
                        / (opt.cost_fraction * wealth));
                }
            }
        require(o, worst_interior <= 1e-9, "interior profit " + num(worst_interior));
        require(o, worst_step <= 1.01, "argmax off by " + num(worst_step) + " grid steps");
        require(o, worst_profit <= 1e-10, "profit mismatch " + num(worst_profit));
        if (o.pass)
            o.detail = "max interior profit/wealth " + num(worst_interior)
                     + ", worst profit mismatch " + num(worst_profit);
    });
}

// 2. theta = 1/2 reduces to the constant-product closed forms
Outcome criterion_constant_product() {
    return timed([](Outcome& o) {
        double worst = 0.0;
        for (double g : { 0.9, 0.997 }) {
            const PoolParams p{ 0.5, g, g };
            const auto iv = no_arb_interval(p);
            for (int k = 0; k < 1000; ++k) {
                const double t = (k + 0.5) / 1000.0;
                const double wl = 0.01 + (iv.w_d - 0.01) * t;
                const double wu = iv.w_u_bound + (0.99 - iv.w_u_bound) * t;
                const double ref_cd = std::pow(std::sqrt(1.0 - wl) - std::sqrt(wl / g), 2);
                const double ref_cu = std::pow(std::sqrt((1.0 - wu) / g) - std::sqrt(wu), 2);
                const double sd = std::sqrt(g * wl / (1.0 - wl)) * (1.0 - 1.0 / g);
                const double ref_pd = (sd + 1.0) / (sd + 2.0);
                const double ref_pu =
                    1.0 / (2.0 + std::sqrt(g * (1.0 - wu) / wu) * (1.0 - 1.0 / g));
                worst = std::max({ worst,
                                   std::abs(cost_down(wl, p) - ref_cd),
                                   std::abs(cost_up(wu, p) - ref_cu),
                                   std::abs(post_weight_down(wl, p) - ref_pd),
                                   std::abs(post_weight_up(wu, p) - ref_pu) });
            }
        }
        require(o, worst < 1e-12, "worst deviation " + num(worst));
        if (o.pass) o.detail = "max |general form - product form| = " + num(worst);
    });
}

// 3. boundary cost vanishes quadratically
Outcome criterion_boundary_order() {
    return timed([](Outcome& o) {
        std::vector<double> grid;
        for (int k = 0; k < 12; ++k)
            grid.push_back(1e-5 * std::pow(100.0, double(k) / 11.0));
        double lo = 10.0, hi = 0.0;
        for (double th : { 0.3, 0.5, 0.7 })
            for (double g2 : { 0.9, 0.99 }) {
                const auto fit = boundary_cost_order({ th, 1.0, g2 }, grid);
                lo = std::min(lo, fit.slope);
                hi = std::max(hi, fit.slope);
                require(o, fit.slope > 1.95 && fit.slope < 2.05,
                        "slope " + num(fit.slope) + " at theta " + num(th));
            }
        if (o.pass) o.detail = "slopes in [" + num(lo) + ", " + num(hi) + "]";
    });
}

// 4. closed form solves the ODE with smooth pasting
Outcome criterion_ode_pasting() {
    return timed([](Outcome& o) {
        double worst_res = 0.0, worst_bc = 0.0;
        for (double g : { 0.99, 0.997, 0.999 }) {
            const auto sol = solve_value(kMarket, kPenalty, g, g);
            const double scale = std::max(1.0, std::abs(value(0.5, sol)));
            worst_bc = std::max({ worst_bc,
                                  std::abs(value_d1(sol.interval.w_d, sol)) / scale,
                                  std::abs(value_d1(sol.interval.w_u_bound, sol)) / scale });
            for (int k = 1; k < 1000; ++k) {
                const double w = sol.interval.w_d + sol.interval.width() * k / 1000.0;
                worst_res = std::max(worst_res, std::abs(ode_residual(w, sol))
                                                    / std::max(1.0, std::abs(value(w, sol))));
            }
        }
        require(o, worst_res < 1e-8, "ODE residual " + num(worst_res));
        require(o, worst_bc < 1e-10, "endpoint derivative " + num(worst_bc));
        if (o.pass)
            o.detail = "max residual " + num(worst_res) + ", max |J'(boundary)| " + num(worst_bc);
    });
}

// 5. Monte Carlo cross-oracle at h = 1e-4 with 1e5 paths
Outcome criterion_cross_oracle() {
    return timed([](Outcome& o) {
        std::string detail;
        for (double g : { 0.99, 0.997 }) {
            SimConfig cfg;
            cfg.step_h = 1e-4;
            cfg.n_paths = 200000;
            cfg.master_seed = 20260808;
            cfg.horizon = HorizonMode::killed;
            const PoolParams pool{ 0.5, g, g };
            const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
            const double jref = value(0.5, solve_value(kMarket, kPenalty, g, g));
            const double tol = std::max(3.0 * stats.std_error, 0.05 * jref);
            require(o, std::abs(stats.j_estimate - jref) <= tol,
                    "gamma " + num(g) + ": mc " + num(stats.j_estimate)
                    + " vs analytic " + num(jref));
            detail += "gamma " + num(g) + ": mc " + num(stats.j_estimate) + " vs "
                    + num(jref) + " (rel " + num(stats.j_estimate / jref - 1.0) + "); ";
        }
        if (o.pass) o.detail = detail;
    });
}

// 6. losses vanish along the optimal-fee limit
Outcome criterion_fee_limit() {
    return timed([](Outcome& o) {
        std::vector<double> grid;
        for (int k = 3; k <= 13; ++k) grid.push_back(1.0 - std::pow(2.0, -double(k)));
        const auto rows = fee_sweep(grid, kMarket, kPenalty);
        for (std::size_t i = 1; i < rows.size(); ++i)
            require(o, rows[i].j_at_wstar <= rows[i - 1].j_at_wstar,
                    "J not nonincreasing at k = " + num(3.0 + double(i)));
        const double j09 =
            value(kPenalty.w_star, solve_value(kMarket, kPenalty, 0.9, 0.9));
        require(o, rows.back().j_at_wstar < 1e-3 * j09,
                "J(final)/J(0.9) = " + num(rows.back().j_at_wstar / j09));
        for (std::size_t i = rows.size() - 4; i < rows.size(); ++i) {
            require(o, std::abs(rows[i].j11_w_d) < std::abs(rows[i - 1].j11_w_d),
                    "lower optimality gap not decreasing");
            require(o, std::abs(rows[i].j11_w_u) < std::abs(rows[i - 1].j11_w_u),
                    "upper optimality gap not decreasing");
        }
        if (o.pass)
            o.detail = "J(final)/J(0.9) = " + num(rows.back().j_at_wstar / j09)
                     + ", gaps decreasing over the last five points";
    });
}

// 7. the sweep CSV reproduces the volatility ordering
Outcome criterion_volatility_ordering() {
    return timed([](Outcome& o) {
        auto sweep_csv = [](const std::string& mu, const std::string& sigma) {
            std::ostringstream out, err;
            const int code = cli::run_command(
                { "sweep", "--mu", mu, "--sigma", sigma, "--gamma-min", "0.8",
                  "--gamma-max", "0.99", "--gamma-steps", "20" }, out, err);
            return std::pair<int, std::string>(code, out.str());
        };
        const auto [code_lo, lo] = sweep_csv("0.04", "0.2");   // w* = 1/2
        const auto [code_hi, hi] = sweep_csv("0.065", "0.3");  // w* = 1/2
        require(o, code_lo == 0 && code_hi == 0, "sweep command failed");
        auto parse_j = [](const std::string& csv) {
            std::vector<double> gs, js;
            std::istringstream in(csv);
            std::string line;
            std::getline(in, line); // header
            while (std::getline(in, line)) {
                std::vector<std::string> cells;
                std::istringstream ls(line);
                std::string cell;
                while (std::getline(ls, cell, ',')) cells.push_back(cell);
                gs.push_back(std::stod(cells[0]));
                js.push_back(std::stod(cells[7]));
            }
            return std::pair<std::vector<double>, std::vector<double>>(gs, js);
        };
        const auto [gl, jl] = parse_j(lo);
        const auto [gh, jh] = parse_j(hi);
        require(o, gl.size() == 20 && gh.size() == 20, "unexpected sweep size");
        for (std::size_t i = 0; i < gl.size(); ++i)
            require(o, jh[i] > jl[i], "ordering violated at gamma " + num(gl[i]));
        if (o.pass)
            o.detail = "sigma = 0.3 curve above sigma = 0.2 pointwise for gamma <= 0.99";
    });
}

// 8. byte-identical simulate emission across runs and worker counts
Outcome criterion_determinism() {
    return timed([](Outcome& o) {
        const char* cli_path = G3M_CLI_PATH;
        const fs::path dir = fs::temp_directory_path() / "g3m_acceptance";
        fs::create_directories(dir);
        auto emit = [&](int workers, const fs::path& file) {
            std::ostringstream cmd;
            cmd << cli_path
                << " simulate --seed 42 --n-paths 512 --h 1e-4 --gamma 0.99"
                << " --horizon killed --workers " << workers
                << " --output " << file.string();
            return std::system(cmd.str().c_str());
        };
        auto slurp = [](const fs::path& p) {
            std::ifstream f(p, std::ios::binary);
            std::stringstream ss;
            ss << f.rdbuf();
            return ss.str();
        };
        const fs::path f1 = dir / "w1.json", f4 = dir / "w4.json";
        const fs::path f8 = dir / "w8.json", f4b = dir / "w4b.json";
        require(o, emit(1, f1) == 0 && emit(4, f4) == 0 && emit(8, f8) == 0
                   && emit(4, f4b) == 0, "CLI invocation failed");
        if (o.pass) {
            const std::string a = slurp(f1);
            require(o, !a.empty(), "empty emission");
            require(o, a == slurp(f4), "workers 1 vs 4 differ");
            require(o, a == slurp(f8), "workers 1 vs 8 differ");
            require(o, slurp(f4) == slurp(f4b), "repeated run differs");
        }
        fs::remove_all(dir);
        if (o.pass) o.detail = "byte-identical JSON across repeats and workers 1/4/8";
    });
}

} // namespace

int main() {
    struct Entry {
        const char* title;
        Outcome (*fn)();
    };
    const Entry entries[] = {
        { "no-arbitrage oracle agreement", criterion_no_arb_oracle },
        { "constant-product reduction", criterion_constant_product },
        { "boundary-cost quadratic order", criterion_boundary_order },
        { "ODE residual and smooth pasting", criterion_ode_pasting },
        { "Monte Carlo cross-oracle", criterion_cross_oracle },
        { "optimal-fee limit", criterion_fee_limit },
        { "volatility ordering in the sweep", criterion_volatility_ordering },
        { "simulate determinism", criterion_determinism },
    };
    int failures = 0;
    int id = 0;
    for (const auto& entry : entries) {
        ++id;
        const Outcome o = entry.fn();
        std::printf("criterion %d [%s] %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL",
                    entry.title, o.seconds, o.detail.c_str());
        std::fflush(stdout);
        if (!o.pass) ++failures;
    }
    std::printf("acceptance: %d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
