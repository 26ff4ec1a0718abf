#include "g3m/selfcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "g3m/arbitrage.hpp"
#include "g3m/simulator.hpp"
#include "g3m/value.hpp"

namespace g3m::selfcheck {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Suite {
    std::vector<CheckResult> results;
    rng::Stream stream;

    double uniform(double lo, double hi) { return lo + (hi - lo) * stream.u01(); }

    void check(const std::string& name, bool ok, const std::string& detail) {
        results.push_back({ name, ok, detail });
    }
};

const double kThetas[] = { 0.2, 0.5, 0.8 };
const double kGammas[] = { 0.9, 0.97, 0.997 };

void arbitrage_checks(Suite& s) {
    // interval ordering, fixed points, containment, cost sign and vanishing
    {
        bool ok = true;
        double worst = 0.0;
        for (double th : kThetas)
            for (double g1 : kGammas)
                for (double g2 : kGammas) {
                    const PoolParams p{ th, g1, g2 };
                    const auto iv = no_arb_interval(p);
                    ok = ok && iv.w_d <= th && th <= iv.w_u_bound && iv.w_d > 0 && iv.w_u_bound < 1;
                    worst = std::max({ worst,
                                       std::abs(post_weight_down(iv.w_d, p) - iv.w_d),
                                       std::abs(post_weight_up(iv.w_u_bound, p) - iv.w_u_bound) });
                    for (int k = 1; k <= 8; ++k) {
                        const double wlo = iv.w_d * double(k) / 9.0;
                        const double whi = iv.w_u_bound + (1.0 - iv.w_u_bound) * double(k) / 9.0;
                        ok = ok && iv.contains(post_weight_down(wlo, p));
                        ok = ok && iv.contains(post_weight_up(std::min(whi, 1.0 - 1e-9), p));
                        ok = ok && cost_down(wlo, p) >= 0.0 && cost_up(std::min(whi, 1.0 - 1e-9), p) >= 0.0;
                    }
                    ok = ok && cost_down(iv.w_d * (1.0 - 1e-9), p) < 1e-12;
                    ok = ok && cost_up(std::min(iv.w_u_bound * (1.0 + 1e-9), 1.0 - 1e-9), p) < 1e-12;
                }
        const PoolParams nofee{ 0.5, 1.0, 1.0 };
        const auto iv0 = no_arb_interval(nofee);
        ok = ok && iv0.w_d == 0.5 && iv0.w_u_bound == 0.5;
        s.check("arb.interval-and-fixed-points", ok && worst < 1e-12,
                "max fixed-point error " + num(worst));
    }
    // brute-force no-arbitrage inside, profitability and agreement outside
    {
        bool ok = true;
        double worst_in = 0.0, worst_match = 0.0;
        for (double th : kThetas)
            for (double g : kGammas) {
                const PoolParams p{ th, g, g };
                const auto iv = no_arb_interval(p);
                for (int k = 0; k < 6; ++k) {
                    const double w = s.uniform(iv.w_d, iv.w_u_bound);
                    const PoolState st{ 100.0 * (1.0 - w), 100.0 * w }; // price 1
                    const auto bf = brute_force_arb_profit(st, 1.0, p, 1000);
                    worst_in = std::max(worst_in, bf.max_profit / 100.0);
                    const double wout = s.stream.u01() < 0.5
                        ? s.uniform(0.05, iv.w_d * 0.999)
                        : s.uniform(std::min(iv.w_u_bound * 1.001, 0.95), 0.95);
                    const PoolState st2{ 100.0 * (1.0 - wout), 100.0 * wout };
                    const auto bf2 = brute_force_arb_profit(st2, 1.0, p, 1000);
                    const auto opt = optimal_trade(st2, 1.0, p);
                    ok = ok && bf2.max_profit > 0.0;
                    ok = ok && std::abs(bf2.argmax_delta_alpha - opt.delta_alpha) <= 2.0 * bf2.alpha_step + 1e-12;
                    const double wealth = 100.0;
                    worst_match = std::max(worst_match,
                        std::abs(bf2.max_profit - opt.cost_fraction * wealth)
                        / std::max(1e-300, opt.cost_fraction * wealth));
                }
            }
        s.check("arb.brute-force-oracle", ok && worst_in <= 1e-9 && worst_match < 1e-9,
                "max interior profit/wealth " + num(worst_in)
                + ", worst profit mismatch " + num(worst_match));
    }
    // constant-product reduction at theta = 1/2
    {
        double worst = 0.0;
        const double g = 0.9;
        const PoolParams p{ 0.5, g, g };
        const auto iv = no_arb_interval(p);
        for (int k = 1; k < 200; ++k) {
            const double wl = 0.02 + (iv.w_d - 0.02) * double(k) / 200.0;
            const double wu = iv.w_u_bound + (0.98 - iv.w_u_bound) * double(k) / 200.0;
            const double ref_cd = std::pow(std::sqrt(1.0 - wl) - std::sqrt(wl / g), 2);
            const double ref_cu = std::pow(std::sqrt((1.0 - wu) / g) - std::sqrt(wu), 2);
            const double sd = std::sqrt(g * wl / (1.0 - wl)) * (1.0 - 1.0 / g);
            const double ref_pd = (sd + 1.0) / (sd + 2.0);
            const double ref_pu = 1.0 / (2.0 + std::sqrt(g * (1.0 - wu) / wu) * (1.0 - 1.0 / g));
            worst = std::max({ worst,
                               std::abs(cost_down(wl, p) - ref_cd),
                               std::abs(cost_up(wu, p) - ref_cu),
                               std::abs(post_weight_down(wl, p) - ref_pd),
                               std::abs(post_weight_up(wu, p) - ref_pu) });
        }
        s.check("arb.constant-product-reduction", worst < 1e-12, "max abs diff " + num(worst));
    }
    // cost equals reserve-level arbitrage profit
    {
        double worst = 0.0;
        for (double th : kThetas)
            for (double g : kGammas) {
                const PoolParams p{ th, g, g };
                const auto iv = no_arb_interval(p);
                for (double w : { iv.w_d * 0.5, iv.w_d * 0.9,
                                  iv.w_u_bound + 0.5 * (1.0 - iv.w_u_bound),
                                  iv.w_u_bound + 0.1 * (1.0 - iv.w_u_bound) }) {
                    const double price = 0.7;
                    const PoolState st{ 50.0 * (1.0 - w), 50.0 * w / price };
                    const double wealth = st.r_alpha + price * st.r_beta;
                    const auto opt = optimal_trade(st, price, p);
                    const double profit = -(opt.delta_alpha + price * opt.delta_beta);
                    worst = std::max(worst, std::abs(profit - opt.cost_fraction * wealth)
                                                / std::max(1.0, std::abs(profit)));
                }
            }
        s.check("arb.cost-representation-consistency", worst < 1e-10, "worst rel diff " + num(worst));
    }
    // quadratic vanishing of the boundary cost
    {
        bool ok = true;
        std::vector<double> grid;
        for (int k = 0; k < 12; ++k)
            grid.push_back(1e-5 * std::pow(100.0, double(k) / 11.0));
        for (double th : { 0.3, 0.5, 0.7 })
            for (double g2 : { 0.9, 0.99 }) {
                const auto fit = boundary_cost_order(PoolParams{ th, 1.0, g2 }, grid);
                ok = ok && fit.slope > 1.95 && fit.slope < 2.05 && fit.coefficient > 0.0;
            }
        s.check("arb.quadratic-boundary-cost", ok, "log-log slopes within [1.95, 2.05]");
    }
}

void value_checks(Suite& s) {
    const MarketParams market{ 0.04, 0.02, 0.2 };
    const PenaltyParams pen{ 1.0, 0.5 };
    // Vieta identities and endpoint derivatives
    {
        double worst_vieta = 0.0, worst_bc = 0.0, worst_res = 0.0, min_j = 0.0;
        for (double g : { 0.9, 0.99, 0.997, 0.999 }) {
            const auto sol = solve_value(market, pen, g, g);
            const double b2 = sol.drift_vol.b * sol.drift_vol.b;
            worst_vieta = std::max(worst_vieta,
                std::abs(sol.z1 + sol.z2 - (1.0 - 2.0 * sol.drift_vol.a / b2)));
            worst_vieta = std::max(worst_vieta,
                std::abs(sol.z1 * sol.z2 + 2.0 * market.r / b2) / (2.0 * market.r / b2));
            const double scale = std::max(1.0, std::abs(value(pen.w_star, sol)));
            worst_bc = std::max({ worst_bc,
                                  std::abs(value_d1(sol.interval.w_d, sol)) / scale,
                                  std::abs(value_d1(sol.interval.w_u_bound, sol)) / scale });
            for (int k = 1; k < 64; ++k) {
                const double w = sol.interval.w_d + sol.interval.width() * double(k) / 64.0;
                const double jw = value(w, sol);
                min_j = std::min(min_j, jw);
                worst_res = std::max(worst_res,
                    std::abs(ode_residual(w, sol)) / std::max(1.0, std::abs(jw)));
            }
        }
        s.check("value.vieta", worst_vieta < 1e-12, "worst rel error " + num(worst_vieta));
        s.check("value.smooth-pasting", worst_bc < 1e-10, "max |J'(boundary)|/scale " + num(worst_bc));
        s.check("value.ode-residual", worst_res < 1e-8, "max rel residual " + num(worst_res));
        s.check("value.lower-bound", min_j >= -1e-10, "min J " + num(min_j));
    }
    // analytic vs finite-difference derivatives away from the cancellation
    // regime, relative to the derivative's scale on the interval
    {
        double worst = 0.0;
        const auto sol = solve_value(market, pen, 0.8, 0.8);
        double scale1 = 0.0, scale2 = 0.0;
        for (int k = 1; k < 16; ++k) {
            const double w = sol.interval.w_d + sol.interval.width() * double(k) / 16.0;
            scale1 = std::max(scale1, std::abs(value_d1(w, sol)));
            scale2 = std::max(scale2, std::abs(value_d2(w, sol)));
        }
        auto d2 = [&](double w, double h) {
            return (value(w + h, sol) - 2.0 * value(w, sol) + value(w - h, sol)) / (h * h);
        };
        for (int k = 1; k < 16; ++k) {
            const double w = sol.interval.w_d + sol.interval.width() * double(k) / 16.0;
            const double h1 = 3e-6, h2 = 3e-4;
            const double fd1 = (value(w + h1, sol) - value(w - h1, sol)) / (2.0 * h1);
            const double fd2 = (4.0 * d2(w, h2) - d2(w, 2.0 * h2)) / 3.0;
            worst = std::max(worst, std::abs(fd1 - value_d1(w, sol)) / scale1);
            worst = std::max(worst, std::abs(fd2 - value_d2(w, sol)) / scale2);
        }
        s.check("value.fd-derivative-match", worst < 1e-5, "worst rel diff " + num(worst));
    }
    // monotone optimal-fee limit
    {
        std::vector<double> grid;
        for (int k = 3; k <= 13; ++k) grid.push_back(1.0 - std::pow(2.0, -double(k)));
        const auto rows = fee_sweep(grid, market, pen);
        bool mono = true;
        for (std::size_t i = 1; i < rows.size(); ++i)
            mono = mono && rows[i].j_at_wstar <= rows[i - 1].j_at_wstar * (1.0 + 1e-12);
        const double j09 = value(pen.w_star, solve_value(market, pen, 0.9, 0.9));
        const bool limit = rows.back().j_at_wstar < 1e-3 * j09;
        s.check("value.optimal-fee-limit", mono && limit,
                "J(final)/J(0.9) = " + num(rows.back().j_at_wstar / j09));
    }
}

void simulator_checks(Suite& s, std::uint64_t seed) {
    const MarketParams market{ 0.04, 0.02, 0.2 };
    const PenaltyParams pen{ 1.0, 0.5 };
    // determinism across worker counts
    {
        SimConfig cfg;
        cfg.n_paths = 96;
        cfg.master_seed = seed;
        cfg.horizon = HorizonMode::killed;
        const PoolParams pool{ 0.5, 0.99, 0.99 };
        cfg.workers = 1;
        const auto a = estimate_value(0.5, cfg, market, pen, pool);
        cfg.workers = 4;
        const auto b = estimate_value(0.5, cfg, market, pen, pool);
        const bool ok = a.j_estimate == b.j_estimate && a.std_error == b.std_error
                     && a.n_up_events == b.n_up_events && a.n_down_events == b.n_down_events;
        s.check("sim.determinism-across-workers", ok,
                ok ? "bit-identical" : "worker count changed the estimate");
    }
    // cross-oracle against the closed form
    {
        SimConfig cfg;
        cfg.n_paths = 3000;
        cfg.master_seed = seed + 1;
        cfg.horizon = HorizonMode::killed;
        const double g = 0.99;
        const PoolParams pool{ 0.5, g, g };
        const auto stats = estimate_value(0.5, cfg, market, pen, pool);
        const double jref = value(0.5, solve_value(market, pen, g, g));
        const double tol = std::max(3.0 * stats.std_error, 0.05 * jref);
        s.check("sim.cross-oracle", std::abs(stats.j_estimate - jref) <= tol,
                "mc " + num(stats.j_estimate) + " vs analytic " + num(jref)
                + " (tol " + num(tol) + ")");
    }
    // negligible loss when the penalty is negligible and the interval is wide
    {
        SimConfig cfg;
        cfg.n_paths = 64;
        cfg.master_seed = seed + 2;
        cfg.horizon = HorizonMode::killed;
        const PenaltyParams tiny{ 1e-12, 0.5 };
        const auto stats = estimate_value(0.5, cfg, market, tiny, PoolParams{ 0.5, 0.5, 0.5 });
        s.check("sim.estimator-sanity", stats.j_estimate >= 0.0 && stats.j_estimate < 1e-10,
                "loss " + num(stats.j_estimate));
    }
    // halving h moves the estimate by less than two standard errors
    {
        SimConfig cfg;
        cfg.n_paths = 512;
        cfg.master_seed = seed + 3;
        cfg.horizon = HorizonMode::killed;
        const PoolParams pool{ 0.5, 0.9, 0.9 };
        const auto a = estimate_value(0.5, cfg, market, pen, pool);
        cfg.step_h /= 2.0;
        cfg.master_seed = seed + 4;
        const auto b = estimate_value(0.5, cfg, market, pen, pool);
        const double se = std::hypot(a.std_error, b.std_error);
        s.check("sim.h-refinement", std::abs(a.j_estimate - b.j_estimate) < 2.0 * se,
                "delta " + num(std::abs(a.j_estimate - b.j_estimate)) + " vs 2se " + num(2.0 * se));
    }
    // lattice estimate approaches the Euler estimate as xi halves
    {
        SimConfig cfg;
        cfg.n_paths = 1024;
        cfg.master_seed = seed + 5;
        cfg.horizon = HorizonMode::killed;
        cfg.truncation_tol = 1e-4;
        const PoolParams pool{ 0.5, 0.9, 0.9 };
        const auto euler = estimate_value(0.5, cfg, market, pen, pool);
        const double width = no_arb_interval(pool).width();
        double prev = -1.0;
        bool mono = true;
        SimConfig lat = cfg;
        lat.n_paths = 512;
        for (int k = 0; k < 3; ++k) {
            const double xi = width / (8 << k);
            const auto w = random_walk_estimate(0.5, xi, lat, market, pen, pool);
            const double err = std::abs(w.j_estimate - euler.j_estimate);
            if (prev >= 0.0) mono = mono && err < prev;
            prev = err;
        }
        s.check("sim.lattice-convergence", mono, "|lattice - euler| decays over dyadic xi");
    }
}

} // namespace

std::vector<CheckResult> run_all(std::uint64_t seed) {
    Suite s;
    s.stream = rng::path_stream(seed, 0xc0ffee);
    arbitrage_checks(s);
    value_checks(s);
    simulator_checks(s, seed);
    return s.results;
}

} // namespace g3m::selfcheck
