#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <vector>

#include "g3m/simulator.hpp"
#include "g3m/value.hpp"

using namespace g3m;

namespace {
const MarketParams kMarket{ 0.04, 0.02, 0.2 };
const PenaltyParams kPenalty{ 1.0, 0.5 };

SimConfig killed_cfg(std::uint64_t seed, std::uint64_t paths) {
    SimConfig cfg;
    cfg.horizon = HorizonMode::killed;
    cfg.master_seed = seed;
    cfg.n_paths = paths;
    return cfg;
}
} // namespace

TEST_CASE("step_weight") {
    SimConfig cfg; // full dynamics, h = 1e-4

    SUBCASE("frozen increment") {
        // w(1-w)(mu-r-w sigma^2) vanishes at w*, so only the noise term remains
        const double w1 = step_weight(0.5, cfg, kMarket, +1.0);
        CHECK(w1 - 0.5 == doctest::Approx(5e-4).epsilon(1e-12));
        cfg.dynamics = DynamicsMode::approximated;
        const double w2 = step_weight(0.5, cfg, kMarket, +1.0);
        CHECK(w2 - 0.5 == doctest::Approx(5e-4).epsilon(1e-12));
    }
    SUBCASE("drift cancels under averaged noise at the target weight") {
        const double up = step_weight(0.5, cfg, kMarket, +1.0);
        const double dn = step_weight(0.5, cfg, kMarket, -1.0);
        CHECK(0.5 * (up + dn) == doctest::Approx(0.5).epsilon(1e-15));
        // off target the averaged step reveals the mean-reverting drift
        const double up2 = step_weight(0.6, cfg, kMarket, +1.0);
        const double dn2 = step_weight(0.6, cfg, kMarket, -1.0);
        CHECK(0.5 * (up2 + dn2) < 0.6);
    }
    SUBCASE("edges are near fixed points and the clamp binds") {
        const double lo = step_weight(1e-9, cfg, kMarket, +1.0);
        CHECK(std::abs(lo - 1e-9) <= 1e-2 * 1e-9);
        const double hi = step_weight(1.0 - 1e-9, cfg, kMarket, -1.0);
        CHECK(std::abs(hi - (1.0 - 1e-9)) <= 1e-2 * 1e-9);
        CHECK(step_weight(0.5, cfg, kMarket, 1e9) == 1.0 - 1e-9);
        CHECK(step_weight(0.5, cfg, kMarket, -1e9) == 1e-9);
        CHECK_THROWS_AS(step_weight(0.0, cfg, kMarket, 1.0), std::domain_error);
    }
}

TEST_CASE("worker-count resolution honors the environment cap") {
    unsetenv("G3M_FEE_LAB_THREADS");
    CHECK(resolve_workers(5) == 5);
    CHECK(resolve_workers(0) >= 1);
    setenv("G3M_FEE_LAB_THREADS", "3", 1);
    CHECK(resolve_workers(8) == 3);
    CHECK(resolve_workers(2) == 2);
    CHECK(resolve_workers(0) <= 3);
    setenv("G3M_FEE_LAB_THREADS", "0", 1); // zero means no cap
    CHECK(resolve_workers(6) == 6);
    unsetenv("G3M_FEE_LAB_THREADS");
}

TEST_CASE("horizon") {
    SimConfig cfg;
    const PoolParams pool{ 0.5, 0.99, 0.99 };
    const double t = horizon_time(cfg, kMarket, kPenalty, pool);
    // ln(cap/(r tol))/r with cap ~ lambda sigma^2/2 = 0.02, tol = 1e-6
    CHECK(t > 650.0);
    CHECK(t < 750.0);

    cfg.step_h = 1e-9; // 7e11 steps: beyond the hard cap
    CHECK_THROWS_AS(horizon_time(cfg, kMarket, kPenalty, pool), std::invalid_argument);

    SimConfig bad;
    bad.step_h = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SimConfig{};
    bad.n_paths = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = SimConfig{};
    bad.truncation_tol = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("path determinism and aggregation identities") {
    const PoolParams pool{ 0.5, 0.99, 0.99 };

    SUBCASE("same seed, same path") {
        for (HorizonMode hm : { HorizonMode::killed, HorizonMode::truncated }) {
            SimConfig cfg = killed_cfg(42, 1);
            cfg.horizon = hm;
            cfg.truncation_tol = 1e-2; // short fixed horizon keeps this cheap
            const double a = simulate_path(0.5, cfg, kMarket, kPenalty, pool, 7);
            const double b = simulate_path(0.5, cfg, kMarket, kPenalty, pool, 7);
            CHECK(a == b);
            CHECK(a != simulate_path(0.5, cfg, kMarket, kPenalty, pool, 8));
        }
    }
    SUBCASE("estimate over one path equals that path") {
        SimConfig cfg = killed_cfg(43, 1);
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        CHECK(stats.j_estimate == simulate_path(0.5, cfg, kMarket, kPenalty, pool, 0));
    }
    SUBCASE("full 16-lane block equals per-path lanes bit for bit") {
        SimConfig cfg = killed_cfg(44, 16);
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        double sum = 0.0;
        for (std::uint64_t p = 0; p < 16; ++p)
            sum += simulate_path(0.5, cfg, kMarket, kPenalty, pool, p);
        CHECK(stats.j_estimate == sum / 16.0);
    }
    SUBCASE("worker count cannot change the result") {
        SimConfig cfg = killed_cfg(45, 80);
        cfg.workers = 1;
        const auto a = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        cfg.workers = 2;
        const auto b = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        cfg.workers = 8;
        const auto c = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        CHECK(a.j_estimate == b.j_estimate);
        CHECK(a.j_estimate == c.j_estimate);
        CHECK(a.std_error == c.std_error);
        CHECK(a.n_up_events == c.n_up_events);
        CHECK(a.n_down_events == c.n_down_events);
        CHECK(a.horizon == c.horizon);
    }
    SUBCASE("start weight must sit inside the interval") {
        SimConfig cfg = killed_cfg(46, 4);
        CHECK_THROWS_AS(estimate_value(0.4, cfg, kMarket, kPenalty, pool),
                        std::invalid_argument);
    }
}

TEST_CASE("kernel agrees with the public step function") {
    // one truncated path replayed by hand through step_weight + mirror folds
    SimConfig cfg;
    cfg.truncation_tol = 1e-2;
    cfg.master_seed = 99;
    cfg.n_paths = 1;
    const PoolParams pool{ 0.5, 0.97, 0.97 };
    const auto iv = no_arb_interval(pool);
    const double h = cfg.step_h;
    const std::uint64_t nsteps =
        static_cast<std::uint64_t>(std::ceil(horizon_time(cfg, kMarket, kPenalty, pool) / h));

    auto stream = rng::path_stream(cfg.master_seed, 0);
    std::uint64_t bits = 0;
    double w = 0.5, acc = 0.0;
    for (std::uint64_t n = 0; n < nsteps; ++n) {
        acc += std::exp(-kMarket.r * h * double(n)) * penalty(w, kPenalty, kMarket.sigma) * h;
        if (n + 1 >= nsteps) break;
        if (n % 64 == 0) bits = stream.next();
        const double eps = ((bits >> (n % 64)) & 1ULL) ? 1.0 : -1.0;
        double wn = step_weight(w, cfg, kMarket, eps);
        if (wn > iv.w_u_bound) wn = 2.0 * iv.w_u_bound - wn;
        if (wn < iv.w_d) wn = 2.0 * iv.w_d - wn;
        w = std::min(std::max(wn, iv.w_d), iv.w_u_bound);
    }
    const double j = simulate_path(0.5, cfg, kMarket, kPenalty, pool, 0);
    CHECK(j == doctest::Approx(acc).epsilon(1e-6));
}

TEST_CASE("estimator properties") {
    SUBCASE("loss is nonnegative and the cost component is empty when reflecting") {
        SimConfig cfg = killed_cfg(50, 512);
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, { 0.5, 0.99, 0.99 });
        CHECK(stats.j_estimate >= 0.0);
        CHECK(stats.j_estimate >= -5.0 * stats.std_error);
        CHECK(stats.cost_component == 0.0);
        CHECK(stats.n_up_events > 0);
        CHECK(stats.n_down_events > 0);
    }
    SUBCASE("smaller fee, smaller loss") {
        SimConfig cfg = killed_cfg(51, 1024);
        const auto wide = estimate_value(0.5, cfg, kMarket, kPenalty, { 0.5, 0.9, 0.9 });
        const auto tight = estimate_value(0.5, cfg, kMarket, kPenalty, { 0.5, 0.9999, 0.9999 });
        CHECK(tight.j_estimate < wide.j_estimate);
    }
    SUBCASE("truncated horizon is reported") {
        SimConfig cfg;
        cfg.n_paths = 2;
        cfg.truncation_tol = 1e-2;
        const PoolParams pool{ 0.5, 0.9, 0.9 };
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        CHECK(stats.horizon
              == doctest::Approx(horizon_time(cfg, kMarket, kPenalty, pool)).epsilon(1e-3));
    }
}

TEST_CASE("cross-oracle against the closed form") {
    // gamma = 0.99 and 0.997 at the default parameter set; the acceptance
    // suite repeats this at 1e5 paths
    for (double g : { 0.99, 0.997 }) {
        SimConfig cfg = killed_cfg(52, 4096);
        const PoolParams pool{ 0.5, g, g };
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        const double jref = value(0.5, solve_value(kMarket, kPenalty, g, g));
        const double tol = std::max(3.0 * stats.std_error, 0.05 * jref);
        INFO("gamma ", g, ": mc ", stats.j_estimate, " analytic ", jref);
        CHECK(std::abs(stats.j_estimate - jref) <= tol);
    }
}

TEST_CASE("killed and truncated estimators agree") {
    const PoolParams pool{ 0.5, 0.99, 0.99 };
    SimConfig kc = killed_cfg(53, 2048);
    const auto killed = estimate_value(0.5, kc, kMarket, kPenalty, pool);
    SimConfig tc;
    tc.master_seed = 54;
    tc.n_paths = 128;
    tc.truncation_tol = 1e-3;
    const auto trunc = estimate_value(0.5, tc, kMarket, kPenalty, pool);
    const double se = std::hypot(killed.std_error, trunc.std_error);
    CHECK(std::abs(killed.j_estimate - trunc.j_estimate)
          <= 3.0 * se + 0.02 * trunc.j_estimate);
}

TEST_CASE("halving h moves the estimate by less than two standard errors") {
    const PoolParams pool{ 0.5, 0.9, 0.9 };
    SimConfig a = killed_cfg(55, 768);
    const auto ja = estimate_value(0.5, a, kMarket, kPenalty, pool);
    SimConfig b = killed_cfg(56, 768);
    b.step_h = a.step_h / 2.0;
    const auto jb = estimate_value(0.5, b, kMarket, kPenalty, pool);
    CHECK(std::abs(ja.j_estimate - jb.j_estimate)
          < 2.0 * std::hypot(ja.std_error, jb.std_error));
}

TEST_CASE("adjust mode: the literal finite-h accounting") {
    SUBCASE("penalty off leaves pure adjustment costs") {
        SimConfig cfg = killed_cfg(57, 256);
        cfg.boundary = BoundaryMode::adjust;
        const PenaltyParams off{ 1e-12, 0.5 };
        const auto stats = estimate_value(0.5, cfg, kMarket, off, { 0.5, 0.9, 0.9 });
        CHECK(stats.j_estimate >= 0.0);
        CHECK(stats.cost_component > 0.0);
        CHECK(stats.j_estimate == doctest::Approx(stats.cost_component).epsilon(1e-6));
    }
    SUBCASE("per-event charges dominate the continuum value at practical h") {
        // the finite-h cost term is O(sqrt(h)) per unit time; at h = 1e-4 and
        // gamma = 0.99 it exceeds the closed-form J by orders of magnitude,
        // which is why the reflect mode is the cross-validation default
        SimConfig cfg = killed_cfg(58, 256);
        cfg.boundary = BoundaryMode::adjust;
        const PoolParams pool{ 0.5, 0.99, 0.99 };
        const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        const double jref = value(0.5, solve_value(kMarket, kPenalty, 0.99, 0.99));
        CHECK(stats.j_estimate > 100.0 * jref);
        CHECK(stats.cost_component > 0.99 * (stats.j_estimate - jref));
    }
    SUBCASE("deterministic like every other mode") {
        SimConfig cfg = killed_cfg(59, 48);
        cfg.boundary = BoundaryMode::adjust;
        cfg.workers = 1;
        const auto a = estimate_value(0.5, cfg, kMarket, kPenalty, { 0.5, 0.99, 0.99 });
        cfg.workers = 4;
        const auto b = estimate_value(0.5, cfg, kMarket, kPenalty, { 0.5, 0.99, 0.99 });
        CHECK(a.j_estimate == b.j_estimate);
        CHECK(a.cost_component == b.cost_component);
    }
}

TEST_CASE("gaussian noise option") {
    SimConfig cfg = killed_cfg(60, 1024);
    cfg.noise = NoiseMode::gaussian;
    const PoolParams pool{ 0.5, 0.99, 0.99 };
    const auto stats = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
    const double jref = value(0.5, solve_value(kMarket, kPenalty, 0.99, 0.99));
    CHECK(std::abs(stats.j_estimate - jref) <= std::max(3.0 * stats.std_error, 0.08 * jref));
}

TEST_CASE("birth-death lattice walk") {
    const PoolParams pool{ 0.5, 0.9, 0.9 };
    const double width = no_arb_interval(pool).width();

    SUBCASE("converges toward the Euler estimator as xi halves") {
        SimConfig cfg = killed_cfg(61, 4096);
        cfg.truncation_tol = 1e-4;
        const auto euler = estimate_value(0.5, cfg, kMarket, kPenalty, pool);
        SimConfig lat = cfg;
        lat.n_paths = 1024;
        double prev = -1.0;
        for (int k = 0; k < 3; ++k) {
            const auto stats =
                random_walk_estimate(0.5, width / double(8 << k), lat, kMarket, kPenalty, pool);
            const double err = std::abs(stats.j_estimate - euler.j_estimate);
            if (prev >= 0.0) CHECK(err < prev);
            prev = err;
            CHECK(stats.cost_component > 0.0); // the lattice charges C(xi) per exit
        }
    }
    SUBCASE("boundary charge is the arbitrage module's closed form") {
        const double xi = width / 16.0;
        CHECK(cost_up(no_arb_interval(pool).w_u_bound + xi, pool) > 0.0);
        CHECK(cost_down(no_arb_interval(pool).w_d - xi, pool) > 0.0);
    }
    SUBCASE("deterministic across workers") {
        SimConfig cfg = killed_cfg(62, 128);
        cfg.truncation_tol = 1e-3;
        cfg.workers = 1;
        const auto a = random_walk_estimate(0.5, width / 8.0, cfg, kMarket, kPenalty, pool);
        cfg.workers = 4;
        const auto b = random_walk_estimate(0.5, width / 8.0, cfg, kMarket, kPenalty, pool);
        CHECK(a.j_estimate == b.j_estimate);
    }
    SUBCASE("rejects an unusable lattice") {
        SimConfig cfg = killed_cfg(63, 4);
        CHECK_THROWS_AS(random_walk_estimate(0.5, width, cfg, kMarket, kPenalty, pool),
                        std::invalid_argument);
        // strong drift with a coarse lattice pushes p, q outside [0,1]
        const MarketParams drifty{ 0.4, 0.005, 0.2 };
        const PenaltyParams pen_lo{ 1.0, 0.3 };
        const PoolParams pool_lo{ 0.3, 0.9, 0.9 };
        const double w_lo = no_arb_interval(pool_lo).width();
        CHECK_THROWS_AS(
            random_walk_estimate(0.3, w_lo / 2.0, cfg, drifty, pen_lo, pool_lo),
            std::invalid_argument);
    }
}

TEST_CASE("boundary cost order") {
    std::vector<double> grid;
    for (int k = 0; k < 12; ++k)
        grid.push_back(1e-5 * std::pow(100.0, double(k) / 11.0));

    for (double th : { 0.3, 0.5, 0.7 })
        for (double g2 : { 0.9, 0.99 }) {
            const auto fit = boundary_cost_order({ th, 1.0, g2 }, grid);
            CHECK(fit.slope > 1.95);
            CHECK(fit.slope < 2.05);
            CHECK(fit.coefficient > 0.0);
            CHECK(std::isfinite(fit.pasting_factor));
            CHECK(fit.pasting_factor != 0.0);
        }
    // frozen smooth-pasting factor at theta = 1/2, gamma2 = 0.9
    const auto fit = boundary_cost_order({ 0.5, 1.0, 0.9 }, grid);
    CHECK(fit.pasting_factor == doctest::Approx(1.05555556).epsilon(1e-4));

    CHECK_THROWS_AS(boundary_cost_order({ 0.5, 1.0, 1.0 }, grid), std::invalid_argument);
    const std::vector<double> small{ 1e-5, 2e-5, 3e-5 };
    CHECK_THROWS_AS(boundary_cost_order({ 0.5, 1.0, 0.9 }, small), std::invalid_argument);
    const std::vector<double> wide{ 1e-7, 1e-5, 1e-5, 1e-5, 1e-5, 1e-5, 1e-5, 1e-5 };
    CHECK_THROWS_AS(boundary_cost_order({ 0.5, 1.0, 0.9 }, wide), std::invalid_argument);
}
