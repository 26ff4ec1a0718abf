#include "g3m/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

namespace g3m {

// ------------------------------- RNG ----------------------------------------

namespace rng {

std::uint64_t mix(std::uint64_t x) {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t Stream::next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Stream::u01() { return double(next() >> 11) * 0x1.0p-53; }

namespace {
Stream derived(std::uint64_t master, std::uint64_t kind, std::uint64_t index) {
    return { mix(mix(master ^ kind * 0x9e3779b97f4a7c15ULL) ^ index) };
}
} // namespace

Stream path_stream(std::uint64_t master_seed, std::uint64_t path_index) {
    return derived(master_seed, 1, path_index);
}
Stream block_stream(std::uint64_t master_seed, std::uint64_t block_index) {
    return derived(master_seed, 2, block_index);
}
Stream lattice_stream(std::uint64_t master_seed, std::uint64_t path_index) {
    return derived(master_seed, 3, path_index);
}

} // namespace rng

// ----------------------------- configuration --------------------------------

void SimConfig::validate() const {
    if (!(step_h > 0.0))
        throw std::invalid_argument("SimConfig: step_h must be positive");
    if (n_paths < 1)
        throw std::invalid_argument("SimConfig: n_paths must be >= 1");
    if (!(truncation_tol > 0.0))
        throw std::invalid_argument("SimConfig: truncation_tol must be positive");
}

unsigned resolve_workers(unsigned requested) {
    unsigned n = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("G3M_FEE_LAB_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
    return std::max(1u, n);
}

// ------------------------------ stepping ------------------------------------

namespace {

constexpr std::uint64_t kMaxSteps = 100000000ULL; // hard cap
constexpr std::uint64_t kBlock = 16;              // paths per kill-time block

struct StepCtx {
    bool full = true;
    double c0h = 0.0, c1h = 0.0, sq = 0.0; // full-mode coefficients
    double ah = 0.0, bsq = 0.0;            // approximated-mode coefficients
    double wd = 0.0, wu = 0.0;
    double wstar = 0.5, pen_h = 0.0;       // 0.5 lambda sigma^2 h
    double decay = 1.0, rh = 0.0;
    bool discounted = true;                // false: killed mode
    bool adjust = false;
    PoolParams pool;
};

StepCtx make_ctx(const SimConfig& cfg, const MarketParams& market,
                 const PenaltyParams& pen, const PoolParams& pool,
                 const NoArbInterval& iv) {
    StepCtx c;
    c.full = cfg.dynamics == DynamicsMode::full;
    const double h = cfg.step_h, sqh = std::sqrt(h);
    c.c0h = (market.mu - market.r) * h;
    c.c1h = market.sigma * market.sigma * h;
    c.sq = market.sigma * sqh;
    const DriftVol dv = drift_vol(pen, market);
    c.ah = dv.a * h;
    c.bsq = dv.b * sqh;
    c.wd = iv.w_d;
    c.wu = iv.w_u_bound;
    c.wstar = pen.w_star;
    c.pen_h = 0.5 * pen.lambda * market.sigma * market.sigma * h;
    c.rh = market.r * h;
    c.decay = std::exp(-c.rh);
    c.discounted = cfg.horizon == HorizonMode::truncated;
    c.adjust = cfg.boundary == BoundaryMode::adjust;
    c.pool = pool;
    return c;
}

struct PathResult {
    double pen_acc = 0.0;  // sum of disc * (w - w*)^2, penalty units applied later
    double cost_acc = 0.0; // discounted adjustment costs (adjust mode)
    double up = 0.0, dn = 0.0;
    std::uint64_t steps = 0;
};

// Fast path: rademacher noise, reflecting boundary. The same template at
// L = 1 serves as the scalar reference and the tail-block runner, so lane
// packing cannot change results; every step op is an explicit fma/min/max.
template <int L, bool Full>
void run_block_reflect(const StepCtx& c, std::uint64_t master_seed,
                       std::uint64_t path0, int lanes, double w0,
                       std::uint64_t nsteps, PathResult* out) {
    double w[L], acc[L], up[L], dn[L];
    std::uint64_t st[L], bits[L];
    for (int l = 0; l < L; ++l) {
        w[l] = w0; acc[l] = up[l] = dn[l] = 0.0;
        st[l] = rng::path_stream(master_seed, path0 + l).state;
        bits[l] = 0;
    }
    if (nsteps == 0) {
        for (int l = 0; l < lanes; ++l) out[l] = PathResult{};
        return;
    }
    const std::uint64_t ntrans = nsteps - 1;
    const double noise = Full ? c.sq : c.bsq;
    const double drift_u = c.ah; // approximated-mode constant
    double dtab[64];

    for (std::uint64_t n0 = 0; n0 < nsteps; n0 += 64) {
        const int kmax = static_cast<int>(std::min<std::uint64_t>(64, nsteps - n0));
        const int ktrans = static_cast<int>(n0 < ntrans
                               ? std::min<std::uint64_t>(kmax, ntrans - n0) : 0);
        if (ktrans > 0)
            for (int l = 0; l < L; ++l) {
                rng::Stream s{ st[l] };
                bits[l] = s.next();
                st[l] = s.state;
            }
        if (c.discounted) {
            double d = std::exp(-c.rh * double(n0));
            for (int k = 0; k < kmax; ++k) { dtab[k] = d; d *= c.decay; }
        } else {
            for (int k = 0; k < kmax; ++k) dtab[k] = 1.0;
        }
        for (int k = 0; k < ktrans; ++k) {
            const double dk = dtab[k];
            for (int l = 0; l < L; ++l) {
                const double dev = w[l] - c.wstar;
                acc[l] = std::fma(dev * dev, dk, acc[l]);
                const double e = ((bits[l] >> k) & 1ULL) ? noise : -noise;
                const double base = Full ? w[l] * (1.0 - w[l]) : w[l];
                const double u = Full ? std::fma(-c.c1h, w[l], c.c0h) : drift_u;
                double wn = std::fma(base, u, w[l]);
                wn = std::fma(base, e, wn);
                wn = std::min(std::max(wn, 1e-9), 1.0 - 1e-9);
                up[l] += wn > c.wu ? 1.0 : 0.0;
                dn[l] += wn < c.wd ? 1.0 : 0.0;
                wn = std::fma(-2.0, std::max(wn - c.wu, 0.0), wn);
                wn = std::fma(2.0, std::max(c.wd - wn, 0.0), wn);
                w[l] = std::min(std::max(wn, c.wd), c.wu);
            }
        }
        for (int k = ktrans; k < kmax; ++k) { // trailing accrual-only states
            const double dk = dtab[k];
            for (int l = 0; l < L; ++l) {
                const double dev = w[l] - c.wstar;
                acc[l] = std::fma(dev * dev, dk, acc[l]);
            }
        }
    }
    for (int l = 0; l < lanes; ++l)
        out[l] = PathResult{ acc[l], 0.0,
                             up[l], dn[l], nsteps };
}

struct GaussState {
    double spare = 0.0;
    bool has = false;
};

double gauss(rng::Stream& s, GaussState& g) {
    if (g.has) { g.has = false; return g.spare; }
    double a, b, q;
    do {
        a = 2.0 * s.u01() - 1.0;
        b = 2.0 * s.u01() - 1.0;
        q = a * a + b * b;
    } while (q >= 1.0 || q == 0.0);
    const double f = std::sqrt(-2.0 * std::log(q) / q);
    g.spare = b * f;
    g.has = true;
    return a * f;
}

// Generic scalar path: gaussian noise and/or adjust-mode boundary handling.
PathResult run_path_generic(const StepCtx& c, const SimConfig& cfg,
                            std::uint64_t master_seed, std::uint64_t path_index,
                            double w0, std::uint64_t nsteps) {
    PathResult r;
    r.steps = nsteps;
    if (nsteps == 0) return r;
    const std::uint64_t ntrans = nsteps - 1;
    const bool rademacher = cfg.noise == NoiseMode::rademacher;
    const double noise_scale = c.full ? c.sq : c.bsq;

    rng::Stream s = rng::path_stream(master_seed, path_index);
    GaussState gs;
    std::uint64_t bits = 0;
    double w = w0;
    for (std::uint64_t n = 0; n < nsteps; ++n) {
        const double disc = c.discounted ? std::exp(-c.rh * double(n)) : 1.0;
        const double dev = w - c.wstar;
        r.pen_acc = std::fma(dev * dev, disc, r.pen_acc);
        if (n >= ntrans) break;

        double e;
        if (rademacher) {
            if (n % 64 == 0) bits = s.next();
            e = ((bits >> (n % 64)) & 1ULL) ? noise_scale : -noise_scale;
        } else {
            e = gauss(s, gs) * noise_scale;
        }
        const double base = c.full ? w * (1.0 - w) : w;
        const double u = c.full ? std::fma(-c.c1h, w, c.c0h) : c.ah;
        double wn = std::fma(base, u, w);
        wn = std::fma(base, e, wn);
        wn = std::min(std::max(wn, 1e-9), 1.0 - 1e-9);

        if (wn > c.wu) {
            r.up += 1.0;
            if (c.adjust) {
                const double disc_next = c.discounted ? disc * c.decay : 1.0;
                r.cost_acc = std::fma(cost_up(wn, c.pool), disc_next, r.cost_acc);
                wn = post_weight_up(wn, c.pool);
            } else {
                wn = std::fma(-2.0, std::max(wn - c.wu, 0.0), wn);
                wn = std::fma(2.0, std::max(c.wd - wn, 0.0), wn);
                wn = std::min(std::max(wn, c.wd), c.wu);
            }
        } else if (wn < c.wd) {
            r.dn += 1.0;
            if (c.adjust) {
                const double disc_next = c.discounted ? disc * c.decay : 1.0;
                r.cost_acc = std::fma(cost_down(wn, c.pool), disc_next, r.cost_acc);
                wn = post_weight_down(wn, c.pool);
            } else {
                wn = std::fma(2.0, std::max(c.wd - wn, 0.0), wn);
                wn = std::fma(-2.0, std::max(wn - c.wu, 0.0), wn);
                wn = std::min(std::max(wn, c.wd), c.wu);
            }
        }
        w = wn;
    }
    return r;
}

std::uint64_t kill_steps(const SimConfig& cfg, const StepCtx& c,
                         std::uint64_t block_index) {
    rng::Stream s = rng::block_stream(cfg.master_seed, block_index);
    const double u = std::max(s.u01(), 0x1.0p-53);
    const double n = std::floor(std::log(u) / std::log(c.decay));
    return n >= double(kMaxSteps) ? kMaxSteps : static_cast<std::uint64_t>(n);
}

double finish_j(const StepCtx& c, const PathResult& r) {
    double j = r.pen_acc * c.pen_h + r.cost_acc;
    if (!c.discounted) j *= std::exp(c.rh); // killed-mode survival offset
    return j;
}

} // namespace

double step_weight(double w, const SimConfig& cfg, const MarketParams& market,
                   double noise) {
    market.validate();
    if (!(w > 0.0 && w < 1.0))
        throw std::domain_error("step_weight: w must lie in (0,1)");
    const double h = cfg.step_h, sqh = std::sqrt(h);
    double wn;
    if (cfg.dynamics == DynamicsMode::full) {
        const double base = w * (1.0 - w);
        wn = w + base * (market.mu - market.r - w * market.sigma * market.sigma) * h
               + base * market.sigma * noise * sqh;
    } else {
        const double ws = target_weight(market);
        const double a = (1.0 - ws) * (market.mu - market.r - ws * market.sigma * market.sigma);
        const double b = (1.0 - ws) * market.sigma;
        wn = w + w * a * h + w * b * noise * sqh;
    }
    return std::min(std::max(wn, 1e-9), 1.0 - 1e-9);
}

double horizon_time(const SimConfig& cfg, const MarketParams& market,
                    const PenaltyParams& pen, const PoolParams& pool) {
    cfg.validate();
    market.validate();
    pen.validate();
    const NoArbInterval iv = no_arb_interval(pool);

    // coarse scan of boundary costs at a few multiples of the step scale
    const double s_up = iv.w_u_bound * (1.0 - iv.w_u_bound) * market.sigma * std::sqrt(cfg.step_h);
    const double s_dn = iv.w_d * (1.0 - iv.w_d) * market.sigma * std::sqrt(cfg.step_h);
    double max_cost = 0.0;
    for (double m : { 0.5, 1.0, 2.0, 4.0 }) {
        const double wu_probe = iv.w_u_bound + m * s_up;
        if (wu_probe < 1.0 - 1e-9)
            max_cost = std::max(max_cost, cost_up(wu_probe, pool));
        const double wd_probe = iv.w_d - m * s_dn;
        if (wd_probe > 1e-9)
            max_cost = std::max(max_cost, cost_down(wd_probe, pool));
    }
    const double cap = 0.5 * pen.lambda * market.sigma * market.sigma + max_cost;
    const double t = std::log(cap / (market.r * cfg.truncation_tol)) / market.r;
    if (!(t > 0.0))
        return cfg.step_h; // tolerance already beyond the whole-loss bound
    if (t / cfg.step_h > double(kMaxSteps))
        throw std::invalid_argument("horizon exceeds the 1e8-step cap; raise truncation_tol or step_h");
    return t;
}

namespace {

std::uint64_t fixed_steps(const SimConfig& cfg, const MarketParams& market,
                          const PenaltyParams& pen, const PoolParams& pool) {
    return static_cast<std::uint64_t>(
        std::ceil(horizon_time(cfg, market, pen, pool) / cfg.step_h));
}

bool fast_path(const SimConfig& cfg) {
    return cfg.noise == NoiseMode::rademacher && cfg.boundary == BoundaryMode::reflect;
}

void run_lane_group(const StepCtx& ctx, const SimConfig& cfg, double w0,
                    std::uint64_t path0, int lanes, std::uint64_t nsteps,
                    PathResult* out) {
    if (fast_path(cfg)) {
        if (lanes == kBlock) {
            if (ctx.full)
                run_block_reflect<kBlock, true>(ctx, cfg.master_seed, path0, lanes, w0, nsteps, out);
            else
                run_block_reflect<kBlock, false>(ctx, cfg.master_seed, path0, lanes, w0, nsteps, out);
        } else {
            for (int l = 0; l < lanes; ++l) {
                if (ctx.full)
                    run_block_reflect<1, true>(ctx, cfg.master_seed, path0 + l, 1, w0, nsteps, out + l);
                else
                    run_block_reflect<1, false>(ctx, cfg.master_seed, path0 + l, 1, w0, nsteps, out + l);
            }
        }
    } else {
        for (int l = 0; l < lanes; ++l)
            out[l] = run_path_generic(ctx, cfg, cfg.master_seed, path0 + l, w0, nsteps);
    }
}

void check_start_weight(double w0, const NoArbInterval& iv) {
    if (!iv.contains(w0))
        throw std::invalid_argument("start weight w0 must lie inside [w_D, w_U]");
}

} // namespace

double simulate_path(double w0, const SimConfig& cfg, const MarketParams& market,
                     const PenaltyParams& pen, const PoolParams& pool,
                     std::uint64_t path_index) {
    cfg.validate();
    pool.validate();
    const NoArbInterval iv = no_arb_interval(pool);
    check_start_weight(w0, iv);
    const StepCtx ctx = make_ctx(cfg, market, pen, pool, iv);
    const std::uint64_t nsteps = cfg.horizon == HorizonMode::truncated
        ? fixed_steps(cfg, market, pen, pool)
        : kill_steps(cfg, ctx, path_index / kBlock);
    PathResult r;
    run_lane_group(ctx, cfg, w0, path_index, 1, nsteps, &r);
    return finish_j(ctx, r);
}

PathStats estimate_value(double w0, const SimConfig& cfg, const MarketParams& market,
                         const PenaltyParams& pen, const PoolParams& pool) {
    cfg.validate();
    pool.validate();
    const NoArbInterval iv = no_arb_interval(pool);
    check_start_weight(w0, iv);
    const StepCtx ctx = make_ctx(cfg, market, pen, pool, iv);
    const bool truncated = cfg.horizon == HorizonMode::truncated;
    const std::uint64_t nsteps_fixed =
        truncated ? fixed_steps(cfg, market, pen, pool) : 0;

    const std::uint64_t n = cfg.n_paths;
    const std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
    std::vector<double> j(n), cost(n), up(n), dn(n);
    std::vector<std::uint64_t> steps(n);

    const unsigned workers = std::min<std::uint64_t>(resolve_workers(cfg.workers), nblocks);
    std::atomic<std::uint64_t> next{ 0 };
    auto worker = [&]() {
        PathResult out[kBlock];
        for (;;) {
            const std::uint64_t b = next.fetch_add(1);
            if (b >= nblocks) break;
            const std::uint64_t path0 = b * kBlock;
            const int lanes = static_cast<int>(std::min<std::uint64_t>(kBlock, n - path0));
            const std::uint64_t nsteps = truncated ? nsteps_fixed : kill_steps(cfg, ctx, b);
            run_lane_group(ctx, cfg, w0, path0, lanes, nsteps, out);
            for (int l = 0; l < lanes; ++l) {
                j[path0 + l] = finish_j(ctx, out[l]);
                cost[path0 + l] = out[l].cost_acc * (truncated ? 1.0 : std::exp(ctx.rh));
                up[path0 + l] = out[l].up;
                dn[path0 + l] = out[l].dn;
                steps[path0 + l] = out[l].steps;
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool_threads;
        pool_threads.reserve(workers);
        for (unsigned t = 0; t < workers; ++t) pool_threads.emplace_back(worker);
        for (auto& t : pool_threads) t.join();
    }

    // ordered reduction: results are a function of path index only
    PathStats stats;
    double jsum = 0.0, csum = 0.0, tsum = 0.0;
    std::uint64_t upsum = 0, dnsum = 0;
    for (std::uint64_t p = 0; p < n; ++p) {
        jsum += j[p];
        csum += cost[p];
        tsum += double(steps[p]) * cfg.step_h;
        upsum += static_cast<std::uint64_t>(up[p]);
        dnsum += static_cast<std::uint64_t>(dn[p]);
    }
    stats.j_estimate = jsum / double(n);
    stats.cost_component = csum / double(n);
    stats.horizon = tsum / double(n);
    stats.n_up_events = upsum;
    stats.n_down_events = dnsum;

    // standard error over independent replication units: paths when truncated,
    // kill-time blocks otherwise (paths inside a block share the lifetime)
    if (truncated) {
        if (n > 1) {
            double ss = 0.0;
            for (std::uint64_t p = 0; p < n; ++p) {
                const double d = j[p] - stats.j_estimate;
                ss += d * d;
            }
            stats.std_error = std::sqrt(ss / double(n - 1) / double(n));
        }
    } else if (nblocks > 1) {
        std::vector<double> bm(nblocks);
        for (std::uint64_t b = 0; b < nblocks; ++b) {
            const std::uint64_t p0 = b * kBlock;
            const std::uint64_t p1 = std::min(n, p0 + kBlock);
            double s = 0.0;
            for (std::uint64_t p = p0; p < p1; ++p) s += j[p];
            bm[b] = s / double(p1 - p0);
        }
        double mean = 0.0;
        for (double v : bm) mean += v;
        mean /= double(nblocks);
        double ss = 0.0;
        for (double v : bm) ss += (v - mean) * (v - mean);
        stats.std_error = std::sqrt(ss / double(nblocks - 1) / double(nblocks));
    }
    return stats;
}

// ---------------------------- birth-death lattice ---------------------------

PathStats random_walk_estimate(double w0, double lattice_xi, const SimConfig& cfg,
                               const MarketParams& market, const PenaltyParams& pen,
                               const PoolParams& pool) {
    cfg.validate();
    pool.validate();
    market.validate();
    pen.validate();
    const NoArbInterval iv = no_arb_interval(pool);
    check_start_weight(w0, iv);
    const double width = iv.width();
    if (!(lattice_xi > 0.0) || lattice_xi > width / 2.0)
        throw std::invalid_argument("random_walk_estimate: xi must lie in (0, width/2]");

    const long m = std::max(2L, std::lround(width / lattice_xi));
    const double xi = width / double(m);
    const DriftVol dv = drift_vol(pen, market);
    const double a = dv.a, b2 = dv.b * dv.b;

    std::vector<double> wstate(m + 1), q_up(m + 1), tau(m + 1), step_disc(m + 1), phi_tau(m + 1);
    for (long i = 0; i <= m; ++i) {
        const double wi = iv.w_d + xi * double(i);
        const double ratio = a * xi / (b2 * wi);
        if (!(std::abs(ratio) <= 1.0))
            throw std::invalid_argument("random_walk_estimate: xi too large, p/q leave [0,1]");
        wstate[i] = wi;
        q_up[i] = 0.5 * (1.0 + ratio);
        tau[i] = xi * xi / (b2 * wi * wi);
        step_disc[i] = std::exp(-market.r * tau[i]);
        phi_tau[i] = penalty(wi, pen, market.sigma) * tau[i];
    }
    const double t_end = horizon_time(cfg, market, pen, pool);
    const double tau_min = *std::min_element(tau.begin(), tau.end());
    if (t_end / tau_min > double(kMaxSteps))
        throw std::invalid_argument("random_walk_estimate: horizon exceeds the 1e8-step cap");

    // boundary exits: cost and jump target are the same closed forms used by
    // the arbitrage module, evaluated one lattice spacing outside
    const double cost_at_dn = cost_down(iv.w_d - xi, pool);
    const double cost_at_up = cost_up(iv.w_u_bound + xi, pool);
    const long jump_dn = std::clamp(std::lround((post_weight_down(iv.w_d - xi, pool) - iv.w_d) / xi), 0L, m);
    const long jump_up = std::clamp(std::lround((post_weight_up(iv.w_u_bound + xi, pool) - iv.w_d) / xi), 0L, m);
    const long i0 = std::clamp(std::lround((w0 - iv.w_d) / xi), 0L, m);

    const std::uint64_t n = cfg.n_paths;
    std::vector<double> j(n), costv(n), upv(n), dnv(n);

    const unsigned workers = std::min<std::uint64_t>(resolve_workers(cfg.workers), n);
    std::atomic<std::uint64_t> next{ 0 };
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t p = next.fetch_add(1);
            if (p >= n) break;
            rng::Stream s = rng::lattice_stream(cfg.master_seed, p);
            long i = i0;
            double t = 0.0, disc = 1.0, pen_acc = 0.0, cost_acc = 0.0, up = 0.0, dn = 0.0;
            std::uint64_t step_count = 0;
            while (t < t_end) {
                pen_acc = std::fma(phi_tau[i], disc, pen_acc);
                const double disc_next = disc * step_disc[i];
                t += tau[i];
                const bool move_up = s.u01() < q_up[i];
                if (move_up) {
                    if (i == m) {
                        up += 1.0;
                        cost_acc = std::fma(cost_at_up, disc_next, cost_acc);
                        i = jump_up;
                    } else {
                        ++i;
                    }
                } else {
                    if (i == 0) {
                        dn += 1.0;
                        cost_acc = std::fma(cost_at_dn, disc_next, cost_acc);
                        i = jump_dn;
                    } else {
                        --i;
                    }
                }
                disc = disc_next;
                if (++step_count % 4096 == 0)
                    disc = std::exp(-market.r * t); // refresh the running product
            }
            j[p] = pen_acc + cost_acc;
            costv[p] = cost_acc;
            upv[p] = up;
            dnv[p] = dn;
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool_threads;
        for (unsigned t = 0; t < workers; ++t) pool_threads.emplace_back(worker);
        for (auto& t : pool_threads) t.join();
    }

    PathStats stats;
    double jsum = 0.0, csum = 0.0;
    std::uint64_t upsum = 0, dnsum = 0;
    for (std::uint64_t p = 0; p < n; ++p) {
        jsum += j[p];
        csum += costv[p];
        upsum += static_cast<std::uint64_t>(upv[p]);
        dnsum += static_cast<std::uint64_t>(dnv[p]);
    }
    stats.j_estimate = jsum / double(n);
    stats.cost_component = csum / double(n);
    stats.horizon = t_end;
    stats.n_up_events = upsum;
    stats.n_down_events = dnsum;
    if (n > 1) {
        double ss = 0.0;
        for (std::uint64_t p = 0; p < n; ++p) {
            const double d = j[p] - stats.j_estimate;
            ss += d * d;
        }
        stats.std_error = std::sqrt(ss / double(n - 1) / double(n));
    }
    return stats;
}

// --------------------------- boundary cost order ----------------------------

BoundaryCostOrder boundary_cost_order(const PoolParams& pool,
                                      std::span<const double> xi_grid) {
    pool.validate();
    if (pool.gamma2 == 1.0)
        throw std::invalid_argument("boundary_cost_order: interval collapsed at gamma2 = 1");
    if (xi_grid.size() < 8)
        throw std::invalid_argument("boundary_cost_order: need at least 8 xi points");
    const double wu = no_arb_interval(pool).w_u_bound;

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = double(xi_grid.size());
    for (double xi : xi_grid) {
        if (!(xi >= 1e-6 && xi <= 1e-2))
            throw std::invalid_argument("boundary_cost_order: xi grid must lie in [1e-6, 1e-2]");
        const double c = cost_up(wu + xi, pool);
        if (!(c > 0.0))
            throw std::invalid_argument("boundary_cost_order: cost underflow, grid too small");
        const double lx = std::log(xi), ly = std::log(c);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    BoundaryCostOrder out;
    out.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.coefficient = std::exp((sy - out.slope * sx) / n);

    const double e = 1e-7; // one-sided second-order difference for w_u'(0+)
    const double d1 = post_weight_up(wu + e, pool) - wu;
    const double d2 = post_weight_up(wu + 2.0 * e, pool) - wu;
    out.pasting_factor = 1.0 - (4.0 * d1 - d2) / (2.0 * e);
    return out;
}

} // namespace g3m
