#include "g3m/arbitrage.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace g3m {

namespace {

// x^p via exp(p*log(x)), x clamped away from zero: cost formulas evaluate
// x^theta for x near 0.
inline double pw(double x, double p) {
    return std::exp(p * std::log(std::max(x, 1e-300)));
}

inline void check_weight_range(double w) {
    if (!(w >= 1e-12 && w <= 1.0 - 1e-12))
        throw std::domain_error("weight outside [1e-12, 1-1e-12]");
}

inline double geo_mean_factor(double theta) {
    // 1 / (theta^theta * (1-theta)^(1-theta))
    return 1.0 / (pw(theta, theta) * pw(1.0 - theta, 1.0 - theta));
}

} // namespace

void PoolParams::validate() const {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("PoolParams: theta must lie in (0,1)");
    if (!(gamma1 > 0.0 && gamma1 <= 1.0))
        throw std::invalid_argument("PoolParams: gamma1 must lie in (0,1]");
    if (!(gamma2 > 0.0 && gamma2 <= 1.0))
        throw std::invalid_argument("PoolParams: gamma2 must lie in (0,1]");
}

void PoolState::validate() const {
    if (!(r_alpha > 0.0) || !(r_beta > 0.0))
        throw std::invalid_argument("PoolState: reserves must be positive");
}

double portfolio_weight(const PoolState& state, double price) {
    state.validate();
    if (!(price > 0.0))
        throw std::domain_error("portfolio_weight: price must be positive");
    const double v_beta = price * state.r_beta;
    return v_beta / (state.r_alpha + v_beta);
}

double pool_spot_price(const PoolState& state, const PoolParams& params) {
    params.validate();
    state.validate();
    return params.theta * state.r_alpha / ((1.0 - params.theta) * state.r_beta);
}

NoArbInterval no_arb_interval(const PoolParams& params) {
    params.validate();
    const double th = params.theta;
    NoArbInterval iv;
    iv.w_d = params.gamma1 * th / (1.0 - th + params.gamma1 * th);
    iv.w_u_bound = th / (params.gamma2 * (1.0 - th) + th);
    return iv;
}

double cost_down(double w, const PoolParams& params) {
    params.validate();
    check_weight_range(w);
    const double w_d = no_arb_interval(params).w_d;
    if (w > w_d)
        throw std::domain_error("cost_down: w above w_D, no profitable trade adds beta");
    const double th = params.theta;
    const double c = (1.0 - w)
                   - geo_mean_factor(th) * pw(w / params.gamma1, th) * pw(1.0 - w, 1.0 - th)
                   + w / params.gamma1;
    return std::max(c, 0.0);
}

double cost_up(double w, const PoolParams& params) {
    params.validate();
    check_weight_range(w);
    const double w_u = no_arb_interval(params).w_u_bound;
    if (w < w_u)
        throw std::domain_error("cost_up: w below w_U, no profitable trade adds alpha");
    const double th = params.theta;
    const double c = (1.0 - w) / params.gamma2
                   - geo_mean_factor(th) * pw((1.0 - w) / params.gamma2, 1.0 - th) * pw(w, th)
                   + w;
    return std::max(c, 0.0);
}

double post_weight_down(double w, const PoolParams& params) {
    params.validate();
    check_weight_range(w);
    const NoArbInterval iv = no_arb_interval(params);
    if (w > iv.w_d)
        throw std::domain_error("post_weight_down: w above w_D");
    const double th = params.theta;
    const double t = pw(params.gamma1, th)
                   * pw((1.0 - th) / th * w / (1.0 - w), 1.0 - th)
                   * (1.0 - 1.0 / params.gamma1);
    // containment holds analytically; keep last-ulp rounding inside the interval
    return std::clamp((1.0 + t) / (1.0 / th + t), iv.w_d, iv.w_u_bound);
}

double post_weight_up(double w, const PoolParams& params) {
    params.validate();
    check_weight_range(w);
    const NoArbInterval iv = no_arb_interval(params);
    if (w < iv.w_u_bound)
        throw std::domain_error("post_weight_up: w below w_U");
    const double th = params.theta;
    const double t = pw(params.gamma2 * (1.0 - th) / th, 1.0 - th)
                   * pw((1.0 - w) / w, th)
                   * (1.0 - 1.0 / params.gamma2);
    return std::clamp(1.0 / (1.0 / th + t), iv.w_d, iv.w_u_bound);
}

ArbitrageOutcome optimal_trade(const PoolState& state, double price,
                               const PoolParams& params) {
    params.validate();
    const double w = portfolio_weight(state, price);
    const NoArbInterval iv = no_arb_interval(params);
    const double th = params.theta;
    const double ra = state.r_alpha, rb = state.r_beta;

    ArbitrageOutcome out;
    out.post_weight = w;
    if (iv.contains(w))
        return out; // boundary points included: cost vanishes there

    if (w < iv.w_d) {
        // arbitrageur pays beta into the pool, withdraws alpha
        const double da_out = ra - pw((1.0 - th) / (params.gamma1 * th)
                                      * price * rb * pw(ra, (1.0 - th) / th), th);
        const double db_in = pw(th / (1.0 - th) * ra / price, 1.0 - th)
                           * pw(rb / params.gamma1, th) - rb / params.gamma1;
        out.direction = TradeDirection::add_beta;
        out.delta_alpha = -da_out;
        out.delta_beta = db_in;
        out.cost_fraction = cost_down(w, params);
        out.post_weight = post_weight_down(w, params);
    } else {
        // arbitrageur pays alpha into the pool, withdraws beta
        const double db_out = rb - pw(th / (params.gamma2 * (1.0 - th))
                                      * ra / price * pw(rb, th / (1.0 - th)), 1.0 - th);
        const double da_in = pw((1.0 - th) / th * price * rb, th)
                           * pw(ra / params.gamma2, 1.0 - th) - ra / params.gamma2;
        out.direction = TradeDirection::add_alpha;
        out.delta_alpha = da_in;
        out.delta_beta = -db_out;
        out.cost_fraction = cost_up(w, params);
        out.post_weight = post_weight_up(w, params);
    }
    return out;
}

namespace {

struct GridBest {
    double profit = 0.0;
    double x = 0.0;    // trade size in its own coordinate
    double step = 0.0; // final refined spacing
};

// Maximize f over [0, xmax]: composite geometric+linear coarse grid, then two
// linear refinement passes (x100 each) around the running argmax.
template <typename F>
GridBest grid_maximize(F&& f, double xmax, int n) {
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(2 * n + 2));
    xs.push_back(0.0);
    for (int k = 0; k < n; ++k) // nine decades up to xmax
        xs.push_back(xmax * std::pow(10.0, -9.0 * (1.0 - double(k) / (n - 1))));
    for (int k = 1; k <= n; ++k)
        xs.push_back(xmax * double(k) / n);
    std::sort(xs.begin(), xs.end());

    std::size_t best = 0;
    double fbest = f(xs[0]);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double v = f(xs[i]);
        if (v > fbest) { fbest = v; best = i; }
    }
    double lo = best > 0 ? xs[best - 1] : xs[0];
    double hi = best + 1 < xs.size() ? xs[best + 1] : xs.back();
    double xb = xs[best];

    double step = 0.0;
    for (int pass = 0; pass < 2; ++pass) {
        constexpr int m = 200;
        step = (hi - lo) / m;
        if (step <= 0.0) break;
        int ib = 0;
        double fb = f(lo);
        for (int k = 1; k <= m; ++k) {
            const double v = f(lo + step * k);
            if (v > fb) { fb = v; ib = k; }
        }
        xb = lo + step * ib;
        fbest = fb;
        lo = std::max(lo, xb - step);
        hi = std::min(hi, xb + step);
    }
    return { fbest, xb, step };
}

} // namespace

BruteForceResult brute_force_arb_profit(const PoolState& state, double price,
                                        const PoolParams& params, int grid_points) {
    params.validate();
    state.validate();
    if (!(price > 0.0))
        throw std::domain_error("brute_force_arb_profit: price must be positive");
    if (grid_points < 1000)
        throw std::invalid_argument("brute_force_arb_profit: grid_points must be >= 1000");

    const double th = params.theta;
    const double ra = state.r_alpha, rb = state.r_beta;

    // down: withdraw x alpha, pay beta
    auto profit_down = [&](double x) {
        const double db = rb / params.gamma1 * (pw(ra / (ra - x), (1.0 - th) / th) - 1.0);
        return x - price * db;
    };
    // up: withdraw y beta, pay alpha
    auto profit_up = [&](double y) {
        const double da = ra / params.gamma2 * (pw(rb / (rb - y), th / (1.0 - th)) - 1.0);
        return price * y - da;
    };

    const GridBest down = grid_maximize(profit_down, ra * (1.0 - 1e-9), grid_points);
    const GridBest up = grid_maximize(profit_up, rb * (1.0 - 1e-9), grid_points);

    BruteForceResult res;
    if (down.profit <= 0.0 && up.profit <= 0.0) {
        res.max_profit = std::max(down.profit, up.profit);
        if (res.max_profit < 0.0) res.max_profit = 0.0; // null trade dominates
        return res;
    }
    if (down.profit >= up.profit) {
        res.max_profit = down.profit;
        res.direction = TradeDirection::add_beta;
        res.argmax_delta_alpha = -down.x;
        res.alpha_step = down.step;
    } else {
        res.max_profit = up.profit;
        res.direction = TradeDirection::add_alpha;
        // map the beta-side argmax and spacing into alpha units
        auto alpha_in = [&](double y) {
            return ra / params.gamma2 * (pw(rb / (rb - y), th / (1.0 - th)) - 1.0);
        };
        res.argmax_delta_alpha = alpha_in(up.x);
        const double y1 = std::max(up.x - up.step, 0.0), y2 = up.x + up.step;
        res.alpha_step = std::abs(alpha_in(y2) - alpha_in(y1)) / 2.0;
    }
    return res;
}

} // namespace g3m
