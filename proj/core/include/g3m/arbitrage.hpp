#pragma once

#include <cstdint>

namespace g3m {

// Two-asset geometric mean market maker with trading function
//   psi(R_alpha, R_beta) = R_alpha^(1-theta) * R_beta^theta.
// gamma1 scales incoming risky coin (beta), gamma2 incoming numeraire (alpha);
// the fee charged on a trade is 1 - gamma.
struct PoolParams {
    double theta  = 0.5;
    double gamma1 = 1.0;
    double gamma2 = 1.0;

    void validate() const; // throws std::invalid_argument
};

struct PoolState {
    double r_alpha = 0.0; // numeraire reserve
    double r_beta  = 0.0; // risky coin reserve

    void validate() const; // throws std::invalid_argument
};

// Fee-induced no-trade region in portfolio-weight space. Collapses to {theta}
// at zero fee (gamma1 = gamma2 = 1).
struct NoArbInterval {
    double w_d       = 0.0; // lower endpoint
    double w_u_bound = 0.0; // upper endpoint

    double width() const { return w_u_bound - w_d; }
    bool contains(double w) const { return w >= w_d && w <= w_u_bound; }
};

enum class TradeDirection {
    none,      // weight inside [w_D, w_U]
    add_beta,  // pool receives risky coin, pays numeraire (w < w_D)
    add_alpha, // pool receives numeraire, pays risky coin (w > w_U)
};

// Deltas are pool-side signed reserve changes: reserves update to
// (r_alpha + delta_alpha, r_beta + delta_beta). The arbitrageur's profit in
// numeraire units is -(delta_alpha + S * delta_beta) = cost_fraction * wealth.
struct ArbitrageOutcome {
    TradeDirection direction = TradeDirection::none;
    double delta_alpha   = 0.0;
    double delta_beta    = 0.0;
    double cost_fraction = 0.0; // LP loss as fraction of pre-trade wealth
    double post_weight   = 0.0;
};

struct BruteForceResult {
    double max_profit         = 0.0; // numeraire units; >= 0 (null trade on grid)
    double argmax_delta_alpha = 0.0; // pool-side signed alpha trade at the max
    TradeDirection direction  = TradeDirection::none;
    double alpha_step         = 0.0; // final refined grid step, in alpha units
};

// Fraction of LP portfolio value held in the risky coin: S*R_b/(R_a + S*R_b).
double portfolio_weight(const PoolState& state, double price);

// Zero-fee marginal price of beta in numeraire: theta*R_a/((1-theta)*R_b).
double pool_spot_price(const PoolState& state, const PoolParams& params);

NoArbInterval no_arb_interval(const PoolParams& params);

// LP-borne adjustment cost as a fraction of pre-trade wealth when arbitrage
// pushes the weight back from outside the interval. cost_down covers w <= w_D
// (pool receives beta), cost_up covers w >= w_U (pool receives alpha). The
// boundary point itself is accepted and costs zero.
double cost_down(double w, const PoolParams& params);
double cost_up(double w, const PoolParams& params);

// Weight immediately after the optimal arbitrage adjustment; lands inside
// [w_D, w_U] and fixes the boundary points.
double post_weight_down(double w, const PoolParams& params);
double post_weight_up(double w, const PoolParams& params);

ArbitrageOutcome optimal_trade(const PoolState& state, double price,
                               const PoolParams& params);

// Independent profit oracle: direct evaluation of the arbitrage objective on a
// composite geometric+linear trade grid (both directions) with two local
// refinement passes. Testing aid; grid_points is the per-family resolution.
BruteForceResult brute_force_arb_profit(const PoolState& state, double price,
                                        const PoolParams& params,
                                        int grid_points = 2048);

} // namespace g3m
