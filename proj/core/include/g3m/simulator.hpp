#pragma once

#include <cstdint>
#include <span>

#include "g3m/arbitrage.hpp"
#include "g3m/value.hpp"

namespace g3m {

enum class DynamicsMode { full, approximated };
enum class NoiseMode { rademacher, gaussian };

// Boundary handling for the arbitrage-adjusted weight process.
//
//   reflect - mirror the overshoot back inside the interval and accrue no
//             adjustment cost. This is the estimator of the continuous-time
//             loss functional: for gamma < 1 the per-event costs are
//             quadratic in the overshoot and vanish with the step size, and
//             mirroring keeps the discrete occupation measure consistent
//             with the reflected diffusion even when the interval is only a
//             few steps wide. Default, and the mode the analytic solution is
//             validated against.
//
//   adjust  - the literal finite-h arbitrage accounting: jump to the
//             post-adjustment weight and charge the discounted closed-form
//             cost at the realized exited weight. Faithful to the discrete
//             model at step h; its cost term is O(sqrt(h)) per unit time and
//             dominates the continuum value for small fees, so it is not
//             comparable to the closed form at practical h.
enum class BoundaryMode { reflect, adjust };

// truncated - fixed horizon T = ln(cap/(r*tol))/r, cap = max penalty plus a
//             coarse-scan bound on boundary costs.
// killed    - discount-as-killing: geometric path lifetime with per-step
//             survival e^{-rh} (shared within a 16-path block), undiscounted
//             accrual, e^{+rh} correction. Unbiased for the same discounted
//             functional, no truncation tail, ~4x cheaper at default r, h.
enum class HorizonMode { truncated, killed };

struct SimConfig {
    double step_h = 1e-4;
    std::uint64_t n_paths = 1000;
    std::uint64_t master_seed = 0;
    double truncation_tol = 1e-6;
    DynamicsMode dynamics = DynamicsMode::full;
    NoiseMode noise = NoiseMode::rademacher;
    BoundaryMode boundary = BoundaryMode::reflect;
    HorizonMode horizon = HorizonMode::truncated;
    unsigned workers = 0; // 0 = auto; capped by G3M_FEE_LAB_THREADS either way

    void validate() const;
};

struct PathStats {
    double j_estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_up_events = 0;
    std::uint64_t n_down_events = 0;
    double horizon = 0.0;        // simulated time (mean realized when killed)
    double cost_component = 0.0; // mean discounted adjustment costs (adjust mode)
};

// Deterministic splittable RNG: every path derives its own splitmix64 stream
// from (master_seed, index), so results are independent of worker count.
namespace rng {

std::uint64_t mix(std::uint64_t x);

struct Stream {
    std::uint64_t state = 0;
    std::uint64_t next();
    double u01(); // [0, 1)
};

Stream path_stream(std::uint64_t master_seed, std::uint64_t path_index);
Stream block_stream(std::uint64_t master_seed, std::uint64_t block_index);
Stream lattice_stream(std::uint64_t master_seed, std::uint64_t path_index);

} // namespace rng

// One Euler increment of the weight process (no boundary handling).
// full:         w + w(1-w)(mu - r - w sigma^2) h + w(1-w) sigma noise sqrt(h)
// approximated: w + w a h + w b noise sqrt(h), with (a, b) built around the
//               market target weight. Result clamped to [1e-9, 1-1e-9].
double step_weight(double w, const SimConfig& cfg, const MarketParams& market,
                   double noise);

// Horizon used by the truncated mode. Throws std::invalid_argument when the
// implied step count exceeds 1e8.
double horizon_time(const SimConfig& cfg, const MarketParams& market,
                    const PenaltyParams& pen, const PoolParams& pool);

// Discounted loss realization of one path, identified by its index under
// cfg.master_seed. estimate_value(...) aggregates exactly these values.
double simulate_path(double w0, const SimConfig& cfg, const MarketParams& market,
                     const PenaltyParams& pen, const PoolParams& pool,
                     std::uint64_t path_index);

PathStats estimate_value(double w0, const SimConfig& cfg, const MarketParams& market,
                         const PenaltyParams& pen, const PoolParams& pool);

// Birth-death lattice with spacing xi across [w_D, w_U], state-dependent time
// step tau_i = xi^2/(b w_i)^2 and probabilities p = (1 - a xi/(b^2 w_i))/2,
// q = 1 - p. Boundary exits charge the closed-form cost at w_D - xi / w_U + xi
// and jump to the corresponding post-adjustment weight. Always truncated.
PathStats random_walk_estimate(double w0, double lattice_xi, const SimConfig& cfg,
                               const MarketParams& market, const PenaltyParams& pen,
                               const PoolParams& pool);

struct BoundaryCostOrder {
    double slope = 0.0;          // log-log slope of cost_up(w_U + xi) vs xi
    double coefficient = 0.0;    // fitted kappa in cost ~ kappa xi^slope
    double pasting_factor = 0.0; // 1 - w_u'(0), finite-difference estimate
};

BoundaryCostOrder boundary_cost_order(const PoolParams& pool,
                                      std::span<const double> xi_grid);

// Effective worker count: requested (0 = hardware), capped by the
// G3M_FEE_LAB_THREADS environment variable when set to a positive value.
unsigned resolve_workers(unsigned requested);

} // namespace g3m
