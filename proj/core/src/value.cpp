#include "g3m/value.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

#include "g3m/errors.hpp"

namespace g3m {

namespace {
constexpr double kPoleTol = 1e-12;

double pole_r2ab2(const ValueSolution& s) {
    return s.market.r - 2.0 * s.drift_vol.a - s.drift_vol.b * s.drift_vol.b;
}
double pole_ra(const ValueSolution& s) { return s.market.r - s.drift_vol.a; }

void check_poles(const ValueSolution& s) {
    if (std::abs(pole_r2ab2(s)) < kPoleTol)
        throw degeneracy_error("particular solution pole: r - 2a - b^2 vanishes");
    if (std::abs(pole_ra(s)) < kPoleTol)
        throw degeneracy_error("particular solution pole: r - a vanishes");
}
} // namespace

void MarketParams::validate() const {
    if (!(sigma > 0.0))
        throw std::invalid_argument("MarketParams: sigma must be positive");
    if (!(r > 0.0))
        throw std::invalid_argument("MarketParams: r must be positive");
}

void PenaltyParams::validate() const {
    if (!(lambda > 0.0))
        throw std::invalid_argument("PenaltyParams: lambda must be positive");
    if (!(w_star > 0.0 && w_star < 1.0))
        throw std::invalid_argument("PenaltyParams: w_star must lie in (0,1)");
}

double target_weight(const MarketParams& market) {
    market.validate();
    const double w = (market.mu - market.r) / (market.sigma * market.sigma);
    if (!(w > 0.0 && w < 1.0))
        throw std::domain_error("target_weight: (mu-r)/sigma^2 = " + std::to_string(w)
                                + " falls outside (0,1)");
    return w;
}

double penalty(double w, const PenaltyParams& pen, double sigma) {
    const double d = w - pen.w_star;
    return 0.5 * pen.lambda * sigma * sigma * d * d;
}

DriftVol drift_vol(const PenaltyParams& pen, const MarketParams& market) {
    pen.validate();
    market.validate();
    const double ws = pen.w_star;
    return { (1.0 - ws) * (market.mu - market.r - ws * market.sigma * market.sigma),
             (1.0 - ws) * market.sigma };
}

std::pair<double, double> characteristic_roots(const DriftVol& dv, double r) {
    if (!(dv.b != 0.0))
        throw degeneracy_error("characteristic_roots: degenerate dynamics, b = 0");
    if (!(r > 0.0))
        throw std::invalid_argument("characteristic_roots: r must be positive");
    const double b2 = dv.b * dv.b;
    const double disc = (dv.a - b2 / 2.0) * (dv.a - b2 / 2.0) + 2.0 * b2 * r;
    assert(disc > 0.0); // holds for r > 0, b != 0: roots are always distinct
    const double s = std::sqrt(disc);
    return { (b2 / 2.0 - dv.a + s) / b2, (b2 / 2.0 - dv.a - s) / b2 };
}

double particular_value(double w, const ValueSolution& sol) {
    check_poles(sol);
    const double k = 0.5 * sol.penalty.lambda * sol.market.sigma * sol.market.sigma;
    const double ws = sol.penalty.w_star;
    return k * (w * w / pole_r2ab2(sol) - 2.0 * w * ws / pole_ra(sol)
                + ws * ws / sol.market.r);
}

double particular_d1(double w, const ValueSolution& sol) {
    check_poles(sol);
    const double ls2 = sol.penalty.lambda * sol.market.sigma * sol.market.sigma;
    return ls2 * (w / pole_r2ab2(sol) - sol.penalty.w_star / pole_ra(sol));
}

double particular_d2(double /*w*/, const ValueSolution& sol) {
    check_poles(sol);
    const double ls2 = sol.penalty.lambda * sol.market.sigma * sol.market.sigma;
    return ls2 / pole_r2ab2(sol);
}

std::pair<double, double> solve_boundary_coeffs(const NoArbInterval& interval,
                                                const ValueSolution& sol) {
    if (sol.gamma1 == 1.0 && sol.gamma2 == 1.0)
        throw degeneracy_error("coefficients undefined at zero fee (gamma1 = gamma2 = 1)");
    if (!(interval.w_d < interval.w_u_bound))
        throw degeneracy_error("degenerate fee: no-arbitrage interval has empty interior");

    const double wd = interval.w_d, wu = interval.w_u_bound;
    const double m11 = sol.z1 * std::pow(wd, sol.z1 - 1.0);
    const double m12 = sol.z2 * std::pow(wd, sol.z2 - 1.0);
    const double m21 = sol.z1 * std::pow(wu, sol.z1 - 1.0);
    const double m22 = sol.z2 * std::pow(wu, sol.z2 - 1.0);
    const double r1 = -particular_d1(wd, sol);
    const double r2 = -particular_d1(wu, sol);

    const double det = m11 * m22 - m12 * m21;
    const double norm = std::max(std::abs(m11) + std::abs(m12),
                                 std::abs(m21) + std::abs(m22));
    const double inv_norm = (std::abs(m22) + std::abs(m12)
                             + std::abs(m21) + std::abs(m11)) / std::abs(det);
    if (!(std::abs(det) > 0.0) || norm * inv_norm > 1e12)
        throw degeneracy_error("degenerate fee: boundary system condition number exceeds 1e12");

    double c1 = (r1 * m22 - m12 * r2) / det;
    double c2 = (m11 * r2 - r1 * m21) / det;
    // one refinement pass; the rows are nearly parallel for small fees
    const double e1 = r1 - (m11 * c1 + m12 * c2);
    const double e2 = r2 - (m21 * c1 + m22 * c2);
    c1 += (e1 * m22 - m12 * e2) / det;
    c2 += (m11 * e2 - e1 * m21) / det;
    return { c1, c2 };
}

ValueSolution solve_value(const MarketParams& market, const PenaltyParams& pen,
                          const NoArbInterval& interval, double gamma1, double gamma2) {
    market.validate();
    pen.validate();
    ValueSolution sol;
    sol.market = market;
    sol.penalty = pen;
    sol.interval = interval;
    sol.gamma1 = gamma1;
    sol.gamma2 = gamma2;
    sol.drift_vol = drift_vol(pen, market);
    std::tie(sol.z1, sol.z2) = characteristic_roots(sol.drift_vol, market.r);
    check_poles(sol);
    std::tie(sol.c1, sol.c2) = solve_boundary_coeffs(interval, sol);
    return sol;
}

ValueSolution solve_value(const MarketParams& market, const PenaltyParams& pen,
                          double gamma1, double gamma2) {
    pen.validate();
    PoolParams pool{ pen.w_star, gamma1, gamma2 };
    return solve_value(market, pen, no_arb_interval(pool), gamma1, gamma2);
}

namespace {
inline void check_positive_weight(double w) {
    if (!(w > 0.0))
        throw std::domain_error("value: w must be positive (w^z2 with z2 < 0)");
}
} // namespace

double value(double w, const ValueSolution& sol) {
    check_positive_weight(w);
    return particular_value(w, sol)
         + sol.c1 * std::pow(w, sol.z1) + sol.c2 * std::pow(w, sol.z2);
}

double value_d1(double w, const ValueSolution& sol) {
    check_positive_weight(w);
    return particular_d1(w, sol)
         + sol.c1 * sol.z1 * std::pow(w, sol.z1 - 1.0)
         + sol.c2 * sol.z2 * std::pow(w, sol.z2 - 1.0);
}

double value_d2(double w, const ValueSolution& sol) {
    check_positive_weight(w);
    return particular_d2(w, sol)
         + sol.c1 * sol.z1 * (sol.z1 - 1.0) * std::pow(w, sol.z1 - 2.0)
         + sol.c2 * sol.z2 * (sol.z2 - 1.0) * std::pow(w, sol.z2 - 2.0);
}

double ode_residual(double w, const ValueSolution& sol) {
    const double a = sol.drift_vol.a, b = sol.drift_vol.b;
    return a * w * value_d1(w, sol)
         + 0.5 * b * b * w * w * value_d2(w, sol)
         + penalty(w, sol.penalty, sol.market.sigma)
         - sol.market.r * value(w, sol);
}

std::pair<double, double> optimality_gap(const ValueSolution& sol) {
    return { value_d2(sol.interval.w_d, sol), value_d2(sol.interval.w_u_bound, sol) };
}

std::vector<SweepRow> fee_sweep(std::vector<double> gammas,
                                const MarketParams& market, const PenaltyParams& pen) {
    std::sort(gammas.begin(), gammas.end());
    std::vector<SweepRow> rows;
    rows.reserve(gammas.size());
    for (double g : gammas) {
        SweepRow row;
        row.gamma = g;
        if (g == 1.0) {
            rows.push_back(row); // undefined: zero-fee system has no solution
            continue;
        }
        if (!(g > 0.0 && g < 1.0))
            throw std::invalid_argument("fee_sweep: gamma grid must lie in (0,1]");
        const ValueSolution sol = solve_value(market, pen, g, g);
        row.defined = true;
        row.w_d = sol.interval.w_d;
        row.w_u = sol.interval.w_u_bound;
        row.z1 = sol.z1;
        row.z2 = sol.z2;
        row.c1 = sol.c1;
        row.c2 = sol.c2;
        row.j_at_wstar = value(pen.w_star, sol);
        std::tie(row.j11_w_d, row.j11_w_u) = optimality_gap(sol);
        rows.push_back(row);
    }
    return rows;
}

OptimalFee optimize_fees(const MarketParams& market, const PenaltyParams& pen,
                         const std::vector<double>& gamma_grid) {
    const auto rows = fee_sweep(gamma_grid, market, pen);
    OptimalFee best;
    bool have = false;
    for (const auto& row : rows) {
        if (!row.defined) continue;
        if (!have || row.j_at_wstar < best.j_at_wstar) {
            best.gamma1 = best.gamma2 = row.gamma;
            best.j_at_wstar = row.j_at_wstar;
            have = true;
        }
    }
    if (!have)
        throw std::invalid_argument("optimize_fees: grid contains no gamma < 1");
    double gmax = 0.0;
    for (const auto& row : rows)
        if (row.defined) gmax = std::max(gmax, row.gamma);
    best.at_grid_max = (best.gamma1 == gmax);
    return best;
}

} // namespace g3m
