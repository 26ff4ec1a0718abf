#pragma once

#include <utility>
#include <vector>

#include "g3m/arbitrage.hpp"

namespace g3m {

struct MarketParams {
    double mu    = 0.04; // growth rate
    double r     = 0.02; // discount rate
    double sigma = 0.2;  // volatility

    void validate() const; // sigma > 0, r > 0
};

struct PenaltyParams {
    double lambda = 1.0; // risk aversion
    double w_star = 0.5; // target weight

    void validate() const; // lambda > 0, w_star in (0,1)
};

// Effective coefficients of the weight process near w_star:
//   a = (1-w*) (mu - r - w* sigma^2),   b = (1-w*) sigma.
struct DriftVol {
    double a = 0.0;
    double b = 0.0;
};

// Everything needed to evaluate the closed-form LP loss
//   J(w) = particular(w) + C1 w^z1 + C2 w^z2
// on the no-arbitrage interval, where z1 > 0 > z2 are the Euler-Cauchy roots
// and C1, C2 are fixed by J'(w_D) = J'(w_U) = 0.
struct ValueSolution {
    double z1 = 0.0, z2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    DriftVol drift_vol;
    MarketParams market;
    PenaltyParams penalty;
    NoArbInterval interval;
    double gamma1 = 1.0, gamma2 = 1.0;
};

// Mean-variance optimal target w* = (mu - r) / sigma^2. Throws
// std::domain_error when the result falls outside (0,1).
double target_weight(const MarketParams& market);

// Tracking error phi(w) = 1/2 lambda sigma^2 (w - w*)^2, normalized so
// phi(w*) = 0.
double penalty(double w, const PenaltyParams& pen, double sigma);

DriftVol drift_vol(const PenaltyParams& pen, const MarketParams& market);

// Roots of (b^2/2) z^2 + (a - b^2/2) z - r = 0; z1 > 0 > z2 for r > 0.
// Throws degeneracy_error when b = 0.
std::pair<double, double> characteristic_roots(const DriftVol& dv, double r);

// Quadratic particular solution and its first two derivatives. Throws
// degeneracy_error near the poles r = 2a + b^2 and r = a, naming the
// violated condition.
double particular_value(double w, const ValueSolution& sol);
double particular_d1(double w, const ValueSolution& sol);
double particular_d2(double w, const ValueSolution& sol);

// Direct 2x2 solve of J'(w_D) = J'(w_U) = 0 with a condition estimate and one
// refinement step. Throws degeneracy_error at zero fee (coefficients
// undefined) or when the system's condition number exceeds 1e12.
std::pair<double, double> solve_boundary_coeffs(const NoArbInterval& interval,
                                                const ValueSolution& sol);

// Assembles roots, particular solution, interval (pool weight theta = w*) and
// boundary coefficients. The interval overload accepts a precomputed interval.
ValueSolution solve_value(const MarketParams& market, const PenaltyParams& pen,
                          double gamma1, double gamma2);
ValueSolution solve_value(const MarketParams& market, const PenaltyParams& pen,
                          const NoArbInterval& interval, double gamma1, double gamma2);

double value(double w, const ValueSolution& sol);
double value_d1(double w, const ValueSolution& sol);
double value_d2(double w, const ValueSolution& sol);

// Residual of a(w) J' + b(w)^2/2 J'' + phi - r J with a(w) = a w, b(w) = b w;
// ~0 for the assembled closed form.
double ode_residual(double w, const ValueSolution& sol);

// Endpoint second derivatives (J''(w_D), J''(w_U)); both tend to zero along
// the optimal-fee limit.
std::pair<double, double> optimality_gap(const ValueSolution& sol);

struct SweepRow {
    double gamma = 0.0;
    bool defined = false; // false for gamma = 1 (coefficients undefined)
    double w_d = 0.0, w_u = 0.0;
    double z1 = 0.0, z2 = 0.0;
    double c1 = 0.0, c2 = 0.0;
    double j_at_wstar = 0.0;
    double j11_w_d = 0.0, j11_w_u = 0.0;
};

// Symmetric-fee sweep (gamma1 = gamma2 = gamma), rows ascending in gamma.
// gamma = 1 grid points are marked undefined rather than evaluated.
std::vector<SweepRow> fee_sweep(std::vector<double> gammas,
                                const MarketParams& market,
                                const PenaltyParams& pen);

struct OptimalFee {
    double gamma1 = 0.0, gamma2 = 0.0;
    double j_at_wstar = 0.0;
    bool at_grid_max = false; // argmin sits at the largest gamma < 1 on the grid
};

OptimalFee optimize_fees(const MarketParams& market, const PenaltyParams& pen,
                         const std::vector<double>& gamma_grid);

} // namespace g3m
