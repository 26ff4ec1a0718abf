#include "commands.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

#include "g3m/errors.hpp"
#include "g3m/selfcheck.hpp"
#include "g3m/simulator.hpp"
#include "g3m/value.hpp"

#include "config.hpp"
#include "emit.hpp"

namespace cli {

namespace {

g3m::MarketParams market_of(const RunConfig& c) { return { c.mu, c.r, c.sigma }; }

double resolved_w_star(const RunConfig& c) {
    return std::isnan(c.w_star) ? g3m::target_weight(market_of(c)) : c.w_star;
}

g3m::PenaltyParams penalty_of(const RunConfig& c) { return { c.lambda, resolved_w_star(c) }; }

g3m::PoolParams pool_of(const RunConfig& c) {
    const double th = std::isnan(c.theta) ? resolved_w_star(c) : c.theta;
    g3m::PoolParams p{ th, c.gamma1, c.gamma2 };
    p.validate();
    return p;
}

g3m::SimConfig sim_of(const RunConfig& c) {
    g3m::SimConfig s;
    s.step_h = c.h;
    s.n_paths = c.n_paths;
    s.master_seed = c.seed;
    s.truncation_tol = c.truncation_tol;
    s.workers = c.workers;
    if (c.dynamics == "full") s.dynamics = g3m::DynamicsMode::full;
    else if (c.dynamics == "approximated") s.dynamics = g3m::DynamicsMode::approximated;
    else throw std::invalid_argument("dynamics must be 'full' or 'approximated'");
    if (c.noise == "rademacher") s.noise = g3m::NoiseMode::rademacher;
    else if (c.noise == "gaussian") s.noise = g3m::NoiseMode::gaussian;
    else throw std::invalid_argument("noise must be 'rademacher' or 'gaussian'");
    if (c.boundary == "reflect") s.boundary = g3m::BoundaryMode::reflect;
    else if (c.boundary == "adjust") s.boundary = g3m::BoundaryMode::adjust;
    else throw std::invalid_argument("boundary must be 'reflect' or 'adjust'");
    if (c.horizon == "truncated") s.horizon = g3m::HorizonMode::truncated;
    else if (c.horizon == "killed") s.horizon = g3m::HorizonMode::killed;
    else throw std::invalid_argument("horizon must be 'truncated' or 'killed'");
    s.validate();
    return s;
}

void write_payload(const RunConfig& c, const std::string& payload, std::ostream& out) {
    if (c.output == "-" || c.output.empty()) {
        out << payload;
        return;
    }
    std::ofstream f(c.output, std::ios::binary);
    if (!f)
        throw std::invalid_argument("cannot open output file " + c.output);
    f << payload;
}

std::string pick_format(const RunConfig& c, const std::string& dflt) {
    const std::string f = c.format.empty() ? dflt : c.format;
    if (f != "json" && f != "csv")
        throw std::invalid_argument("format must be 'csv' or 'json'");
    return f;
}

const char* direction_name(g3m::TradeDirection d) {
    switch (d) {
        case g3m::TradeDirection::add_beta: return "add_beta";
        case g3m::TradeDirection::add_alpha: return "add_alpha";
        default: return "none";
    }
}

// ------------------------------- commands -----------------------------------

int cmd_interval(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto pool = pool_of(c);
    const auto iv = g3m::no_arb_interval(pool);
    std::string payload;
    if (pick_format(c, "json") == "json") {
        payload = JsonObject()
                      .add("theta", pool.theta)
                      .add("gamma1", pool.gamma1)
                      .add("gamma2", pool.gamma2)
                      .add("w_D", iv.w_d)
                      .add("w_U", iv.w_u_bound)
                      .str();
    } else {
        payload = csv_line({ "theta", "gamma1", "gamma2", "w_D", "w_U" })
                + csv_line({ fmt17(pool.theta), fmt17(pool.gamma1), fmt17(pool.gamma2),
                             fmt17(iv.w_d), fmt17(iv.w_u_bound) });
    }
    write_payload(c, payload, out);
    return 0;
}

int cmd_arb(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto pool = pool_of(c);
    g3m::PoolState state;
    if (!std::isnan(c.r_alpha) || !std::isnan(c.r_beta)) {
        if (std::isnan(c.r_alpha) || std::isnan(c.r_beta))
            throw std::invalid_argument("provide both --r-alpha and --r-beta, or --w");
        state = { c.r_alpha, c.r_beta };
    } else {
        if (std::isnan(c.w))
            throw std::invalid_argument("provide --w or explicit reserves");
        if (!(c.w > 0.0 && c.w < 1.0))
            throw std::invalid_argument("--w must lie in (0,1)");
        state = { 1.0 - c.w, c.w / c.price }; // unit wealth at the given price
    }
    const auto iv = g3m::no_arb_interval(pool);
    const auto trade = g3m::optimal_trade(state, c.price, pool);
    const double w = g3m::portfolio_weight(state, c.price);

    std::string payload;
    if (pick_format(c, "json") == "json") {
        payload = JsonObject()
                      .add("theta", pool.theta)
                      .add("gamma1", pool.gamma1)
                      .add("gamma2", pool.gamma2)
                      .add("price", c.price)
                      .add("r_alpha", state.r_alpha)
                      .add("r_beta", state.r_beta)
                      .add("w", w)
                      .add("w_D", iv.w_d)
                      .add("w_U", iv.w_u_bound)
                      .add("direction", std::string(direction_name(trade.direction)))
                      .add("delta_alpha", trade.delta_alpha)
                      .add("delta_beta", trade.delta_beta)
                      .add("cost_fraction", trade.cost_fraction)
                      .add("post_weight", trade.post_weight)
                      .str();
    } else {
        payload = csv_line({ "theta", "gamma1", "gamma2", "price", "w", "w_D", "w_U",
                             "direction", "delta_alpha", "delta_beta", "cost_fraction",
                             "post_weight" })
                + csv_line({ fmt17(pool.theta), fmt17(pool.gamma1), fmt17(pool.gamma2),
                             fmt17(c.price), fmt17(w), fmt17(iv.w_d), fmt17(iv.w_u_bound),
                             direction_name(trade.direction), fmt17(trade.delta_alpha),
                             fmt17(trade.delta_beta), fmt17(trade.cost_fraction),
                             fmt17(trade.post_weight) });
    }
    write_payload(c, payload, out);
    return 0;
}

int cmd_value(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto market = market_of(c);
    const auto pen = penalty_of(c);
    const auto sol = g3m::solve_value(market, pen, c.gamma1, c.gamma2);
    const auto [j11d, j11u] = g3m::optimality_gap(sol);

    JsonObject o;
    o.add("mu", market.mu)
     .add("r", market.r)
     .add("sigma", market.sigma)
     .add("lambda", pen.lambda)
     .add("gamma1", c.gamma1)
     .add("gamma2", c.gamma2)
     .add("w_star", pen.w_star)
     .add("w_D", sol.interval.w_d)
     .add("w_U", sol.interval.w_u_bound)
     .add("z1", sol.z1)
     .add("z2", sol.z2)
     .add("C1", sol.c1)
     .add("C2", sol.c2)
     .add("J_at_wstar", g3m::value(pen.w_star, sol))
     .add("J1_wD", g3m::value_d1(sol.interval.w_d, sol))
     .add("J1_wU", g3m::value_d1(sol.interval.w_u_bound, sol))
     .add("J11_wD", j11d)
     .add("J11_wU", j11u);
    if (!std::isnan(c.w)) {
        o.add("w", c.w).add("J_at_w", g3m::value(c.w, sol));
    }
    write_payload(c, o.str(), out);
    return 0;
}

int cmd_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (!(c.gamma_steps >= 2))
        throw std::invalid_argument("--gamma-steps must be at least 2");
    if (!(c.gamma_min > 0.0 && c.gamma_max <= 1.0 && c.gamma_min <= c.gamma_max))
        throw std::invalid_argument("gamma grid must satisfy 0 < min <= max <= 1");
    std::vector<double> grid;
    for (int k = 0; k < c.gamma_steps; ++k)
        grid.push_back(c.gamma_min
                       + (c.gamma_max - c.gamma_min) * double(k) / double(c.gamma_steps - 1));

    const auto rows = g3m::fee_sweep(grid, market_of(c), penalty_of(c));
    bool warned = false;
    std::string payload;
    if (pick_format(c, "csv") == "csv") {
        payload = "gamma,w_D,w_U,z1,z2,C1,C2,J_at_wstar,J11_wD,J11_wU\n";
        for (const auto& row : rows) {
            if (!row.defined) {
                payload += fmt17(row.gamma)
                        + ",undefined,undefined,undefined,undefined,undefined,"
                          "undefined,undefined,undefined,undefined\n";
                warned = true;
                continue;
            }
            payload += csv_line({ fmt17(row.gamma), fmt17(row.w_d), fmt17(row.w_u),
                                  fmt17(row.z1), fmt17(row.z2), fmt17(row.c1), fmt17(row.c2),
                                  fmt17(row.j_at_wstar), fmt17(row.j11_w_d),
                                  fmt17(row.j11_w_u) });
        }
    } else {
        for (const auto& row : rows) { // JSON lines, one flat object per grid point
            JsonObject o;
            o.add("gamma", row.gamma);
            if (!row.defined) {
                o.add("defined", std::string("false"));
                warned = true;
            } else {
                o.add("defined", std::string("true"))
                 .add("w_D", row.w_d)
                 .add("w_U", row.w_u)
                 .add("z1", row.z1)
                 .add("z2", row.z2)
                 .add("C1", row.c1)
                 .add("C2", row.c2)
                 .add("J_at_wstar", row.j_at_wstar)
                 .add("J11_wD", row.j11_w_d)
                 .add("J11_wU", row.j11_w_u);
            }
            payload += o.str();
        }
    }
    if (warned)
        err << "warning: gamma = 1 grid points are undefined (zero-fee coefficients do not exist)\n";
    write_payload(c, payload, out);
    return 0;
}

int cmd_simulate(const RunConfig& c, std::ostream& out, std::ostream&) {
    const auto market = market_of(c);
    const auto pen = penalty_of(c);
    const auto pool = pool_of(c);
    const auto sim = sim_of(c);
    const double w0 = std::isnan(c.w0) ? pen.w_star : c.w0;
    const auto stats = g3m::estimate_value(w0, sim, market, pen, pool);

    const std::string payload =
        JsonObject()
            .add("mu", market.mu)
            .add("r", market.r)
            .add("sigma", market.sigma)
            .add("lambda", pen.lambda)
            .add("w_star", pen.w_star)
            .add("theta", pool.theta)
            .add("gamma1", pool.gamma1)
            .add("gamma2", pool.gamma2)
            .add("w0", w0)
            .add("h", sim.step_h)
            .add("n_paths", sim.n_paths)
            .add("seed", sim.master_seed)
            .add("truncation_tol", sim.truncation_tol)
            .add("dynamics", c.dynamics)
            .add("noise", c.noise)
            .add("boundary", c.boundary)
            .add("horizon_mode", c.horizon)
            .add("j_estimate", stats.j_estimate)
            .add("std_error", stats.std_error)
            .add("n_up_events", stats.n_up_events)
            .add("n_down_events", stats.n_down_events)
            .add("horizon", stats.horizon)
            .add("cost_component", stats.cost_component)
            .str();
    write_payload(c, payload, out);
    return 0;
}

int cmd_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const auto results = g3m::selfcheck::run_all(c.seed == 0 ? 20240801ULL : c.seed);
    std::string payload;
    std::vector<std::string> failures;
    for (const auto& res : results) {
        payload += std::string(res.passed ? "[ OK ] " : "[FAIL] ") + res.name
                 + ": " + res.detail + "\n";
        if (!res.passed) failures.push_back(res.name);
    }
    payload += std::to_string(results.size() - failures.size()) + "/"
             + std::to_string(results.size()) + " checks passed\n";
    write_payload(c, payload, out);
    if (!failures.empty()) {
        err << "failed checks:";
        for (const auto& f : failures) err << " " << f;
        err << "\n";
        return 3;
    }
    return 0;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
    sub->set_help_flag("--help", "print help");
    sub->add_option("--config", "config file (key = value, '#' comments)")
        ->check(CLI::ExistingFile);
    sub->add_option("--output", cfg.output, "output path ('-' for stdout)");
    sub->add_option("--format", cfg.format, "csv or json");
    sub->add_option("--workers", cfg.workers, "worker cap (0 = auto)");
}

void add_pool(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--theta", cfg.theta, "pool weight parameter (default: w*)");
    auto* g = sub->add_option_function<double>(
        "--gamma", [&cfg](double v) { cfg.gamma1 = cfg.gamma2 = v; },
        "symmetric fee factor");
    sub->add_option("--gamma1", cfg.gamma1, "fee factor, incoming risky coin")
        ->excludes(g);
    sub->add_option("--gamma2", cfg.gamma2, "fee factor, incoming numeraire")
        ->excludes(g);
}

void add_market(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--mu", cfg.mu, "growth rate");
    sub->add_option("--r", cfg.r, "discount rate");
    sub->add_option("--sigma", cfg.sigma, "volatility");
    sub->add_option("--lambda", cfg.lambda, "risk aversion");
    sub->add_option("--w-star", cfg.w_star, "target weight (default: (mu-r)/sigma^2)");
}

} // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err) {
    RunConfig cfg;

    // config file first, so flags override it
    try {
        for (std::size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config") apply_config_file(cfg, args[i + 1]);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    CLI::App app{ "G3M fee laboratory: no-arbitrage intervals, arbitrage costs, "
                  "closed-form LP loss and its Monte Carlo verification" };
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    auto* interval = app.add_subcommand("interval", "no-arbitrage weight interval");
    add_pool(interval, cfg);
    add_common(interval, cfg);

    auto* arb = app.add_subcommand("arb", "optimal arbitrage adjustment at a state");
    add_pool(arb, cfg);
    arb->add_option("--w", cfg.w, "portfolio weight (unit-wealth state)");
    arb->add_option("--price", cfg.price, "external price of the risky coin");
    arb->add_option("--r-alpha", cfg.r_alpha, "numeraire reserve");
    arb->add_option("--r-beta", cfg.r_beta, "risky coin reserve");
    add_common(arb, cfg);

    auto* value = app.add_subcommand("value", "closed-form LP loss J");
    add_market(value, cfg);
    add_pool(value, cfg);
    value->add_option("--w", cfg.w, "also evaluate J at this weight");
    add_common(value, cfg);

    auto* sweep = app.add_subcommand("sweep", "symmetric fee sweep table");
    add_market(sweep, cfg);
    sweep->add_option("--gamma-min", cfg.gamma_min, "grid start");
    sweep->add_option("--gamma-max", cfg.gamma_max, "grid end (open at 1)");
    sweep->add_option("--gamma-steps", cfg.gamma_steps, "grid size");
    add_common(sweep, cfg);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo loss estimate");
    add_market(simulate, cfg);
    add_pool(simulate, cfg);
    simulate->add_option("--w0", cfg.w0, "start weight (default: w*)");
    simulate->add_option("--h", cfg.h, "time step");
    simulate->add_option("--n-paths", cfg.n_paths, "path count");
    simulate->add_option("--seed", cfg.seed, "master seed");
    simulate->add_option("--truncation-tol", cfg.truncation_tol, "tail tolerance");
    simulate->add_option("--dynamics", cfg.dynamics, "full | approximated");
    simulate->add_option("--noise", cfg.noise, "rademacher | gaussian");
    simulate->add_option("--boundary", cfg.boundary, "reflect | adjust");
    simulate->add_option("--horizon", cfg.horizon, "truncated | killed");
    add_common(simulate, cfg);

    auto* validate = app.add_subcommand("validate", "run all module property suites");
    validate->add_option("--seed", cfg.seed, "suite seed");
    add_common(validate, cfg);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (interval->parsed()) return cmd_interval(cfg, out, err);
        if (arb->parsed()) return cmd_arb(cfg, out, err);
        if (value->parsed()) return cmd_value(cfg, out, err);
        if (sweep->parsed()) return cmd_sweep(cfg, out, err);
        if (simulate->parsed()) return cmd_simulate(cfg, out, err);
        if (validate->parsed()) return cmd_validate(cfg, out, err);
    } catch (const g3m::degeneracy_error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::domain_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    err << "error: no subcommand\n";
    return 1;
}

} // namespace cli
