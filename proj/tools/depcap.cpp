// SPDX-License-Identifier: Apache-2.0
//
// depcap: Markov additive capacity models with copula-based dependence control
// Copyright (C) 2026 The depcap authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// depcap: scenario-driven front end. Each subcommand reads one JSON scenario
// and writes CSV/JSON artifacts plus manifest.json into --out.

#include <depcap/depcap.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace depcap;
using io::json;

namespace {

struct Run {
    std::string command;
    std::string config_path;
    std::string config_text;
    fs::path out;
    Scenario sc;
    std::vector<std::string> files;

    std::ofstream open(const std::string &name)
    {
        files.push_back(name);
        std::ofstream os(out / name, std::ios::binary);
        if (!os)
            throw Error(Errc::config, (out / name).string() + ": cannot write");
        return os;
    }

    void write_json(const std::string &name, const json &j) { open(name) << j.dump(2) << '\n'; }
};

int exit_code(Errc c)
{
    switch (c) {
    case Errc::config: return 2;
    case Errc::infeasible_copula:
    case Errc::zero_mass_state: return 3;
    case Errc::unstable_queue: return 4;
    case Errc::non_convergence:
    case Errc::quadrature_divergence: return 5;
    default: return 1;
    }
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json estimate_json(const Estimate &e) { return {{"value", e.value}, {"std_error", e.std_error}}; }

json report_json(const ValidationReport &r, const Vector &axis)
{
    json pts = json::array();
    for (std::size_t k : r.violating_points)
        pts.push_back(axis[k]);
    return {{"points_checked", r.points_checked},
            {"violations", r.violations},
            {"max_violation", r.max_violation},
            {"violating_points", pts}};
}

Vector default_delay_grid() { return {0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0}; }

Vector delay_grid(const Scenario &sc) { return sc.bounds.delay_grid.empty() ? default_delay_grid() : sc.bounds.delay_grid; }

Vector backlog_grid(const Scenario &sc)
{
    if (!sc.bounds.backlog_grid.empty())
        return sc.bounds.backlog_grid;
    Vector g = delay_grid(sc);
    for (double &x : g)
        x *= *sc.arrival_rate;
    return g;
}

PathEnsemble simulate(const Scenario &sc)
{
    SimulationOptions opt;
    opt.threads = sc.simulation.threads;
    return simulate_ensemble(sc.controlled(), sc.start(), sc.simulation.horizon, sc.simulation.paths, sc.seed, opt);
}

// ---- simulate ---------------------------------------------------------------

void cmd_simulate(Run &r)
{
    const Scenario &sc = r.sc;
    const PathEnsemble e = simulate(sc);
    std::vector<std::size_t> times;
    for (std::size_t k = 1; k <= 10; ++k)
        times.push_back(std::max<std::size_t>(1, sc.simulation.horizon * k / 10));
    times.erase(std::unique(times.begin(), times.end()), times.end());
    {
        auto os = r.open("path_summary.csv");
        io::write_path_summary_csv(os, path_summary(e, times, sc.bounds.epsilon));
    }
    double mean = 0.0;
    for (std::size_t p = 0; p < e.paths; ++p)
        mean += e.total(p, e.horizon) / static_cast<double>(e.horizon);
    mean /= static_cast<double>(e.paths);
    json j = {{"paths", e.paths},
              {"horizon", e.horizon},
              {"seed", e.seed},
              {"mean_transient_capacity", mean},
              {"lag1_autocorrelation", estimate_json(lag1_autocorrelation(e, sc.simulation.warmup))}};
    if (sc.arrival_rate) {
        const QueueSamples q = lindley_queue(e, *sc.arrival_rate, sc.simulation.warmup);
        const Vector dg = delay_grid(sc), bg = backlog_grid(sc);
        const EmpiricalTail dt = empirical_tail(q.delay, dg, sc.validate.delta, sc.validate.dkw_inflation);
        const EmpiricalTail bt = empirical_tail(q.backlog, bg, sc.validate.delta, sc.validate.dkw_inflation);
        {
            auto os = r.open("delay_tail.csv");
            io::write_tail_csv(os, dt);
        }
        {
            auto os = r.open("backlog_tail.csv");
            io::write_tail_csv(os, bt);
        }
        j["queue"] = {{"arrival_rate", q.lambda},
                      {"samples", q.delay.size()},
                      {"empirically_unstable", q.unstable},
                      {"dkw_half_width", dt.half_width}};
    }
    r.write_json("simulate.json", j);
}

// ---- bounds -----------------------------------------------------------------

void cmd_bounds(Run &r)
{
    const Scenario &sc = r.sc;
    const MarkovAdditiveModel &m = sc.analytic();
    const MarginalDistribution w = sc.start();
    const double mean = m.mean_increment();
    json j = {{"mean_capacity", mean}, {"states", m.size()}};

    {
        std::vector<io::KappaPoint> pts;
        for (int k = -20; k <= 20; ++k) {
            const double th = k / (10.0 * mean);
            pts.push_back({th, kappa(m, th)});
        }
        auto os = r.open("kappa.csv");
        io::write_kappa_csv(os, pts);
    }

    json transient = json::array();
    for (std::size_t t : sc.bounds.horizons) {
        const double centre = mean * static_cast<double>(t), span = sc.bounds.cumulative_span;
        Vector xs(sc.bounds.cumulative_points);
        for (std::size_t k = 0; k < xs.size(); ++k)
            xs[k] = centre * (1.0 - span + 2.0 * span * static_cast<double>(k) / static_cast<double>(xs.size() - 1));
        {
            auto os = r.open("cumulative_t" + std::to_string(t) + ".csv");
            io::write_bound_csv(os, cumulative_capacity_bounds(m, w, t, xs));
        }
        const TransientEnvelope env = transient_capacity_bounds(m, w, t, sc.bounds.epsilon);
        transient.push_back({{"t", t},
                             {"c_lower", env.c_lower},
                             {"c_upper", env.c_upper},
                             {"theta_lower", env.theta_lower},
                             {"theta_upper", env.theta_upper},
                             {"trivial_lower", env.trivial_lower}});
    }
    j["epsilon"] = sc.bounds.epsilon;
    j["transient"] = transient;

    if (sc.arrival_rate) {
        const double lambda = *sc.arrival_rate;
        const Vector dg = delay_grid(sc), bg = backlog_grid(sc);
        DelayBoundOptions opt;
        opt.overshoot_adjusted_lower = sc.bounds.overshoot_adjusted_lower;
        j["arrival_rate"] = lambda;
        try {
            const AdjustmentResult adj = adjustment_coefficient(m, lambda);
            j["theta_star"] = adj.theta_star;
            j["decay_rate_per_slot"] = adj.theta_star * lambda;
            j["degenerate"] = nullptr;
            auto ds = r.open("delay_bounds.csv");
            io::write_bound_csv(ds, delay_tail_bound(m, lambda, w, dg, opt));
            auto bs = r.open("backlog_bounds.csv");
            io::write_bound_csv(bs, backlog_tail_bound(m, lambda, w, bg, opt));
        } catch (const Error &e) {
            if (e.code() != Errc::no_root)
                throw;
            // Service never falls below the arrival rate: the queue stays empty.
            const bool zero_delay = m.min_increment() >= lambda;
            j["theta_star"] = nullptr;
            j["degenerate"] = zero_delay ? "zero_delay" : "no_root";
            auto write = [&](const std::string &name, const char *quantity, const Vector &axis) {
                TailBoundCurve c;
                c.quantity = quantity;
                for (double x : axis) {
                    const double p = (zero_delay && x > 0.0) ? 0.0 : 1.0;
                    c.axis.push_back(x);
                    c.lower.push_back(zero_delay ? p : 0.0);
                    c.upper.push_back(p);
                    c.theta.push_back(std::numeric_limits<double>::infinity());
                    c.clamped.push_back(false);
                }
                auto os = r.open(name);
                io::write_bound_csv(os, c);
            };
            write("delay_bounds.csv", "delay_ccdf", dg);
            write("backlog_bounds.csv", "backlog_ccdf", bg);
        }
    }

    json dcc = json::array();
    for (double d : sc.bounds.delay_targets) {
        const DelayConstrainedCapacity c = delay_constrained_capacity(m, d, sc.bounds.epsilon, w);
        dcc.push_back({{"d", d},
                       {"epsilon", sc.bounds.epsilon},
                       {"lambda_lower", c.lambda_lower},
                       {"lambda_upper", c.lambda_upper},
                       {"residual_lower", c.residual_lower},
                       {"residual_upper", c.residual_upper}});
    }
    j["delay_constrained_capacity"] = dcc;
    r.write_json("bounds.json", j);
}

// ---- control ----------------------------------------------------------------

void cmd_control(Run &r)
{
    const Scenario &sc = r.sc;
    if (!sc.plan)
        throw Error(Errc::config, "control: missing (the control subcommand needs a control section)");
    json j = io::plan_to_json(*sc.plan);
    j["coupled_fading"] = std::holds_alternative<CoupledFadingModel>(sc.controlled());
    r.write_json("plan.json", j);
    for (std::size_t k = 0; k < sc.plan->horizon(); ++k) {
        auto os = r.open("transition_" + std::to_string(k) + ".csv");
        io::write_transition_csv(os, sc.plan->transitions[k]);
    }
}

// ---- order ------------------------------------------------------------------

void cmd_order(Run &r)
{
    const Scenario &sc = r.sc;
    if (sc.order.compare_with.empty())
        throw Error(Errc::config, "order.compare_with: missing (the order subcommand needs comparison copulas)");
    const MarkovAdditiveModel &a = sc.analytic();
    // Common stationary marginal: every compared model shares it, so means agree.
    const MarginalDistribution &w = *sc.marginal;
    json cmp = json::array();
    for (std::size_t k = 0; k < sc.order.compare_with.size(); ++k) {
        const MarkovAdditiveModel b = with_copula(sc, sc.order.compare_with[k]);
        const CxReport rep = cx_compare(a, w, b, w, sc.order.horizon, sc.order.grid_points);
        {
            auto os = r.open("stop_loss_" + std::to_string(k) + ".csv");
            io::write_stop_loss_csv(os, rep);
        }
        json e = {{"copula", io::copula_to_json(sc.order.compare_with[k])},
                  {"transition", io::matrix_to_json(b.steady_transition())},
                  {"verdict", verdict_name(rep.verdict)},
                  {"mean_a", rep.mean_a},
                  {"mean_b", rep.mean_b},
                  {"tolerance", rep.tolerance}};
        if (sc.arrival_rate && b.ergodic()) {
            const AdjustmentOrderReport ar = adjustment_order_check(a, w, b, w, *sc.arrival_rate, rep.verdict);
            e["theta_a"] = ar.theta_a;
            e["theta_b"] = ar.theta_b;
            e["consistent_with_cx"] = ar.consistent_with_cx;
            e["prefactors"] = {{"min_a", ar.prefactor_min_a},
                               {"max_a", ar.prefactor_max_a},
                               {"min_b", ar.prefactor_min_b},
                               {"max_b", ar.prefactor_max_b}};
            // theta ordering alone orders delay tails only when the prefactors agree
            e["delay_order_conditional_on_prefactors"] = true;
        } else if (sc.arrival_rate) {
            e["theta_b"] = nullptr; // reducible chain: no Perron root
        }
        cmp.push_back(e);
    }
    r.write_json("order.json", {{"model_copula", io::copula_to_json(*sc.copula)},
                                {"transition", io::matrix_to_json(a.steady_transition())},
                                {"horizon", sc.order.horizon},
                                {"comparisons", cmp}});
}

// ---- validate ---------------------------------------------------------------

void cmd_validate(Run &r)
{
    const Scenario &sc = r.sc;
    if (!sc.arrival_rate && sc.bounds.horizons.empty())
        throw Error(Errc::config, "validate: needs arrival_rate (queue bounds) or bounds.horizons (envelopes)");
    const MarkovAdditiveModel &m = sc.analytic();
    const MarginalDistribution w = sc.start();
    const PathEnsemble e = simulate(sc);
    const auto &v = sc.validate;
    json j;
    bool pass = true;

    if (sc.arrival_rate) {
        const double lambda = *sc.arrival_rate;
        const QueueSamples q = lindley_queue(e, lambda, sc.simulation.warmup);
        const Vector dg = delay_grid(sc), bg = backlog_grid(sc);
        const EmpiricalTail dt = empirical_tail(q.delay, dg, v.delta, v.dkw_inflation);
        const EmpiricalTail bt = empirical_tail(q.backlog, bg, v.delta, v.dkw_inflation);
        {
            auto os = r.open("delay_tail.csv");
            io::write_tail_csv(os, dt);
        }
        {
            auto os = r.open("backlog_tail.csv");
            io::write_tail_csv(os, bt);
        }
        const AdjustmentResult adj = adjustment_coefficient(m, lambda);
        DelayBoundOptions adjusted;
        adjusted.overshoot_adjusted_lower = true;
        const TailBoundCurve db = delay_tail_bound(m, lambda, w, dg), bb = backlog_tail_bound(m, lambda, w, bg);
        const TailBoundCurve dba = delay_tail_bound(m, lambda, w, dg, adjusted);
        {
            auto os = r.open("delay_bounds.csv");
            io::write_bound_csv(os, db);
        }
        const ValidationReport rd = validate_bounds(dt, db, v.min_exceedances);
        const ValidationReport rb = validate_bounds(bt, bb, v.min_exceedances);
        const ValidationReport ra = validate_bounds(dt, dba, v.min_exceedances);
        const double slope = tail_slope(dt, v.min_exceedances), rate = adj.theta_star * lambda;
        j["arrival_rate"] = lambda;
        j["samples"] = q.delay.size();
        j["empirically_unstable"] = q.unstable;
        j["theta_star"] = adj.theta_star;
        j["dkw_half_width"] = dt.half_width;
        j["delay"] = report_json(rd, dg);
        j["backlog"] = report_json(rb, bg);
        j["delay_overshoot_adjusted"] = report_json(ra, dg);
        j["slope"] = {{"empirical", slope}, {"analytic", rate}, {"relative_error", std::abs(slope / rate - 1.0)}};
        pass = rd.violations == 0 && rb.violations == 0;
        std::printf("delay band: %zu/%zu points violated; backlog band: %zu/%zu; slope %.4g vs %.4g\n", rd.violations,
                    rd.points_checked, rb.violations, rb.points_checked, slope, rate);
    }

    json env = json::array();
    for (std::size_t t : sc.bounds.horizons) {
        if (t > e.horizon)
            continue;
        const TransientEnvelope te = transient_capacity_bounds(m, w, t, sc.bounds.epsilon);
        const std::size_t out = envelope_violations(e, t, te.c_lower, te.c_upper);
        const double allowance = 2.0 * sc.bounds.epsilon * static_cast<double>(e.paths) + 3.0;
        pass = pass && static_cast<double>(out) <= allowance;
        env.push_back({{"t", t}, {"c_lower", te.c_lower}, {"c_upper", te.c_upper}, {"outside", out}, {"allowance", allowance}});
    }
    if (!env.empty())
        std::printf("transient envelope checked at %zu horizons\n", env.size());
    j["transient_envelope"] = env;
    j["pass"] = pass;
    r.write_json("validate.json", j);
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"depcap: dependence-controlled capacity analysis"};
    app.require_subcommand(1);
    std::string config, out = ".";
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", config, "scenario JSON file")->required();
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "override the scenario seed");
        sub->add_option("--threads", threads, "worker threads (never changes results)");
    };
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "Monte-Carlo ensembles and empirical queue tails"},
        {"bounds", "analytic capacity, delay and backlog bounds"},
        {"control", "transition plan from the step copulas"},
        {"order", "convex-order and adjustment-coefficient comparisons"},
        {"validate", "analytic bounds against simulation"},
    };
    for (const auto &[name, help] : commands)
        add_common(app.add_subcommand(name, help));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Run r;
    for (auto *sub : app.get_subcommands())
        r.command = sub->get_name();
    try {
        r.config_path = config;
        std::ifstream in(config, std::ios::binary);
        if (!in)
            throw Error(Errc::config, config + ": cannot open");
        r.config_text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
        json doc;
        try {
            doc = json::parse(r.config_text);
        } catch (const json::parse_error &e) {
            throw Error(Errc::config, config + ": " + e.what());
        }
        r.sc = load_scenario(doc);
        if (seed)
            r.sc.seed = *seed;
        if (threads)
            r.sc.simulation.threads = *threads;
        r.out = out;
        std::error_code ec;
        fs::create_directories(r.out, ec);
        if (ec)
            throw Error(Errc::config, out + ": " + ec.message());

        if (r.command == "simulate")
            cmd_simulate(r);
        else if (r.command == "bounds")
            cmd_bounds(r);
        else if (r.command == "control")
            cmd_control(r);
        else if (r.command == "order")
            cmd_order(r);
        else
            cmd_validate(r);

        json manifest = {{"command", r.command},
                         {"config", r.config_path},
                         {"config_fnv1a", io::hex64(io::fnv1a(r.config_text))},
                         {"seed", r.sc.seed},
                         {"threads", r.sc.simulation.threads},
                         {"outputs", r.files},
                         {"timestamp", utc_timestamp()}};
        std::ofstream(r.out / "manifest.json") << manifest.dump(2) << '\n';
        return 0;
    } catch (const Error &e) {
        std::fprintf(stderr, "depcap %s: %s\n", r.command.c_str(), e.what());
        return exit_code(e.code());
    } catch (const std::exception &e) {
        std::fprintf(stderr, "depcap %s: %s\n", r.command.c_str(), e.what());
        return 1;
    }
}
