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

#ifndef DEPCAP_SCENARIO_HPP
#define DEPCAP_SCENARIO_HPP

#include "control.hpp"
#include "io.hpp"
#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace depcap {

struct SimulationConfig {
    std::size_t paths = 1000;
    std::size_t horizon = 1000;
    std::size_t warmup = 0;
    unsigned threads = 1;
};

struct BoundsConfig {
    Vector delay_grid;
    Vector backlog_grid;
    std::vector<std::size_t> horizons;
    double epsilon = 1e-3;
    Vector delay_targets;
    std::size_t cumulative_points = 61;
    double cumulative_span = 0.15; // relative half-width around t * mean
    bool overshoot_adjusted_lower = false;
};

struct OrderConfig {
    std::vector<CopulaSpec> compare_with;
    std::size_t horizon = 4;
    std::size_t grid_points = 50;
};

struct ValidateConfig {
    double delta = 0.05;
    double dkw_inflation = 1.0;
    std::size_t min_exceedances = 100;
};

/// A validated scenario document. Either `copula` (with `marginal`) or a plain
/// transition matrix defines an uncontrolled model; a `control` section
/// replaces it with the planned (and possibly spatially coupled) model.
struct Scenario {
    std::uint64_t seed = 1;
    double bandwidth = 0.0;
    Matrix snr;
    std::optional<CopulaSpec> copula; // model-level step copula, if any
    std::optional<MarginalDistribution> marginal;
    Orientation orientation = Orientation::capacity;
    std::optional<ControlPlan> plan;
    std::optional<ControlledModel> model;
    std::optional<MarginalDistribution> initial;
    std::optional<double> arrival_rate;
    SimulationConfig simulation;
    BoundsConfig bounds;
    OrderConfig order;
    ValidateConfig validate;

    const ControlledModel &controlled() const { return *model; }

    /// The Markov additive model used by every analytic computation.
    const MarkovAdditiveModel &analytic() const
    {
        if (auto m = std::get_if<MarkovAdditiveModel>(&*model))
            return *m;
        throw Error(Errc::unsupported, "analytic results need a Markov additive model, not a coupled fading model");
    }

    /// Start distribution: the configured one, else the plan's first marginal,
    /// else the stationary distribution.
    MarginalDistribution start() const
    {
        if (initial)
            return *initial;
        if (plan && std::holds_alternative<CoupledFadingModel>(*model))
            return plan->marginals.front();
        if (auto m = std::get_if<MarkovAdditiveModel>(&*model))
            return m->stationary();
        return plan->marginals.front();
    }
};

namespace detail {

inline Orientation orientation_from_json(const io::json &j, std::string_view path)
{
    const std::string s = io::get_string(j, path);
    if (s == "capacity")
        return Orientation::capacity;
    if (s == "net_increment")
        return Orientation::net_increment;
    io::config_error(path, "expected \"capacity\" or \"net_increment\"");
}

inline std::size_t count_from_json(const io::json &j, std::string_view path, std::size_t min = 1)
{
    const auto v = io::get_unsigned(j, path);
    if (v < min)
        io::config_error(path, "must be at least " + std::to_string(min));
    return static_cast<std::size_t>(v);
}

inline double positive_from_json(const io::json &j, std::string_view path)
{
    const double v = io::get_number(j, path);
    if (!(v > 0.0) || !std::isfinite(v))
        io::config_error(path, "must be positive and finite");
    return v;
}

inline Vector grid_from_json(const io::json &j, std::string_view path)
{
    if (j.is_object()) {
        // {"start": a, "stop": b, "points": n}
        const double a = io::get_number(io::need(j, path, "start"), io::child(path, "start"));
        const double b = io::get_number(io::need(j, path, "stop"), io::child(path, "stop"));
        const std::size_t n = count_from_json(io::need(j, path, "points"), io::child(path, "points"), 2);
        if (!(b > a))
            io::config_error(path, "stop must exceed start");
        Vector g(n);
        for (std::size_t k = 0; k < n; ++k)
            g[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1);
        return g;
    }
    Vector g = io::get_vector(j, path);
    for (std::size_t k = 0; k < g.size(); ++k)
        if (g[k] < 0.0 || (k && g[k] <= g[k - 1]))
            io::config_error(io::child(path, k), "grid must be nonnegative and strictly increasing");
    return g;
}

/// snr_matrix (linear), snr_matrix_db, or snr: a scalar for every transition
/// or one value per source state.
inline Matrix snr_from_json(const io::json &m, std::size_t n)
{
    const int keys = int(m.contains("snr_matrix")) + int(m.contains("snr_matrix_db")) + int(m.contains("snr"));
    if (keys != 1)
        io::config_error("model", "give exactly one of snr_matrix, snr_matrix_db, snr");
    Matrix s;
    if (m.contains("snr_matrix")) {
        s = io::get_matrix(m["snr_matrix"], "model.snr_matrix");
    } else if (m.contains("snr_matrix_db")) {
        s = io::get_matrix(m["snr_matrix_db"], "model.snr_matrix_db");
        for (std::size_t i = 0; i < s.rows(); ++i)
            for (std::size_t j = 0; j < s.cols(); ++j)
                s(i, j) = std::pow(10.0, s(i, j) / 10.0);
    } else if (m["snr"].is_number()) {
        s = Matrix(n, n, io::get_number(m["snr"], "model.snr"));
    } else {
        const Vector v = io::get_vector(m["snr"], "model.snr");
        if (v.size() != n)
            io::config_error("model.snr", "expected one value per state (" + std::to_string(n) + ")");
        s = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s(i, j) = v[i];
    }
    if (s.rows() != n || s.cols() != n)
        io::config_error("model", "SNR matrix must be " + std::to_string(n) + "x" + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!(s(i, j) > 0.0) || !std::isfinite(s(i, j)))
                io::config_error("model", "SNR entries must be positive and finite");
    return s;
}

inline std::vector<IncrementLaw> laws_from_json(const io::json &j, std::size_t n)
{
    if (!j.is_array() || j.size() != n * n)
        io::config_error("model.laws", "expected " + std::to_string(n * n) + " laws in row-major order");
    std::vector<IncrementLaw> laws;
    for (std::size_t k = 0; k < j.size(); ++k)
        laws.push_back(io::law_from_json(j[k], io::child("model.laws", k)));
    return laws;
}

inline OrderedStateSpace states_from_json(const io::json &m, std::size_t n)
{
    if (!m.contains("state_labels"))
        return OrderedStateSpace::indexed(n);
    const io::json &j = m["state_labels"];
    if (!j.is_array() || j.size() != n)
        io::config_error("model.state_labels", "expected " + std::to_string(n) + " labels");
    std::vector<std::string> labels;
    std::vector<double> values;
    for (std::size_t k = 0; k < n; ++k) {
        labels.push_back(io::get_string(j[k], io::child("model.state_labels", k)));
        values.push_back(static_cast<double>(k));
    }
    return io::at_path("model.state_labels", [&] { return OrderedStateSpace(labels, values); });
}

inline void check_known_keys(const io::json &j, std::string_view path, std::initializer_list<const char *> keys)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char *k : keys)
            ok = ok || it.key() == k;
        if (!ok)
            io::config_error(io::child(path, it.key()), "unknown key");
    }
}

} // namespace detail

/// Builds and validates a scenario; every failure is Errc::config with the
/// offending field path, except copula infeasibility, which keeps its code.
inline Scenario load_scenario(const io::json &doc)
{
    using namespace io;
    if (!doc.is_object())
        config_error("$", "scenario must be a JSON object");
    detail::check_known_keys(doc, "$", {"name", "description", "seed", "model", "control", "initial_distribution",
                                        "arrival_rate", "simulation", "bounds", "order", "validate"});
    Scenario sc;
    if (doc.contains("seed"))
        sc.seed = get_unsigned(doc["seed"], "seed");
    if (doc.contains("arrival_rate"))
        sc.arrival_rate = detail::positive_from_json(doc["arrival_rate"], "arrival_rate");

    const json &m = need(doc, "$", "model");
    detail::check_known_keys(m, "model", {"bandwidth_hz", "snr_matrix", "snr_matrix_db", "snr", "transition_matrix",
                                          "copula", "marginal", "orientation", "laws", "state_labels"});
    const bool has_control = doc.contains("control");
    const bool has_matrix = m.contains("transition_matrix");
    const bool has_copula = m.contains("copula");
    if (int(has_control) + int(has_matrix) + int(has_copula) != 1)
        config_error("model", "give exactly one of model.transition_matrix, model.copula, or a control section");
    if (m.contains("orientation"))
        sc.orientation = detail::orientation_from_json(m["orientation"], "model.orientation");

    std::optional<Matrix> p;
    std::size_t n = 0;
    if (has_matrix) {
        p = get_matrix(m["transition_matrix"], "model.transition_matrix");
        at_path("model.transition_matrix", [&] { check_stochastic(*p); });
        n = p->rows();
    } else if (has_copula) {
        sc.copula = copula_from_json(m["copula"], "model.copula");
        sc.marginal = marginal_from_json(need(m, "model", "marginal"), "model.marginal");
        n = sc.marginal->size();
    }

    const json *ctl = has_control ? &doc["control"] : nullptr;
    std::optional<Matrix> uncontrolled;
    if (ctl) {
        detail::check_known_keys(*ctl, "control", {"copulas", "copula", "horizon", "varpi0", "target", "orientation",
                                                   "spatial", "uncontrolled"});
        const MarginalDistribution varpi0 = marginal_from_json(need(*ctl, "control", "varpi0"), "control.varpi0");
        if (ctl->contains("uncontrolled")) {
            uncontrolled = get_matrix((*ctl)["uncontrolled"], "control.uncontrolled");
            at_path("control.uncontrolled", [&] { check_stochastic(*uncontrolled); });
        }
        n = varpi0.size() * (uncontrolled ? uncontrolled->rows() : 1);
    }

    OrderedStateSpace states = detail::states_from_json(m, ctl ? (*ctl)["varpi0"].size() : n);

    std::optional<std::vector<IncrementLaw>> laws;
    if (m.contains("laws")) {
        if (ctl)
            config_error("model.laws", "a controlled model uses Rayleigh laws from the SNR matrix");
        laws = detail::laws_from_json(m["laws"], n);
    } else {
        sc.bandwidth = detail::positive_from_json(need(m, "model", "bandwidth_hz"), "model.bandwidth_hz");
        sc.snr = detail::snr_from_json(m, n);
    }

    auto plan_or_rethrow = [](std::string_view path, auto &&make) {
        try {
            return make();
        } catch (const Error &e) {
            if (e.code() == Errc::infeasible_copula || e.code() == Errc::zero_mass_state || e.code() == Errc::config)
                throw Error(e.code(), std::string(path) + ": " + e.what());
            throw Error(Errc::config, std::string(path) + ": " + e.what());
        }
    };

    if (ctl) {
        const json &c = *ctl;
        std::vector<CopulaSpec> copulas;
        CopulaSpec spatial = CopulaSpec::product();
        if (c.contains("spatial"))
            spatial = copula_from_json(c["spatial"], "control.spatial");
        if (c.contains("copulas")) {
            if (c.contains("copula") || c.contains("horizon"))
                config_error("control", "give either copulas or copula with horizon");
            const json &arr = c["copulas"];
            if (!arr.is_array() || arr.empty())
                config_error("control.copulas", "expected a nonempty array of copulas");
            for (std::size_t k = 0; k < arr.size(); ++k)
                copulas.push_back(copula_from_json(arr[k], child("control.copulas", k)));
        } else {
            const std::size_t horizon = c.contains("horizon") ? detail::count_from_json(c["horizon"], "control.horizon") : 1;
            CopulaSpec step = CopulaSpec::product();
            if (c.contains("copula"))
                step = copula_from_json(c["copula"], "control.copula");
            else if (spatial.family() == CopulaFamily::Gaussian && spatial.dimension() == 4)
                step = at_path("control.spatial", [&] { return gaussian_block(spatial, 0, 2); });
            else
                config_error("control", "missing copula (or a 4-dimensional Gaussian spatial copula)");
            copulas.assign(horizon, step);
        }
        PlanOptions opt;
        if (c.contains("orientation"))
            opt.orientation = detail::orientation_from_json(c["orientation"], "control.orientation");
        if (c.contains("target"))
            opt.target = marginal_from_json(c["target"], "control.target");
        const MarginalDistribution varpi0 = marginal_from_json(c["varpi0"], "control.varpi0");
        sc.orientation = opt.orientation;
        // A homogeneous stationary plan on one coordinate is also a copula-defined
        // model, so it can serve as the base of order comparisons.
        const bool homogeneous = std::all_of(copulas.begin(), copulas.end(), [&](const CopulaSpec &x) {
            return copula_to_json(x) == copula_to_json(copulas.front());
        });
        if (homogeneous && !opt.target && !uncontrolled && spatial.family() == CopulaFamily::Product) {
            sc.copula = copulas.front();
            sc.marginal = varpi0;
        }
        sc.plan = plan_or_rethrow("control", [&] { return plan_transitions(copulas, varpi0, states, opt); });
        sc.model = plan_or_rethrow(
            "control", [&] { return assemble_controlled_model(*sc.plan, uncontrolled, spatial, sc.snr, sc.bandwidth); });
    } else {
        if (has_copula) {
            const std::vector<CopulaSpec> one{*sc.copula};
            PlanOptions opt;
            opt.orientation = sc.orientation;
            const ControlPlan plan =
                plan_or_rethrow("model.copula", [&] { return plan_transitions(one, *sc.marginal, states, opt); });
            p = plan.transitions.front();
        }
        sc.model = at_path("model", [&]() -> ControlledModel {
            if (laws)
                return MarkovAdditiveModel(states, std::vector<Matrix>{*p}, *laws);
            std::vector<IncrementLaw> rl;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    rl.emplace_back(RayleighCapacity(sc.bandwidth, sc.snr(i, j)));
            return MarkovAdditiveModel(states, std::vector<Matrix>{*p}, std::move(rl));
        });
    }

    if (doc.contains("initial_distribution")) {
        sc.initial = marginal_from_json(doc["initial_distribution"], "initial_distribution");
        if (sc.initial->size() != model_size(*sc.model))
            config_error("initial_distribution", "expected " + std::to_string(model_size(*sc.model)) + " entries");
    }

    if (doc.contains("simulation")) {
        const json &s = doc["simulation"];
        detail::check_known_keys(s, "simulation", {"paths", "horizon", "warmup", "threads"});
        if (s.contains("paths"))
            sc.simulation.paths = detail::count_from_json(s["paths"], "simulation.paths");
        if (s.contains("horizon"))
            sc.simulation.horizon = detail::count_from_json(s["horizon"], "simulation.horizon");
        if (s.contains("warmup"))
            sc.simulation.warmup = detail::count_from_json(s["warmup"], "simulation.warmup", 0);
        if (s.contains("threads"))
            sc.simulation.threads = static_cast<unsigned>(detail::count_from_json(s["threads"], "simulation.threads"));
        if (sc.simulation.warmup >= sc.simulation.horizon)
            config_error("simulation.warmup", "must be smaller than simulation.horizon");
    }

    if (doc.contains("bounds")) {
        const json &b = doc["bounds"];
        detail::check_known_keys(b, "bounds", {"delay_grid", "backlog_grid", "horizons", "epsilon", "delay_targets",
                                               "cumulative_points", "cumulative_span", "overshoot_adjusted_lower"});
        if (b.contains("delay_grid"))
            sc.bounds.delay_grid = detail::grid_from_json(b["delay_grid"], "bounds.delay_grid");
        if (b.contains("backlog_grid"))
            sc.bounds.backlog_grid = detail::grid_from_json(b["backlog_grid"], "bounds.backlog_grid");
        if (b.contains("horizons")) {
            const json &h = b["horizons"];
            if (!h.is_array())
                config_error("bounds.horizons", "expected an array of slot counts");
            for (std::size_t k = 0; k < h.size(); ++k)
                sc.bounds.horizons.push_back(detail::count_from_json(h[k], child("bounds.horizons", k)));
        }
        if (b.contains("epsilon")) {
            sc.bounds.epsilon = get_number(b["epsilon"], "bounds.epsilon");
            if (!(sc.bounds.epsilon > 0.0 && sc.bounds.epsilon < 1.0))
                config_error("bounds.epsilon", "must lie in (0, 1)");
        }
        if (b.contains("delay_targets")) {
            sc.bounds.delay_targets = get_vector(b["delay_targets"], "bounds.delay_targets");
            for (std::size_t k = 0; k < sc.bounds.delay_targets.size(); ++k)
                if (!(sc.bounds.delay_targets[k] > 0.0))
                    config_error(child("bounds.delay_targets", k), "must be positive");
        }
        if (b.contains("cumulative_points"))
            sc.bounds.cumulative_points = detail::count_from_json(b["cumulative_points"], "bounds.cumulative_points", 2);
        if (b.contains("cumulative_span"))
            sc.bounds.cumulative_span = detail::positive_from_json(b["cumulative_span"], "bounds.cumulative_span");
        if (b.contains("overshoot_adjusted_lower")) {
            if (!b["overshoot_adjusted_lower"].is_boolean())
                config_error("bounds.overshoot_adjusted_lower", "expected a boolean");
            sc.bounds.overshoot_adjusted_lower = b["overshoot_adjusted_lower"].get<bool>();
        }
    }

    if (doc.contains("order")) {
        const json &o = doc["order"];
        detail::check_known_keys(o, "order", {"compare_with", "horizon", "grid_points"});
        if (o.contains("compare_with")) {
            if (!sc.copula)
                config_error("order.compare_with", "comparisons need a model defined by one copula and marginal");
            const json &arr = o["compare_with"];
            if (!arr.is_array())
                config_error("order.compare_with", "expected an array of copulas");
            for (std::size_t k = 0; k < arr.size(); ++k)
                sc.order.compare_with.push_back(copula_from_json(arr[k], child("order.compare_with", k)));
        }
        if (o.contains("horizon"))
            sc.order.horizon = detail::count_from_json(o["horizon"], "order.horizon");
        if (o.contains("grid_points"))
            sc.order.grid_points = detail::count_from_json(o["grid_points"], "order.grid_points", 2);
    }

    if (doc.contains("validate")) {
        const json &v = doc["validate"];
        detail::check_known_keys(v, "validate", {"delta", "dkw_inflation", "min_exceedances"});
        if (v.contains("delta")) {
            sc.validate.delta = get_number(v["delta"], "validate.delta");
            if (!(sc.validate.delta > 0.0 && sc.validate.delta < 1.0))
                config_error("validate.delta", "must lie in (0, 1)");
        }
        if (v.contains("dkw_inflation")) {
            sc.validate.dkw_inflation = detail::positive_from_json(v["dkw_inflation"], "validate.dkw_inflation");
            if (sc.validate.dkw_inflation < 1.0)
                config_error("validate.dkw_inflation", "must be at least 1");
        }
        if (v.contains("min_exceedances"))
            sc.validate.min_exceedances = detail::count_from_json(v["min_exceedances"], "validate.min_exceedances", 0);
    }
    return sc;
}

/// Model for comparison: the scenario's marginal and SNR with another copula.
inline MarkovAdditiveModel with_copula(const Scenario &sc, const CopulaSpec &c)
{
    require(sc.copula && sc.marginal, Errc::invalid_argument, "scenario has no model copula");
    const std::vector<CopulaSpec> one{c};
    PlanOptions opt;
    opt.orientation = sc.orientation;
    const ControlPlan plan = plan_transitions(one, *sc.marginal, sc.analytic().states(), opt);
    std::vector<IncrementLaw> laws = sc.analytic().laws();
    return MarkovAdditiveModel(sc.analytic().states(), plan.transitions, std::move(laws));
}

inline io::json read_json_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::config, path + ": cannot open");
    try {
        return io::json::parse(in);
    } catch (const io::json::parse_error &e) {
        throw Error(Errc::config, path + ": " + e.what());
    }
}

} // namespace depcap

#endif
