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

#ifndef DEPCAP_IO_HPP
#define DEPCAP_IO_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "control.hpp"
#include "copula.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "markov.hpp"
#include "order.hpp"
#include "simulate.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace depcap::io {

using json = nlohmann::json;

/// Shortest decimal that round-trips the double.
inline std::string num(double x)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[32];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x)
            break;
    }
    return buf;
}

// ---- CSV ------------------------------------------------------------------

inline void write_transition_csv(std::ostream &os, const Matrix &p)
{
    os << "from,to,prob\n";
    for (std::size_t i = 0; i < p.rows(); ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            os << i << ',' << j << ',' << num(p(i, j)) << '\n';
}

struct KappaPoint {
    double theta;
    double kappa;
};

inline void write_kappa_csv(std::ostream &os, const std::vector<KappaPoint> &pts)
{
    os << "theta,kappa\n";
    for (const auto &p : pts)
        os << num(p.theta) << ',' << num(p.kappa) << '\n';
}

inline void write_bound_csv(std::ostream &os, const TailBoundCurve &c)
{
    os << "x,lower,upper,theta,clamped\n";
    for (std::size_t k = 0; k < c.axis.size(); ++k)
        os << num(c.axis[k]) << ',' << num(c.lower[k]) << ',' << num(c.upper[k]) << ',' << num(c.theta[k]) << ','
           << (c.clamped[k] ? 1 : 0) << '\n';
}

inline void write_stop_loss_csv(std::ostream &os, const CxReport &r)
{
    os << "a,E_A,E_B\n";
    for (const auto &p : r.evidence)
        os << num(p.a) << ',' << num(p.e_a) << ',' << num(p.e_b) << '\n';
}

inline void write_path_summary_csv(std::ostream &os, const std::vector<PathSummaryRow> &rows)
{
    os << "t,mean,q_low,q_high\n";
    for (const auto &r : rows)
        os << r.t << ',' << num(r.mean) << ',' << num(r.q_low) << ',' << num(r.q_high) << '\n';
}

inline void write_tail_csv(std::ostream &os, const EmpiricalTail &t)
{
    os << "x,empirical,dkw_lo,dkw_hi\n";
    for (std::size_t k = 0; k < t.grid.size(); ++k)
        os << num(t.grid[k]) << ',' << num(t.ccdf[k]) << ',' << num(t.lo[k]) << ',' << num(t.hi[k]) << '\n';
}

// ---- JSON readers with field paths ------------------------------------------

[[noreturn]] inline void config_error(std::string_view path, std::string_view what)
{
    throw Error(Errc::config, std::string(path) + ": " + std::string(what));
}

inline std::string child(std::string_view path, std::string_view key) { return std::string(path) + "." + std::string(key); }
inline std::string child(std::string_view path, std::size_t i) { return std::string(path) + "[" + std::to_string(i) + "]"; }

inline double get_number(const json &j, std::string_view path)
{
    if (!j.is_number())
        config_error(path, "expected a number");
    return j.get<double>();
}

inline std::uint64_t get_unsigned(const json &j, std::string_view path)
{
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        config_error(path, "expected a nonnegative integer");
    return j.get<std::uint64_t>();
}

inline std::string get_string(const json &j, std::string_view path)
{
    if (!j.is_string())
        config_error(path, "expected a string");
    return j.get<std::string>();
}

inline Vector get_vector(const json &j, std::string_view path)
{
    if (!j.is_array() || j.empty())
        config_error(path, "expected a nonempty array of numbers");
    Vector v;
    for (std::size_t i = 0; i < j.size(); ++i)
        v.push_back(get_number(j[i], child(path, i)));
    return v;
}

inline Matrix get_matrix(const json &j, std::string_view path)
{
    if (!j.is_array() || j.empty())
        config_error(path, "expected a nonempty array of rows");
    std::vector<Vector> rows;
    for (std::size_t i = 0; i < j.size(); ++i) {
        rows.push_back(get_vector(j[i], child(path, i)));
        if (rows.back().size() != rows.front().size())
            config_error(child(path, i), "row length differs from the first row");
    }
    return Matrix::from_rows(rows);
}

/// Runs `make`, re-labelling any library error as a config error at `path`.
template <class F>
auto at_path(std::string_view path, F &&make) -> decltype(make())
{
    try {
        return make();
    } catch (const Error &e) {
        if (e.code() == Errc::config)
            throw;
        throw Error(Errc::config, std::string(path) + ": " + e.what());
    }
}

inline const json &need(const json &j, std::string_view path, const char *key)
{
    if (!j.is_object())
        config_error(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        config_error(child(path, key), "missing");
    return *it;
}

inline MarginalDistribution marginal_from_json(const json &j, std::string_view path)
{
    Vector p = get_vector(j, path);
    return at_path(path, [&] { return MarginalDistribution(std::move(p)); });
}

/// {"family": "product" | "comonotone" | "countermonotone"}
/// {"family": "frechet", "alpha": a} or {"family": "frechet", "weights": [wW, wP, wM]}
/// {"family": "gaussian", "rho": r} or {"family": "gaussian", "correlation": [[...]]}
inline CopulaSpec copula_from_json(const json &j, std::string_view path)
{
    const std::string fam = get_string(need(j, path, "family"), child(path, "family"));
    return at_path(path, [&] {
        if (fam == "product")
            return CopulaSpec::product();
        if (fam == "comonotone")
            return CopulaSpec::comonotone();
        if (fam == "countermonotone")
            return CopulaSpec::countermonotone();
        if (fam == "frechet") {
            if (j.contains("alpha"))
                return CopulaSpec::frechet_alpha(get_number(j["alpha"], child(path, "alpha")));
            const Vector w = get_vector(need(j, path, "weights"), child(path, "weights"));
            if (w.size() != 3)
                config_error(child(path, "weights"), "expected [wW, wP, wM]");
            return CopulaSpec::frechet({w[0], w[1], w[2]});
        }
        if (fam == "gaussian") {
            if (j.contains("rho"))
                return CopulaSpec::gaussian(get_number(j["rho"], child(path, "rho")));
            return CopulaSpec::gaussian(get_matrix(need(j, path, "correlation"), child(path, "correlation")));
        }
        config_error(child(path, "family"), "unknown copula family '" + fam + "'");
    });
}

inline json copula_to_json(const CopulaSpec &c)
{
    json j;
    j["family"] = family_name(c.family());
    if (c.family() == CopulaFamily::FrechetMix) {
        if (c.alpha())
            j["alpha"] = *c.alpha();
        const auto w = *c.frechet_weights();
        j["weights"] = {w.w, w.p, w.m};
    } else if (c.family() == CopulaFamily::Gaussian) {
        j["correlation"] = c.correlation().to_rows();
    }
    return j;
}

/// {"kind": "rayleigh", "bandwidth_hz": W, "snr": g}, {"kind": "deterministic",
/// "value": c}, {"kind": "pmf", "support": [...], "probs": [...]}
inline IncrementLaw law_from_json(const json &j, std::string_view path)
{
    const std::string kind = get_string(need(j, path, "kind"), child(path, "kind"));
    return at_path(path, [&]() -> IncrementLaw {
        if (kind == "rayleigh")
            return RayleighCapacity(get_number(need(j, path, "bandwidth_hz"), child(path, "bandwidth_hz")),
                                    get_number(need(j, path, "snr"), child(path, "snr")));
        if (kind == "deterministic")
            return Deterministic{get_number(need(j, path, "value"), child(path, "value"))};
        if (kind == "pmf")
            return DiscretePmf(get_vector(need(j, path, "support"), child(path, "support")),
                               get_vector(need(j, path, "probs"), child(path, "probs")));
        config_error(child(path, "kind"), "unknown law kind '" + kind + "'");
    });
}

inline json matrix_to_json(const Matrix &m) { return m.to_rows(); }

inline json plan_to_json(const ControlPlan &plan)
{
    json steps = json::array();
    for (std::size_t k = 0; k < plan.transitions.size(); ++k)
        steps.push_back({{"step", k},
                         {"copula", copula_to_json(plan.copulas[k])},
                         {"marginal", plan.marginals[k].probs()},
                         {"transition", matrix_to_json(plan.transitions[k])}});
    return {{"states", plan.states.labels()},
            {"orientation", plan.orientation == Orientation::capacity ? "capacity" : "net_increment"},
            {"steps", steps},
            {"final_marginal", plan.marginals.back().probs()}};
}

inline json curve_to_json(const TailBoundCurve &c)
{
    return {{"quantity", c.quantity}, {"axis", c.axis}, {"lower", c.lower}, {"upper", c.upper}, {"theta", c.theta}};
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
    return buf;
}

} // namespace depcap::io

#endif
