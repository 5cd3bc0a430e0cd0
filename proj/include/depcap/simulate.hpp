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

#ifndef DEPCAP_SIMULATE_HPP
#define DEPCAP_SIMULATE_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "control.hpp"
#include "error.hpp"
#include "markov.hpp"
#include "model.hpp"
#include "random.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <span>
#include <thread>
#include <variant>
#include <vector>

namespace depcap {

struct StepDraw {
    std::size_t next;
    double increment;
};

namespace detail {

template <class URBG>
std::size_t draw_index(std::span<const double> probs, URBG &g)
{
    const double u = uniform_open(g);
    double acc = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        acc += probs[k];
        if (u < acc)
            return k;
    }
    // Rounding left the total a hair under one: take the last reachable state.
    std::size_t k = probs.size();
    while (k > 1 && probs[k - 1] == 0.0)
        --k;
    return k - 1;
}

} // namespace detail

template <class URBG>
StepDraw sample_step(const MarkovAdditiveModel &m, URBG &g, std::size_t step, std::size_t state)
{
    const std::size_t next = detail::draw_index(m.transition(step).row(state), g);
    return {next, capacity_sample(m.law(state, next), g)};
}

template <class URBG>
StepDraw sample_step(const CoupledFadingModel &m, URBG &g, std::size_t step, std::size_t state)
{
    const std::size_t next = detail::draw_index(m.transition(step).row(state), g);
    const double gain = m.fading_gain(g, step, state);
    return {next, m.capacity(state, next, gain)};
}

template <class URBG>
StepDraw sample_step(const ControlledModel &m, URBG &g, std::size_t step, std::size_t state)
{
    return std::visit([&](const auto &x) { return sample_step(x, g, step, state); }, m);
}

inline std::size_t model_size(const MarkovAdditiveModel &m) { return m.size(); }
inline std::size_t model_size(const CoupledFadingModel &m) { return m.size(); }
inline std::size_t model_size(const ControlledModel &m)
{
    return std::visit([](const auto &x) { return x.size(); }, m);
}

template <class M>
concept PathModel = requires(const M &m, Rng &g, std::size_t k) {
    { sample_step(m, g, k, k) } -> std::same_as<StepDraw>;
    { model_size(m) } -> std::convertible_to<std::size_t>;
};

/// N sample paths of (J_t, C(t), S(t)), t = 0..T. C(t) is the increment
/// earned on the step J_{t-1} -> J_t; C(0) is unused and S(0) = 0.
struct PathEnsemble {
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t horizon = 0;
    std::vector<std::uint32_t> states; // paths x (horizon + 1)
    std::vector<double> increments;    // paths x horizon, entry t-1 holds C(t)
    std::vector<double> cumulative;    // paths x (horizon + 1)

    std::uint32_t state(std::size_t p, std::size_t t) const { return states[p * (horizon + 1) + t]; }
    double increment(std::size_t p, std::size_t t) const { return increments[p * horizon + t - 1]; }
    double total(std::size_t p, std::size_t t) const { return cumulative[p * (horizon + 1) + t]; }
    std::span<const double> path_increments(std::size_t p) const { return {increments.data() + p * horizon, horizon}; }
};

struct SimulationOptions {
    unsigned threads = 0; // 0: hardware concurrency; never changes results
};

namespace detail {

template <class F>
void parallel_for(std::size_t n, unsigned threads, F &&body)
{
    unsigned nt = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    nt = static_cast<unsigned>(std::min<std::size_t>(nt, std::max<std::size_t>(n, 1)));
    if (nt <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(nt);
    for (unsigned w = 0; w < nt; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += nt)
                    body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto &t : pool)
        t.join();
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace detail

template <PathModel M>
PathEnsemble simulate_ensemble(const M &model, const MarginalDistribution &varpi0, std::size_t horizon,
                               std::size_t paths, std::uint64_t seed, const SimulationOptions &opt = {})
{
    require(varpi0.size() == model_size(model), Errc::dimension_mismatch, "initial distribution does not match states");
    require(horizon >= 1 && paths >= 1, Errc::invalid_argument, "need at least one path and one slot");
    PathEnsemble e;
    e.seed = seed;
    e.paths = paths;
    e.horizon = horizon;
    e.states.assign(paths * (horizon + 1), 0);
    e.increments.assign(paths * horizon, 0.0);
    e.cumulative.assign(paths * (horizon + 1), 0.0);
    detail::parallel_for(paths, opt.threads, [&](std::size_t p) {
        Rng g = path_rng(seed, p);
        std::uint32_t *st = e.states.data() + p * (horizon + 1);
        double *inc = e.increments.data() + p * horizon;
        double *cum = e.cumulative.data() + p * (horizon + 1);
        std::size_t j = detail::draw_index(varpi0.probs(), g);
        st[0] = static_cast<std::uint32_t>(j);
        for (std::size_t t = 0; t < horizon; ++t) {
            const StepDraw d = sample_step(model, g, t, j);
            j = d.next;
            st[t + 1] = static_cast<std::uint32_t>(j);
            inc[t] = d.increment;
            cum[t + 1] = cum[t] + d.increment;
        }
    });
    return e;
}

/// Backlog and virtual-delay samples from B(t) = max(B(t-1) + lambda - C(t), 0),
/// B(0) = 0, one sample per slot t > warmup on every path.
struct QueueSamples {
    double lambda = 0.0;
    std::vector<double> backlog;
    std::vector<double> delay;
    bool unstable = false; // empirical drift lambda - mean C is not negative
};

inline QueueSamples lindley_queue(const PathEnsemble &e, double lambda, std::size_t warmup)
{
    require(lambda >= 0.0, Errc::invalid_argument, "arrival rate must be nonnegative");
    require(warmup < e.horizon, Errc::invalid_argument, "warm-up covers the whole horizon");
    QueueSamples q;
    q.lambda = lambda;
    q.backlog.reserve(e.paths * (e.horizon - warmup));
    double sum_c = 0.0;
    for (std::size_t p = 0; p < e.paths; ++p) {
        double b = 0.0;
        for (std::size_t t = 1; t <= e.horizon; ++t) {
            const double c = e.increment(p, t);
            sum_c += c;
            b = std::max(b + lambda - c, 0.0);
            if (t > warmup)
                q.backlog.push_back(b);
        }
    }
    q.unstable = sum_c / static_cast<double>(e.paths * e.horizon) <= lambda;
    q.delay.resize(q.backlog.size(), 0.0);
    if (lambda > 0.0)
        for (std::size_t k = 0; k < q.backlog.size(); ++k)
            q.delay[k] = q.backlog[k] / lambda;
    return q;
}

/// Empirical P(X >= x) with a DKW band of half-width
/// inflation * sqrt(log(2 / delta) / (2 n)).
struct EmpiricalTail {
    Vector grid;
    Vector ccdf;
    Vector lo;
    Vector hi;
    std::vector<std::size_t> exceedances;
    std::size_t samples = 0;
    double half_width = 0.0;
};

inline double dkw_half_width(std::size_t n, double delta, double inflation = 1.0)
{
    return inflation * std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(n)));
}

inline EmpiricalTail empirical_tail(std::span<const double> samples, std::span<const double> grid, double delta = 0.05,
                                    double inflation = 1.0)
{
    require(!samples.empty(), Errc::empty_sample, "no samples");
    require(delta > 0.0 && delta < 1.0, Errc::invalid_argument, "delta must lie in (0, 1)");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    EmpiricalTail t;
    t.samples = s.size();
    t.half_width = dkw_half_width(s.size(), delta, inflation);
    const double n = static_cast<double>(s.size());
    for (double x : grid) {
        const auto above = static_cast<std::size_t>(s.end() - std::lower_bound(s.begin(), s.end(), x));
        const double f = static_cast<double>(above) / n;
        t.grid.push_back(x);
        t.ccdf.push_back(f);
        t.lo.push_back(std::max(0.0, f - t.half_width));
        t.hi.push_back(std::min(1.0, f + t.half_width));
        t.exceedances.push_back(above);
    }
    return t;
}

struct ValidationReport {
    std::size_t points_checked = 0;
    std::size_t violations = 0;
    double max_violation = 0.0; // largest gap between the empirical band and the analytic band
    std::vector<std::size_t> violating_points;
};

/// Grid points whose empirical band misses [lower, upper]; only points with at
/// least `min_exceedances` samples at or above them count.
inline ValidationReport validate_bounds(const EmpiricalTail &emp, const TailBoundCurve &curve,
                                        std::size_t min_exceedances = 100)
{
    require(emp.grid.size() == curve.axis.size(), Errc::dimension_mismatch, "grids differ");
    ValidationReport r;
    for (std::size_t k = 0; k < emp.grid.size(); ++k) {
        require(std::abs(emp.grid[k] - curve.axis[k]) <= 1e-12 * std::max(1.0, std::abs(emp.grid[k])),
                Errc::dimension_mismatch, "grids differ");
        if (emp.exceedances[k] < min_exceedances)
            continue;
        ++r.points_checked;
        const double gap = std::max(curve.lower[k] - emp.hi[k], emp.lo[k] - curve.upper[k]);
        if (gap > 0.0) {
            ++r.violations;
            r.violating_points.push_back(k);
            r.max_violation = std::max(r.max_violation, gap);
        }
    }
    return r;
}

/// Least-squares decay rate of log P(X >= x) over grid points with x > 0 and
/// at least `min_exceedances` samples.
inline double tail_slope(const EmpiricalTail &emp, std::size_t min_exceedances = 100)
{
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < emp.grid.size(); ++k) {
        if (emp.grid[k] <= 0.0 || emp.exceedances[k] < min_exceedances)
            continue;
        const double x = emp.grid[k], y = std::log(emp.ccdf[k]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    require(n >= 2, Errc::empty_sample, "too few tail points for a slope");
    const double dn = static_cast<double>(n);
    return -(dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

/// Per-time summary of S(t)/t: mean and the q, 1 - q empirical quantiles.
struct PathSummaryRow {
    std::size_t t;
    double mean;
    double q_low;
    double q_high;
};

inline std::vector<PathSummaryRow> path_summary(const PathEnsemble &e, std::span<const std::size_t> times, double q)
{
    std::vector<PathSummaryRow> rows;
    std::vector<double> v(e.paths);
    for (std::size_t t : times) {
        require(t >= 1 && t <= e.horizon, Errc::invalid_argument, "summary time outside the horizon");
        double m = 0.0;
        for (std::size_t p = 0; p < e.paths; ++p)
            m += (v[p] = e.total(p, t) / static_cast<double>(t));
        std::sort(v.begin(), v.end());
        auto at = [&](double level) {
            const auto k = static_cast<std::size_t>(std::floor(level * static_cast<double>(e.paths - 1) + 0.5));
            return v[std::min(k, e.paths - 1)];
        };
        rows.push_back({t, m / static_cast<double>(e.paths), at(q), at(1.0 - q)});
    }
    return rows;
}

/// Paths whose S(t)/t lies outside [lo, hi].
inline std::size_t envelope_violations(const PathEnsemble &e, std::size_t t, double lo, double hi)
{
    std::size_t n = 0;
    for (std::size_t p = 0; p < e.paths; ++p) {
        const double c = e.total(p, t) / static_cast<double>(t);
        if (c < lo || c > hi)
            ++n;
    }
    return n;
}

struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
};

/// Pooled lag-1 autocorrelation of C(t) after `skip` slots; the standard
/// error comes from batch means over `batches` groups of paths.
inline Estimate lag1_autocorrelation(const PathEnsemble &e, std::size_t skip = 0, std::size_t batches = 20)
{
    require(e.horizon > skip + 2, Errc::invalid_argument, "horizon too short for lag-1 statistics");
    batches = std::clamp<std::size_t>(batches, 1, e.paths);
    auto rho_over = [&](std::size_t p0, std::size_t p1) {
        double m = 0.0;
        std::size_t n = 0;
        for (std::size_t p = p0; p < p1; ++p)
            for (std::size_t t = skip + 1; t <= e.horizon; ++t, ++n)
                m += e.increment(p, t);
        m /= static_cast<double>(n);
        double num = 0.0, den = 0.0;
        for (std::size_t p = p0; p < p1; ++p)
            for (std::size_t t = skip + 1; t <= e.horizon; ++t) {
                const double x = e.increment(p, t) - m;
                den += x * x;
                if (t < e.horizon)
                    num += x * (e.increment(p, t + 1) - m);
            }
        return num / den;
    };
    Estimate r;
    r.value = rho_over(0, e.paths);
    if (batches > 1) {
        std::vector<double> b;
        for (std::size_t k = 0; k < batches; ++k)
            b.push_back(rho_over(k * e.paths / batches, (k + 1) * e.paths / batches));
        double m = 0.0, v = 0.0;
        for (double x : b)
            m += x;
        m /= static_cast<double>(batches);
        for (double x : b)
            v += (x - m) * (x - m);
        v /= static_cast<double>(batches - 1);
        r.std_error = std::sqrt(v / static_cast<double>(batches));
    }
    return r;
}

/// Monte-Carlo mean and standard error of
/// L(t) = h(J_t) / h(J_0) exp(theta S(t) - t kappa(theta)) at the given times.
inline std::vector<Estimate> martingale_means(const MarkovAdditiveModel &model, const PathEnsemble &e, double theta,
                                              std::span<const std::size_t> times)
{
    require(model.homogeneous(), Errc::unsupported, "martingale check needs a homogeneous model");
    const SpectralResult s = spectral(model, theta);
    std::vector<Estimate> out;
    for (std::size_t t : times) {
        require(t <= e.horizon, Errc::invalid_argument, "time beyond horizon");
        double m = 0.0, m2 = 0.0;
        for (std::size_t p = 0; p < e.paths; ++p) {
            const double l = s.h[e.state(p, t)] / s.h[e.state(p, 0)] *
                             std::exp(theta * e.total(p, t) - static_cast<double>(t) * s.kappa);
            m += l;
            m2 += l * l;
        }
        const double n = static_cast<double>(e.paths);
        m /= n;
        const double var = std::max(m2 / n - m * m, 0.0) * n / std::max(n - 1.0, 1.0);
        out.push_back({m, std::sqrt(var / n)});
    }
    return out;
}

} // namespace depcap

#endif
