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

#ifndef DEPCAP_BOUNDS_HPP
#define DEPCAP_BOUNDS_HPP

#include "error.hpp"
#include "markov.hpp"
#include "model.hpp"
#include "quadrature.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace depcap {

/// Lower/upper bounds on a distribution function or tail over a grid.
struct TailBoundCurve {
    std::string quantity; // "cumulative_cdf", "delay_ccdf", "backlog_ccdf"
    Vector axis;
    Vector lower;
    Vector upper;
    Vector theta;              // exponent used per point (upper bound's for cumulative curves)
    std::vector<bool> clamped; // some side left [0, 1] and was clamped
};

namespace detail {

inline double clamp01(double x, bool &flag)
{
    if (x < 0.0 || x > 1.0 || std::isnan(x)) {
        flag = true;
        return std::isnan(x) ? 1.0 : std::clamp(x, 0.0, 1.0);
    }
    return x;
}

// log( sum_i w_i h_i / min_j h_j ) and the max_j variant.
inline double log_prefactor(const MarginalDistribution &w, const Vector &h, bool use_max = false)
{
    const double mix = dot(w.probs(), h);
    const double ref = use_max ? *std::max_element(h.begin(), h.end()) : *std::min_element(h.begin(), h.end());
    return std::log(mix) - std::log(ref);
}

// Minimizes f over theta > 0 by golden section in log(theta * mean capacity)
// on [1e-8, 1e3]; evaluation failures count as +inf.
template <class F>
quad::Minimum minimize_theta(F &&f, double unit)
{
    auto g = [&](double s) {
        try {
            const double v = f(std::exp(s) * unit);
            return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
        } catch (const Error &) {
            return std::numeric_limits<double>::infinity();
        }
    };
    const auto m = quad::golden_section(g, std::log(1e-8), std::log(1e3), 1e-9);
    return {std::exp(m.x) * unit, m.value};
}

inline void check_start(const MarkovAdditiveModel &model, const MarginalDistribution &w)
{
    require(w.size() == model.size(), Errc::dimension_mismatch, "initial distribution does not match states");
}

} // namespace detail

/// Two-sided bounds on P(S(t) <= x) given J_0 ~ w:
///   lower 1 - pref(theta) exp(t kappa(theta) - theta x),
///   upper pref(-theta) exp(t kappa(-theta) + theta x),
/// pref(theta) = sum_i w_i h_i / min_j h_j, each optimized over theta > 0.
inline TailBoundCurve cumulative_capacity_bounds(const MarkovAdditiveModel &model, const MarginalDistribution &w,
                                                 std::size_t t, std::span<const double> x_grid)
{
    detail::check_start(model, w);
    require(t >= 1, Errc::invalid_argument, "horizon must be at least one slot");
    const double unit = 1.0 / std::max(model.mean_increment(), 1e-300);
    const double dt = static_cast<double>(t);
    TailBoundCurve c;
    c.quantity = "cumulative_cdf";
    for (double x : x_grid) {
        auto tail_above = [&](double th) {
            const auto s = spectral(model, th);
            return detail::log_prefactor(w, s.h) + dt * s.kappa - th * x;
        };
        auto tail_below = [&](double th) {
            const auto s = spectral(model, -th);
            return detail::log_prefactor(w, s.h) + dt * s.kappa + th * x;
        };
        const auto lo = detail::minimize_theta(tail_above, unit);
        const auto hi = detail::minimize_theta(tail_below, unit);
        bool flag = false;
        const double lower = detail::clamp01(1.0 - std::exp(lo.value), flag);
        const double upper = detail::clamp01(std::exp(hi.value), flag);
        c.axis.push_back(x);
        c.lower.push_back(lower);
        c.upper.push_back(upper);
        c.theta.push_back(hi.x);
        c.clamped.push_back(flag);
    }
    return c;
}

/// epsilon-envelope of the transient capacity S(t)/t: with probability at
/// least 1 - epsilon on each side, c_lower <= S(t)/t <= c_upper, where
/// c = (t kappa(theta) + y) / (theta t), y = log(pref(theta) / epsilon).
struct TransientEnvelope {
    double c_lower = 0.0;
    double c_upper = 0.0;
    double theta_lower = 0.0; // negative
    double theta_upper = 0.0; // positive
    bool trivial_lower = false; // bound fell to or below zero and was clamped
};

inline TransientEnvelope transient_capacity_bounds(const MarkovAdditiveModel &model, const MarginalDistribution &w,
                                                   std::size_t t, double epsilon)
{
    detail::check_start(model, w);
    require(t >= 1, Errc::invalid_argument, "horizon must be at least one slot");
    require(epsilon > 0.0 && epsilon <= 1.0, Errc::invalid_argument, "epsilon must lie in (0, 1]");
    const double unit = 1.0 / std::max(model.mean_increment(), 1e-300);
    const double dt = static_cast<double>(t);
    auto envelope = [&](double th) {
        const auto s = spectral(model, th);
        const double y = detail::log_prefactor(w, s.h) - std::log(epsilon);
        return (dt * s.kappa + y) / (th * dt);
    };
    const auto up = detail::minimize_theta(envelope, unit);
    const auto dn = detail::minimize_theta([&](double th) { return -envelope(-th); }, unit);
    TransientEnvelope e;
    e.c_upper = up.value;
    e.theta_upper = up.x;
    e.c_lower = -dn.value;
    e.theta_lower = -dn.x;
    if (!(e.c_lower > 0.0)) {
        e.c_lower = 0.0;
        e.trivial_lower = true;
    }
    return e;
}

struct DelayBoundOptions {
    // Also charge the worst-case overshoot (one slot of arrivals) against the
    // lower bound; the printed form omits it.
    bool overshoot_adjusted_lower = false;
};

/// Band on P(D >= d) for the stationary virtual delay started from w:
///   sum_i w_i h_i e^{-theta* lambda d} / max_j h_j <= P <= ... / min_j h_j,
/// with h the right Perron vector at the adjustment coefficient.
inline TailBoundCurve delay_tail_bound(const MarkovAdditiveModel &model, double lambda, const MarginalDistribution &w,
                                       std::span<const double> d_grid, const DelayBoundOptions &opt = {})
{
    detail::check_start(model, w);
    const AdjustmentResult adj = adjustment_coefficient(model, lambda);
    const Vector &h = adj.at_root.h;
    const double lp_min = detail::log_prefactor(w, h, false), lp_max = detail::log_prefactor(w, h, true);
    const double rate = adj.theta_star * lambda;
    TailBoundCurve c;
    c.quantity = "delay_ccdf";
    for (double d : d_grid) {
        require(d >= 0.0, Errc::invalid_argument, "delay must be nonnegative");
        double lo_exp = lp_max - rate * d;
        if (opt.overshoot_adjusted_lower)
            lo_exp -= rate;
        bool flag = false;
        const double lower = detail::clamp01(std::exp(lo_exp), flag);
        const double upper = detail::clamp01(std::exp(lp_min - rate * d), flag);
        c.axis.push_back(d);
        c.lower.push_back(lower);
        c.upper.push_back(upper);
        c.theta.push_back(adj.theta_star);
        c.clamped.push_back(flag);
    }
    return c;
}

/// P(B >= b) = P(D >= b / lambda).
inline TailBoundCurve backlog_tail_bound(const MarkovAdditiveModel &model, double lambda, const MarginalDistribution &w,
                                         std::span<const double> b_grid, const DelayBoundOptions &opt = {})
{
    require(lambda > 0.0, Errc::invalid_argument, "backlog bound needs a positive arrival rate");
    Vector d(b_grid.begin(), b_grid.end());
    for (double &x : d)
        x /= lambda;
    TailBoundCurve c = delay_tail_bound(model, lambda, w, d, opt);
    c.quantity = "backlog_ccdf";
    c.axis.assign(b_grid.begin(), b_grid.end());
    return c;
}

/// Rates whose delay band at d hits epsilon. lambda_lower is where the
/// upper bound equals epsilon (a guaranteed rate); lambda_upper is where the
/// lower bound does (no larger rate can meet the target).
struct DelayConstrainedCapacity {
    double lambda_lower = 0.0;
    double lambda_upper = 0.0;
    double residual_lower = 0.0; // |upper bound(d; lambda_lower) - epsilon|
    double residual_upper = 0.0; // |lower bound(d; lambda_upper) - epsilon|
};

inline DelayConstrainedCapacity delay_constrained_capacity(const MarkovAdditiveModel &model, double d, double epsilon,
                                                           const MarginalDistribution &w)
{
    detail::check_start(model, w);
    require(d > 0.0, Errc::invalid_argument, "delay target must be positive");
    require(epsilon > 0.0 && epsilon < 1.0, Errc::invalid_argument, "epsilon must lie in (0, 1)");
    const double mean = model.mean_increment();

    // log of the chosen unclamped bound at (lambda, d); -inf when delay is identically zero.
    auto log_bound = [&](double lambda, bool upper) {
        try {
            const AdjustmentResult adj = adjustment_coefficient(model, lambda);
            return detail::log_prefactor(w, adj.at_root.h, !upper) - adj.theta_star * lambda * d;
        } catch (const Error &e) {
            if (e.code() == Errc::no_root)
                return -std::numeric_limits<double>::infinity();
            throw;
        }
    };
    const double target = std::log(epsilon);
    auto solve = [&](bool upper) {
        const double hi = mean * (1.0 - 1e-6);
        require(log_bound(hi, upper) > target, Errc::no_feasible_rate, "epsilon is met even at the stability limit");
        double lo = 0.5 * mean;
        for (int k = 0; log_bound(lo, upper) >= target; ++k) {
            require(k < 60, Errc::no_feasible_rate, "epsilon unreachable even as the rate goes to zero");
            lo *= 0.5;
        }
        return quad::bisect([&](double l) { return log_bound(l, upper) - target; }, lo, hi, 1e-14);
    };
    DelayConstrainedCapacity r;
    r.lambda_lower = solve(true);
    r.lambda_upper = solve(false);
    r.residual_lower = std::abs(std::exp(log_bound(r.lambda_lower, true)) - epsilon);
    r.residual_upper = std::abs(std::exp(log_bound(r.lambda_upper, false)) - epsilon);
    return r;
}

} // namespace depcap

#endif
