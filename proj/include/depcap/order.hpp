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

#ifndef DEPCAP_ORDER_HPP
#define DEPCAP_ORDER_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "error.hpp"
#include "markov.hpp"
#include "model.hpp"
#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace depcap {

struct EnumerationOptions {
    std::size_t quantile_points = 64; // atoms per continuous law
    double lattice_step = 0.0;        // 0 picks largest atom / 4096
    std::size_t max_paths = 1000000;
};

/// Probability mass on the arithmetic lattice {(offset + k) * step}.
struct LatticePmf {
    std::int64_t offset = 0;
    std::vector<double> mass;
};

namespace detail {

struct Atom {
    double x;
    double p;
};

inline std::vector<Atom> discretize(const IncrementLaw &law, std::size_t points)
{
    std::vector<Atom> out;
    if (const auto *d = std::get_if<Deterministic>(&law)) {
        out.push_back({d->value, 1.0});
    } else if (const auto *f = std::get_if<DiscretePmf>(&law)) {
        for (std::size_t k = 0; k < f->support.size(); ++k)
            out.push_back({f->support[k], f->probs[k]});
    } else {
        const double p = 1.0 / static_cast<double>(points);
        for (std::size_t k = 0; k < points; ++k)
            out.push_back({capacity_quantile(law, (static_cast<double>(k) + 0.5) * p), p});
    }
    return out;
}

inline LatticePmf to_lattice(const std::vector<Atom> &atoms, double step)
{
    std::int64_t lo = INT64_MAX, hi = INT64_MIN;
    std::vector<std::int64_t> idx;
    for (const auto &a : atoms) {
        idx.push_back(std::llround(a.x / step));
        lo = std::min(lo, idx.back());
        hi = std::max(hi, idx.back());
    }
    LatticePmf r{lo, std::vector<double>(static_cast<std::size_t>(hi - lo + 1), 0.0)};
    for (std::size_t k = 0; k < atoms.size(); ++k)
        r.mass[static_cast<std::size_t>(idx[k] - lo)] += atoms[k].p;
    return r;
}

inline LatticePmf convolve(const LatticePmf &a, const LatticePmf &b)
{
    LatticePmf r{a.offset + b.offset, std::vector<double>(a.mass.size() + b.mass.size() - 1, 0.0)};
    for (std::size_t i = 0; i < a.mass.size(); ++i) {
        if (a.mass[i] == 0.0)
            continue;
        for (std::size_t j = 0; j < b.mass.size(); ++j)
            r.mass[i + j] += a.mass[i] * b.mass[j];
    }
    return r;
}

inline void accumulate(LatticePmf &into, const LatticePmf &x, double weight)
{
    if (into.mass.empty()) {
        into.offset = x.offset;
        into.mass.assign(x.mass.size(), 0.0);
    }
    const std::int64_t lo = std::min(into.offset, x.offset);
    const std::int64_t hi = std::max(into.offset + static_cast<std::int64_t>(into.mass.size()),
                                     x.offset + static_cast<std::int64_t>(x.mass.size()));
    if (lo != into.offset || hi != into.offset + static_cast<std::int64_t>(into.mass.size())) {
        std::vector<double> grown(static_cast<std::size_t>(hi - lo), 0.0);
        std::copy(into.mass.begin(), into.mass.end(), grown.begin() + (into.offset - lo));
        into.mass.swap(grown);
        into.offset = lo;
    }
    for (std::size_t k = 0; k < x.mass.size(); ++k)
        into.mass[static_cast<std::size_t>(x.offset - into.offset) + k] += weight * x.mass[k];
}

} // namespace detail

/// Largest atom over the models' discretized laws divided by 4096.
inline double auto_lattice_step(std::span<const MarkovAdditiveModel *const> models, std::size_t quantile_points = 64)
{
    double top = 0.0;
    for (const auto *m : models)
        for (const auto &law : m->laws())
            for (const auto &a : detail::discretize(law, quantile_points))
                top = std::max(top, std::abs(a.x));
    return top > 0.0 ? top / 4096.0 : 1.0;
}

/// Exact law of S(t) = sum of the increments along J_0 .. J_t, J_0 ~ w, after
/// every increment law has been discretized onto a common lattice. Paths
/// sharing a transition-count multiset share a convolution.
class PathEnumeration {
public:
    PathEnumeration(const MarkovAdditiveModel &model, const MarginalDistribution &w, std::size_t t,
                    const EnumerationOptions &opt = {})
        : horizon_(t)
    {
        const std::size_t n = model.size();
        require(w.size() == n, Errc::dimension_mismatch, "initial distribution does not match states");
        require(t >= 1, Errc::invalid_argument, "horizon must be at least one slot");
        double count = static_cast<double>(n);
        for (std::size_t k = 0; k < t; ++k)
            count *= static_cast<double>(n);
        require(count <= static_cast<double>(opt.max_paths), Errc::enumeration_too_large, "too many paths to enumerate");
        paths_ = static_cast<std::size_t>(count);

        if (opt.lattice_step > 0.0)
            step_ = opt.lattice_step;
        else {
            const MarkovAdditiveModel *one[] = {&model};
            step_ = auto_lattice_step(one, opt.quantile_points);
        }
        std::vector<LatticePmf> laws;
        for (const auto &law : model.laws())
            laws.push_back(detail::to_lattice(detail::discretize(law, opt.quantile_points), step_));

        // Transition-count multiset -> probability.
        std::map<std::vector<std::uint32_t>, double> groups;
        std::vector<std::size_t> state(t + 1);
        std::vector<std::uint32_t> counts(n * n, 0);
        auto walk = [&](auto &&self, std::size_t k, double prob) -> void {
            if (k == t) {
                groups[counts] += prob;
                return;
            }
            const Matrix &p = model.transition(k);
            for (std::size_t j = 0; j < n; ++j) {
                const double q = p(state[k], j);
                if (q == 0.0)
                    continue;
                state[k + 1] = j;
                ++counts[state[k] * n + j];
                self(self, k + 1, prob * q);
                --counts[state[k] * n + j];
            }
        };
        for (std::size_t i = 0; i < n; ++i) {
            if (w[i] == 0.0)
                continue;
            state[0] = i;
            walk(walk, 0, w[i]);
        }

        std::map<std::pair<std::size_t, std::uint32_t>, LatticePmf> powers;
        auto power = [&](std::size_t law, std::uint32_t c) -> const LatticePmf & {
            auto it = powers.find({law, c});
            if (it != powers.end())
                return it->second;
            LatticePmf r = c == 1 ? laws[law] : detail::convolve(laws[law], powers.at({law, c - 1}));
            return powers.emplace(std::make_pair(law, c), std::move(r)).first->second;
        };
        for (const auto &[cnt, prob] : groups) {
            LatticePmf sum{0, {1.0}};
            for (std::size_t l = 0; l < cnt.size(); ++l) {
                if (!cnt[l])
                    continue;
                for (std::uint32_t c = 1; c < cnt[l]; ++c)
                    power(l, c);
                sum = detail::convolve(sum, power(l, cnt[l]));
            }
            detail::accumulate(law_, sum, prob);
        }
        groups_ = groups.size();
    }

    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t path_count() const noexcept { return paths_; }
    std::size_t group_count() const noexcept { return groups_; }
    double step() const noexcept { return step_; }
    const LatticePmf &law() const noexcept { return law_; }

    double total_probability() const
    {
        double s = 0.0;
        for (double m : law_.mass)
            s += m;
        return s;
    }

    double mean() const
    {
        double s = 0.0;
        for (std::size_t k = 0; k < law_.mass.size(); ++k)
            s += law_.mass[k] * value(k);
        return s;
    }

    double min_value() const { return value(first_nonzero()); }
    double max_value() const { return value(last_nonzero()); }

    /// E[(S(t) - a)^+].
    double stop_loss(double a) const
    {
        double s = 0.0;
        for (std::size_t k = 0; k < law_.mass.size(); ++k) {
            const double x = value(k);
            if (x > a)
                s += law_.mass[k] * (x - a);
        }
        return s;
    }

private:
    double value(std::size_t k) const { return static_cast<double>(law_.offset + static_cast<std::int64_t>(k)) * step_; }
    std::size_t first_nonzero() const
    {
        std::size_t k = 0;
        while (k + 1 < law_.mass.size() && law_.mass[k] == 0.0)
            ++k;
        return k;
    }
    std::size_t last_nonzero() const
    {
        std::size_t k = law_.mass.size() - 1;
        while (k > 0 && law_.mass[k] == 0.0)
            --k;
        return k;
    }

    std::size_t horizon_;
    std::size_t paths_ = 0;
    std::size_t groups_ = 0;
    double step_ = 1.0;
    LatticePmf law_;
};

inline double stop_loss(const PathEnumeration &e, double a) { return e.stop_loss(a); }

inline double stop_loss(const MarkovAdditiveModel &model, const MarginalDistribution &w, std::size_t t, double a,
                        const EnumerationOptions &opt = {})
{
    return PathEnumeration(model, w, t, opt).stop_loss(a);
}

enum class CxVerdict { a_le_b, b_le_a, equal, incomparable };

inline const char *verdict_name(CxVerdict v) noexcept
{
    switch (v) {
    case CxVerdict::a_le_b: return "A<=cxB";
    case CxVerdict::b_le_a: return "B<=cxA";
    case CxVerdict::equal: return "equal";
    case CxVerdict::incomparable: return "incomparable";
    }
    return "?";
}

struct StopLossPoint {
    double a;
    double e_a;
    double e_b;
};

struct CxReport {
    CxVerdict verdict = CxVerdict::equal;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double tolerance = 0.0; // absolute dominance tolerance used
    std::vector<StopLossPoint> evidence;
};

/// `points` evenly spaced levels spanning both supports.
inline Vector stop_loss_grid(const PathEnumeration &a, const PathEnumeration &b, std::size_t points = 50)
{
    const double lo = std::min(a.min_value(), b.min_value()), hi = std::max(a.max_value(), b.max_value());
    Vector g(points);
    for (std::size_t k = 0; k < points; ++k)
        g[k] = points == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    return g;
}

/// Convex-order verdict from stop-loss dominance over `a_grid`. Means must
/// agree to 1e-12 relative; dominance is judged with tolerance `rel_tol`
/// times the larger mean.
inline CxReport cx_compare(const PathEnumeration &a, const PathEnumeration &b, std::span<const double> a_grid,
                           double rel_tol = 1e-9)
{
    require(a.step() == b.step(), Errc::invalid_argument, "enumerations use different lattices");
    CxReport r;
    r.mean_a = a.mean();
    r.mean_b = b.mean();
    const double scale = std::max({std::abs(r.mean_a), std::abs(r.mean_b), a.step()});
    require(std::abs(r.mean_a - r.mean_b) <= 1e-12 * scale, Errc::marginal_mismatch,
            "means differ; only increasing convex order is meaningful");
    r.tolerance = rel_tol * scale;
    bool a_above = false, b_above = false;
    for (double x : a_grid) {
        const StopLossPoint p{x, a.stop_loss(x), b.stop_loss(x)};
        r.evidence.push_back(p);
        if (p.e_a > p.e_b + r.tolerance)
            a_above = true;
        if (p.e_b > p.e_a + r.tolerance)
            b_above = true;
    }
    r.verdict = a_above && b_above ? CxVerdict::incomparable
              : a_above            ? CxVerdict::b_le_a
              : b_above            ? CxVerdict::a_le_b
                                   : CxVerdict::equal;
    return r;
}

inline CxReport cx_compare(const MarkovAdditiveModel &a, const MarginalDistribution &wa, const MarkovAdditiveModel &b,
                           const MarginalDistribution &wb, std::size_t t, std::size_t grid_points = 50,
                           EnumerationOptions opt = {})
{
    if (opt.lattice_step <= 0.0) {
        const MarkovAdditiveModel *both[] = {&a, &b};
        opt.lattice_step = auto_lattice_step(both, opt.quantile_points);
    }
    const PathEnumeration ea(a, wa, t, opt), eb(b, wb, t, opt);
    const Vector grid = stop_loss_grid(ea, eb, grid_points);
    return cx_compare(ea, eb, grid);
}

struct AdjustmentOrderReport {
    double theta_a = 0.0;
    double theta_b = 0.0;
    std::optional<CxVerdict> verdict;
    bool consistent_with_cx = true;
    // sum_i w_i h_i / min_j h_j and / max_j h_j at each root
    double prefactor_min_a = 1.0, prefactor_max_a = 1.0;
    double prefactor_min_b = 1.0, prefactor_max_b = 1.0;
};

/// Adjustment coefficients of two models at the same rate, checked against
/// the ordering implied by a convex-order verdict: A <=cx B => theta_B <= theta_A.
/// Equal or incomparable verdicts at a finite horizon imply nothing.
inline AdjustmentOrderReport adjustment_order_check(const MarkovAdditiveModel &a, const MarginalDistribution &wa,
                                                    const MarkovAdditiveModel &b, const MarginalDistribution &wb,
                                                    double lambda, std::optional<CxVerdict> verdict = std::nullopt,
                                                    double rel_tol = 1e-10)
{
    const AdjustmentResult ra = adjustment_coefficient(a, lambda), rb = adjustment_coefficient(b, lambda);
    AdjustmentOrderReport r;
    r.theta_a = ra.theta_star;
    r.theta_b = rb.theta_star;
    r.verdict = verdict;
    r.prefactor_min_a = std::exp(detail::log_prefactor(wa, ra.at_root.h, false));
    r.prefactor_max_a = std::exp(detail::log_prefactor(wa, ra.at_root.h, true));
    r.prefactor_min_b = std::exp(detail::log_prefactor(wb, rb.at_root.h, false));
    r.prefactor_max_b = std::exp(detail::log_prefactor(wb, rb.at_root.h, true));
    const double slack = rel_tol * std::max(r.theta_a, r.theta_b);
    if (verdict) {
        switch (*verdict) {
        case CxVerdict::a_le_b: r.consistent_with_cx = r.theta_b <= r.theta_a + slack; break;
        case CxVerdict::b_le_a: r.consistent_with_cx = r.theta_a <= r.theta_b + slack; break;
        case CxVerdict::equal:
        case CxVerdict::incomparable: break;
        }
    }
    return r;
}

} // namespace depcap

#endif
