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

#ifndef DEPCAP_CHANNEL_HPP
#define DEPCAP_CHANNEL_HPP

#include "error.hpp"
#include "quadrature.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <span>
#include <type_traits>
#include <variant>
#include <vector>

namespace depcap {

/// W log2(1 + gamma Z) with Z unit exponential (Rayleigh fading power gain).
struct RayleighCapacity {
    double bandwidth = 1.0; // Hz; one slot carries W log2(.) bits
    double snr = 1.0;       // linear mean SNR

    RayleighCapacity() = default;
    RayleighCapacity(double w, double gamma) : bandwidth(w), snr(gamma)
    {
        require(w > 0.0 && std::isfinite(w), Errc::invalid_argument, "bandwidth must be positive");
        require(gamma > 0.0 && std::isfinite(gamma), Errc::invalid_argument, "SNR must be positive");
    }
    friend bool operator==(const RayleighCapacity &, const RayleighCapacity &) = default;
};

struct Deterministic {
    double value = 0.0;
    friend bool operator==(const Deterministic &, const Deterministic &) = default;
};

/// Finite support, sorted ascending with merged duplicates.
struct DiscretePmf {
    std::vector<double> support;
    std::vector<double> probs;

    DiscretePmf() = default;
    DiscretePmf(std::vector<double> x, std::vector<double> p)
    {
        require(!x.empty() && x.size() == p.size(), Errc::invalid_argument, "PMF support and probabilities differ");
        std::vector<std::size_t> order(x.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
        double sum = 0.0;
        for (auto k : order) {
            require(p[k] >= 0.0 && std::isfinite(x[k]), Errc::invalid_argument, "bad PMF atom");
            sum += p[k];
            if (p[k] == 0.0)
                continue;
            if (!support.empty() && support.back() == x[k])
                probs.back() += p[k];
            else {
                support.push_back(x[k]);
                probs.push_back(p[k]);
            }
        }
        require(std::abs(sum - 1.0) <= 1e-12, Errc::invalid_argument, "PMF must sum to 1");
    }
    friend bool operator==(const DiscretePmf &, const DiscretePmf &) = default;
};

using IncrementLaw = std::variant<RayleighCapacity, Deterministic, DiscretePmf>;

namespace detail {

inline double log_sum_exp(std::span<const double> v)
{
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v)
        m = std::max(m, x);
    if (!std::isfinite(m))
        return m;
    double s = 0.0;
    for (double x : v)
        s += std::exp(x - m);
    return m + std::log(s);
}

// log of sum_k w_k exp(g(x_k)) over a Laguerre rule.
template <class G>
double laguerre_log_sum(const quad::Rule &r, G g)
{
    std::vector<double> terms;
    terms.reserve(r.nodes.size());
    for (std::size_t k = 0; k < r.nodes.size(); ++k)
        if (r.weights[k] > 0.0)
            terms.push_back(std::log(r.weights[k]) + g(r.nodes[k]));
    return log_sum_exp(terms);
}

// log E[(1 + gamma Z)^a].
inline double rayleigh_log_moment(double gamma, double a)
{
    if (a == 0.0)
        return 0.0;
    const double b = std::abs(a);
    std::size_t n = 128;
    while (n < 512 && b > 20.0 * static_cast<double>(n) / 128.0)
        n *= 2;
    auto once = [&](std::size_t nodes) {
        const auto &rule = quad::gauss_laguerre(nodes);
        if (a < -1.0 && b * gamma > 1.0) {
            // y = |a| ln(1 + gamma z) keeps the sharp peak at z = 0 resolved.
            const double lg = -std::log(b * gamma);
            return lg + laguerre_log_sum(rule, [&](double y) {
                       const double s = y / b;
                       return s - std::expm1(s) / gamma;
                   });
        }
        return laguerre_log_sum(rule, [&](double z) { return a * std::log1p(gamma * z); });
    };
    double prev = once(n), diff = std::numeric_limits<double>::infinity();
    for (; n < 1024; n *= 2) {
        const double next = once(2 * n);
        diff = std::abs(next - prev);
        prev = next;
        if (diff <= 1e-12 * std::max(1.0, std::abs(next)))
            break;
    }
    require(std::isfinite(prev) && diff <= 1e-9 * std::max(1.0, std::abs(prev)), Errc::quadrature_divergence,
            "capacity MGF quadrature did not settle");
    return prev;
}

// e^x E_1(x) for x > 0.
inline double exp_e1(double x)
{
    if (x <= 1.0)
        return -std::exp(x) * std::expint(-x);
    // Continued fraction (modified Lentz).
    double b = x + 1.0, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16)
            break;
    }
    return h;
}

} // namespace detail

inline double capacity_mean(const IncrementLaw &law)
{
    return std::visit(
        [](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, RayleighCapacity>)
                return l.bandwidth / std::numbers::ln2 * detail::exp_e1(1.0 / l.snr);
            else if constexpr (std::is_same_v<T, Deterministic>)
                return l.value;
            else
                return std::inner_product(l.support.begin(), l.support.end(), l.probs.begin(), 0.0);
        },
        law);
}

/// P(C <= x); 0 for negative x.
inline double capacity_cdf(const IncrementLaw &law, double x)
{
    return std::visit(
        [x](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, RayleighCapacity>) {
                if (!(x > 0.0))
                    return 0.0;
                const double s = std::expm1(x * std::numbers::ln2 / l.bandwidth) / l.snr;
                return -std::expm1(-s);
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return x >= l.value ? 1.0 : 0.0;
            } else {
                double acc = 0.0;
                for (std::size_t k = 0; k < l.support.size() && l.support[k] <= x; ++k)
                    acc += l.probs[k];
                return std::min(acc, 1.0);
            }
        },
        law);
}

/// Smallest x with P(C <= x) >= p.
inline double capacity_quantile(const IncrementLaw &law, double p)
{
    require(p >= 0.0 && p <= 1.0, Errc::invalid_argument, "quantile level outside [0, 1]");
    return std::visit(
        [p](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, RayleighCapacity>) {
                if (p == 1.0)
                    return std::numeric_limits<double>::infinity();
                return l.bandwidth * std::log1p(-l.snr * std::log1p(-p)) / std::numbers::ln2;
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return l.value;
            } else {
                double acc = 0.0;
                for (std::size_t k = 0; k < l.support.size(); ++k) {
                    acc += l.probs[k];
                    if (acc >= p * (1.0 - 1e-15))
                        return l.support[k];
                }
                return l.support.back();
            }
        },
        law);
}

/// One draw by inverse-CDF sampling.
template <class URBG>
double capacity_sample(const IncrementLaw &law, URBG &g)
{
    if (const auto *d = std::get_if<Deterministic>(&law))
        return d->value;
    return capacity_quantile(law, uniform_open(g));
}

/// log E[exp(theta C)].
inline double log_mgf(const IncrementLaw &law, double theta)
{
    return std::visit(
        [theta](const auto &l) -> double {
            using T = std::decay_t<decltype(l)>;
            if constexpr (std::is_same_v<T, RayleighCapacity>) {
                return detail::rayleigh_log_moment(l.snr, theta * l.bandwidth / std::numbers::ln2);
            } else if constexpr (std::is_same_v<T, Deterministic>) {
                return theta * l.value;
            } else {
                std::vector<double> t(l.support.size());
                for (std::size_t k = 0; k < t.size(); ++k)
                    t[k] = std::log(l.probs[k]) + theta * l.support[k];
                return detail::log_sum_exp(t);
            }
        },
        law);
}

inline double transition_mgf(const IncrementLaw &law, double theta) { return std::exp(log_mgf(law, theta)); }

/// Essential infimum and supremum of the law.
inline double support_min(const IncrementLaw &law)
{
    if (const auto *d = std::get_if<Deterministic>(&law))
        return d->value;
    if (const auto *p = std::get_if<DiscretePmf>(&law))
        return p->support.front();
    return 0.0;
}

inline double support_max(const IncrementLaw &law)
{
    if (const auto *d = std::get_if<Deterministic>(&law))
        return d->value;
    if (const auto *p = std::get_if<DiscretePmf>(&law))
        return p->support.back();
    return std::numeric_limits<double>::infinity();
}

} // namespace depcap

#endif
