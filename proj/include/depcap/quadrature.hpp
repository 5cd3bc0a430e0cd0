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

#ifndef DEPCAP_QUADRATURE_HPP
#define DEPCAP_QUADRATURE_HPP

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <utility>
#include <limits>
#include <vector>

namespace depcap::quad {

struct Rule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline Rule make_gauss_legendre(std::size_t n)
{
    Rule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const std::size_t m = (n + 1) / 2;
    for (std::size_t i = 0; i < m; ++i) {
        double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15)
                break;
        }
        r.nodes[i] = -z;
        r.nodes[n - 1 - i] = z;
        r.weights[i] = r.weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
    return r;
}

// Eigenvalues of a symmetric tridiagonal matrix (implicit QL with Wilkinson
// shifts). d holds the diagonal, e[1..n-1] the subdiagonal; d is overwritten.
inline void tridiagonal_eigenvalues(std::vector<double> &d, std::vector<double> e)
{
    const std::size_t n = d.size();
    for (std::size_t i = 1; i < n; ++i)
        e[i - 1] = e[i];
    if (n)
        e[n - 1] = 0.0;
    for (std::size_t l = 0; l < n; ++l) {
        for (int iter = 0;; ++iter) {
            std::size_t m = l;
            for (; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd)
                    break;
            }
            if (m == l)
                break;
            require(iter < 60, Errc::non_convergence, "tridiagonal eigenvalue iteration");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double sn = 1.0, c = 1.0, p = 0.0;
            std::size_t i = m;
            bool underflow = false;
            while (i-- > l) {
                double f = sn * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                sn = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * sn + 2.0 * c * b;
                p = sn * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow)
                continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    std::sort(d.begin(), d.end());
}

// Nodes start from the Jacobi-matrix eigenvalues and are polished by Newton
// on the three-term recurrence, which is rescaled on the fly so that n in the
// thousands does not overflow. Weights come from the recurrence rather than
// eigenvectors so tiny far-node weights keep their relative accuracy.
inline Rule make_gauss_laguerre(std::size_t n)
{
    Rule r;
    r.nodes.assign(n, 0.0);
    r.weights.assign(n, 0.0);
    const double dn = static_cast<double>(n);
    std::vector<double> diag(n), off(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        diag[k] = 2.0 * static_cast<double>(k) + 1.0;
        off[k] = static_cast<double>(k);
    }
    tridiagonal_eigenvalues(diag, off);
    struct Eval {
        double ln, ln1, lnm1; // scaled L_{n-1}, L_n, L_{n+1}
        double log_scale;
    };
    auto eval = [n](double z) {
        double p1 = 1.0, p2 = 0.0, log_scale = 0.0;
        double pn1 = 0.0, pn = 0.0;
        for (std::size_t j = 0; j <= n; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
            if (j + 1 == n) {
                pn1 = p2;
                pn = p1;
            }
            if (std::abs(p1) > 1e150) {
                p1 *= 1e-150;
                p2 *= 1e-150;
                pn1 *= 1e-150;
                pn *= 1e-150;
                log_scale += 150.0 * std::numbers::ln10;
            }
        }
        return Eval{pn1, pn, p1, log_scale};
    };
    for (std::size_t i = 0; i < n; ++i) {
        double z = diag[i], step = 0.0;
        for (int it = 0; it < 50; ++it) {
            const Eval e = eval(z);
            // z L_n' = n (L_n - L_{n-1})
            const double deriv = dn * (e.ln1 - e.ln) / z;
            step = e.ln1 / deriv;
            z -= step;
            if (std::abs(step) <= 2e-16 * std::abs(z))
                break;
        }
        require(std::abs(step) <= 1e-12 * std::max(1.0, z), Errc::non_convergence, "Gauss-Laguerre node iteration");
        // Christoffel function: w = 1 / sum_k L_k(z)^2 (orthonormal under e^{-z}).
        double p1 = 1.0, p2 = 0.0, sum = 0.0, log_scale = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sum += p1 * p1;
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0 - z) * p2 - j * p3) / (j + 1.0);
            if (std::abs(p1) > 1e150) {
                p1 *= 1e-150;
                p2 *= 1e-150;
                sum *= 1e-300;
                log_scale += 300.0 * std::numbers::ln10;
            }
        }
        r.nodes[i] = z;
        r.weights[i] = std::exp(-std::log(sum) - log_scale);
    }
    return r;
}

// One cache per rule family (the tag keeps Legendre and Laguerre apart).
template <class Tag, class Factory>
const Rule &cached_rule(std::size_t n, Factory make)
{
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<Rule>> cache;
    std::lock_guard lock(mu);
    auto &slot = cache[n];
    if (!slot)
        slot = std::make_unique<Rule>(make(n));
    return *slot;
}

} // namespace detail

/// Gauss-Legendre rule on [-1, 1].
inline const Rule &gauss_legendre(std::size_t n)
{
    require(n >= 1, Errc::invalid_argument, "Gauss-Legendre needs n >= 1");
    struct LegendreTag;
    return detail::cached_rule<LegendreTag>(n, detail::make_gauss_legendre);
}

/// Gauss-Laguerre rule for \int_0^inf f(z) e^{-z} dz.
inline const Rule &gauss_laguerre(std::size_t n)
{
    require(n >= 2, Errc::invalid_argument, "Gauss-Laguerre needs n >= 2");
    struct LaguerreTag;
    return detail::cached_rule<LaguerreTag>(n, detail::make_gauss_laguerre);
}

/// \int_a^b f using an n-point Gauss-Legendre rule.
template <class F>
double integrate(F &&f, double a, double b, std::size_t n = 32)
{
    const Rule &r = gauss_legendre(n);
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        s += r.weights[k] * f(mid + half * r.nodes[k]);
    return s * half;
}

/// Composite rule: [a, b] split into `panels` equal pieces.
template <class F>
double integrate_composite(F &&f, double a, double b, std::size_t panels, std::size_t n = 16)
{
    const double h = (b - a) / static_cast<double>(panels);
    double s = 0.0;
    for (std::size_t p = 0; p < panels; ++p)
        s += integrate(f, a + p * h, a + (p + 1) * h, n);
    return s;
}

struct Minimum {
    double x;
    double value;
};

/// Golden-section search for the minimum of a unimodal f on [a, b].
template <class F>
Minimum golden_section(F &&f, double a, double b, double rel_tol = 1e-10, int max_iter = 200)
{
    constexpr double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > rel_tol * (std::abs(a) + std::abs(b)) + 1e-300; ++it) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

/// Bisection for a sign change of f on [lo, hi]; f(lo) and f(hi) must differ in sign.
template <class F>
double bisect(F &&f, double lo, double hi, double rel_tol = 1e-12, int max_iter = 400)
{
    double flo = f(lo);
    const double fhi = f(hi);
    require((flo <= 0.0) != (fhi <= 0.0), Errc::invalid_argument, "bisection bracket has no sign change");
    for (int it = 0; it < max_iter; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (hi - lo <= rel_tol * std::abs(mid))
            return mid;
        const double fm = f(mid);
        if ((fm <= 0.0) == (flo <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace depcap::quad

#endif
