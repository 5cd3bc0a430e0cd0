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

#ifndef DEPCAP_NORMAL_HPP
#define DEPCAP_NORMAL_HPP

#include "error.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

namespace depcap::normal {

inline constexpr double inv_sqrt2 = 0.70710678118654752440;
inline constexpr double inv_sqrt2pi = 0.39894228040143267794;

inline double pdf(double z) noexcept { return inv_sqrt2pi * std::exp(-0.5 * z * z); }

/// Standard normal CDF.
inline double cdf(double z) noexcept { return 0.5 * std::erfc(-z * inv_sqrt2); }

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against erfc, which brings it to full double precision.
inline double quantile(double p) noexcept
{
    if (!(p > 0.0))
        return p == 0.0 ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();
    if (!(p < 1.0))
        return p == 1.0 ? std::numeric_limits<double>::infinity() : std::numeric_limits<double>::quiet_NaN();

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                   1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                   6.680131188771972e+01,  -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                   -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                   3.754408661907416e+00};
    constexpr double plow = 0.02425, phigh = 1.0 - plow;

    double x;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= phigh) {
        const double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement; work in the tail that keeps the residual well conditioned.
    const double e = (x < 0.0) ? cdf(x) - p : (1.0 - p) - cdf(-x);
    const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
    return x - u / (1.0 + 0.5 * x * u);
}

/// P(X <= a, Y <= b) for a standard bivariate normal with correlation rho,
/// computed as the integral of the conditional CDF against the X density.
inline double bivariate_cdf(double a, double b, double rho)
{
    require(rho >= -1.0 && rho <= 1.0, Errc::invalid_argument, "correlation outside [-1, 1]");
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (a == -inf || b == -inf)
        return 0.0;
    if (a == inf)
        return cdf(b);
    if (b == inf)
        return cdf(a);
    if (rho == 1.0)
        return cdf(std::min(a, b));
    if (rho == -1.0)
        return std::max(cdf(a) - cdf(-b), 0.0);
    if (rho == 0.0)
        return cdf(a) * cdf(b);

    const double s = std::sqrt((1.0 - rho) * (1.0 + rho));
    const double lower = a > -7.0 ? -8.5 : a - 30.0 / std::abs(a);
    const double width = std::min(0.5, 2.0 * s / std::abs(rho));
    const auto panels = static_cast<std::size_t>(std::ceil((a - lower) / width));
    auto integrand = [&](double z) { return pdf(z) * cdf((b - rho * z) / s); };
    const double v = quad::integrate_composite(integrand, lower, a, std::max<std::size_t>(panels, 1), 16);
    return std::clamp(v, 0.0, std::min(cdf(a), cdf(b)));
}

/// Multivariate normal CDF P(X <= b) with correlation matrix `corr`.
/// Coordinates at +inf are marginalised out exactly; dimensions above two
/// use separation of variables with a randomly shifted lattice rule.
inline double multivariate_cdf(const std::vector<double> &b, const Matrix &corr, std::size_t points = 8192,
                               std::size_t shifts = 12)
{
    require(corr.square() && corr.rows() == b.size(), Errc::dimension_mismatch, "MVN limits vs correlation");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (b[i] == -inf)
            return 0.0;
        if (b[i] != inf)
            keep.push_back(i);
    }
    const std::size_t d = keep.size();
    if (d == 0)
        return 1.0;
    if (d == 1)
        return cdf(b[keep[0]]);
    if (d == 2)
        return bivariate_cdf(b[keep[0]], b[keep[1]], std::clamp(corr(keep[0], keep[1]), -1.0, 1.0));

    Matrix sub(d, d);
    std::vector<double> lim(d);
    for (std::size_t i = 0; i < d; ++i) {
        lim[i] = b[keep[i]];
        for (std::size_t j = 0; j < d; ++j)
            sub(i, j) = corr(keep[i], keep[j]);
    }
    Matrix l;
    require(cholesky_psd(sub, l), Errc::not_psd, "correlation matrix is not positive semi-definite");

    static constexpr double primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47};
    require(d - 1 <= std::size(primes), Errc::unsupported, "MVN dimension too large");
    std::vector<double> gen(d - 1);
    for (std::size_t j = 0; j + 1 < d; ++j)
        gen[j] = std::sqrt(primes[j]);

    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> shift(d - 1), y(d);
    double total = 0.0;
    for (std::size_t m = 0; m < shifts; ++m) {
        for (auto &s : shift)
            s = unif(rng);
        double acc = 0.0;
        for (std::size_t k = 1; k <= points; ++k) {
            double f = 1.0;
            for (std::size_t i = 0; i < d; ++i) {
                double t = lim[i];
                for (std::size_t j = 0; j < i; ++j)
                    t -= l(i, j) * y[j];
                double e;
                if (l(i, i) > 1e-14)
                    e = cdf(t / l(i, i));
                else
                    e = t >= 0.0 ? 1.0 : 0.0;
                f *= e;
                if (f == 0.0)
                    break;
                if (i + 1 < d) {
                    double w = std::fmod(k * gen[i] + shift[i], 1.0);
                    w = 1.0 - std::abs(2.0 * w - 1.0); // baker's transform
                    y[i] = quantile(std::clamp(w * e, 1e-300, 1.0 - 1e-16));
                }
            }
            acc += f;
        }
        total += acc / static_cast<double>(points);
    }
    return std::clamp(total / static_cast<double>(shifts), 0.0, 1.0);
}

} // namespace depcap::normal

#endif
