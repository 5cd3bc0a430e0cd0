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

#ifndef DEPCAP_SPECTRAL_HPP
#define DEPCAP_SPECTRAL_HPP

#include "channel.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace depcap {

/// F[theta]_ij = p_ij exp(-theta drift) E[exp(theta C_ij)], stored as
/// scaled * exp(log_scale) with the largest scaled entry equal to 1.
struct KernelMatrix {
    double theta = 0.0;
    double drift = 0.0;
    Matrix scaled;
    double log_scale = 0.0;

    Matrix entries() const
    {
        Matrix m = scaled;
        const double s = std::exp(log_scale);
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = 0; j < m.cols(); ++j)
                m(i, j) *= s;
        return m;
    }
};

inline KernelMatrix build_kernel(const MarkovAdditiveModel &model, double theta, double drift = 0.0)
{
    const Matrix &p = model.steady_transition();
    const std::size_t n = model.size();
    Matrix logk(n, n, -std::numeric_limits<double>::infinity());
    double top = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (p(i, j) > 0.0) {
                logk(i, j) = std::log(p(i, j)) - theta * drift + log_mgf(model.law(i, j), theta);
                top = std::max(top, logk(i, j));
            }
    require(std::isfinite(top), Errc::quadrature_divergence, "kernel entries are not finite");
    KernelMatrix k{theta, drift, Matrix(n, n), top};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            k.scaled(i, j) = std::exp(logk(i, j) - top);
    return k;
}

/// Perron pair of a kernel: F h = e^kappa h, v F = e^kappa v, with pi h = 1
/// and v h = 1.
struct SpectralResult {
    double theta = 0.0;
    double kappa = 0.0;
    Vector h;
    Vector v;
    double residual_right = 0.0; // max |F h - e^kappa h| / max(e^kappa h)
    double residual_left = 0.0;
};

namespace detail {

inline void normalize_max(Vector &x)
{
    const double m = *std::max_element(x.begin(), x.end());
    for (double &e : x)
        e /= m;
}

} // namespace detail

inline SpectralResult perron(const KernelMatrix &kernel, const MarginalDistribution &pi0, double tol = 1e-13,
                             std::size_t max_iter = 1000000)
{
    const Matrix &k = kernel.scaled;
    const std::size_t n = k.rows();
    require(k.square() && pi0.size() == n, Errc::dimension_mismatch, "kernel and distribution sizes differ");
    require(is_irreducible(k), Errc::non_irreducible, "kernel is not irreducible");

    // The unit shift makes the iteration primitive even for periodic chains;
    // repeated squaring then reaches the rank-one limit in a few dozen steps.
    Matrix a = k;
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) += 1.0;
    Matrix b = a;
    for (int s = 0; s < 80; ++s) {
        Matrix b2 = b * b;
        double m = 0.0;
        for (double x : b2.data())
            m = std::max(m, x);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                b2(i, j) /= m;
        const double change = max_abs_diff(b, b2);
        b = std::move(b2);
        if (change < 1e-15)
            break;
    }
    Vector h(n, 0.0), v(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            h[i] += b(i, j);
            v[j] += b(i, j);
        }
    detail::normalize_max(h);
    detail::normalize_max(v);

    bool done = false;
    for (std::size_t it = 0; it < max_iter && !done; ++it) {
        Vector h2 = mat_vec(a, h), v2 = vec_mat(v, a);
        detail::normalize_max(h2);
        detail::normalize_max(v2);
        done = max_abs_diff(h, h2) < tol && max_abs_diff(v, v2) < tol;
        h.swap(h2);
        v.swap(v2);
    }
    require(done, Errc::non_convergence, "Perron power iteration did not converge");
    for (double x : h)
        require(x > 0.0, Errc::non_irreducible, "Perron vector has a zero entry");

    const Vector kh = mat_vec(k, h);
    const double rho = dot(v, kh) / dot(v, h);
    SpectralResult r;
    r.theta = kernel.theta;
    r.kappa = std::log(rho) + kernel.log_scale;
    const double ph = dot(pi0.probs(), h);
    for (double &x : h)
        x /= ph;
    const double vh = dot(v, h);
    for (double &x : v)
        x /= vh;
    const Vector kh2 = mat_vec(k, h), vk = vec_mat(v, k);
    double hmax = 0.0, vmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        r.residual_right = std::max(r.residual_right, std::abs(kh2[i] - rho * h[i]));
        r.residual_left = std::max(r.residual_left, std::abs(vk[i] - rho * v[i]));
        hmax = std::max(hmax, rho * h[i]);
        vmax = std::max(vmax, rho * v[i]);
    }
    r.residual_right /= hmax;
    r.residual_left /= vmax;
    r.h = std::move(h);
    r.v = std::move(v);
    return r;
}

/// Perron pair of the model kernel at theta, normalized against the
/// stationary law of the steady chain.
inline SpectralResult spectral(const MarkovAdditiveModel &model, double theta, double drift = 0.0)
{
    return perron(build_kernel(model, theta, drift), model.stationary());
}

inline double kappa(const MarkovAdditiveModel &model, double theta, double drift = 0.0)
{
    return spectral(model, theta, drift).kappa;
}

inline std::function<double(double)> kappa_function(const MarkovAdditiveModel &model, double drift = 0.0)
{
    return [&model, drift](double theta) { return kappa(model, theta, drift); };
}

/// theta* > 0 solving kappa_{lambda - C}(theta) = 0, i.e. the paper's
/// negative root -theta* of the cumulant of S(t) - lambda t. `at_root` is the
/// Perron pair of that kernel at -theta* (theta field holds -theta*), whose h
/// enters the delay bounds.
struct AdjustmentResult {
    double lambda = 0.0;
    double theta_star = 0.0;
    double kappa_at_root = 0.0;
    SpectralResult at_root;
};

inline AdjustmentResult adjustment_coefficient(const MarkovAdditiveModel &model, double lambda)
{
    require(lambda >= 0.0 && std::isfinite(lambda), Errc::invalid_argument, "arrival rate must be nonnegative");
    const double mean = model.mean_increment();
    require(mean > lambda, Errc::unstable_queue, "mean capacity does not exceed the arrival rate");
    require(model.min_increment() < lambda, Errc::no_root, "capacity never falls below the arrival rate; delay is zero");

    // Search in the normalized variable theta * mean capacity.
    const double unit = 1.0 / mean;
    auto net = [&](double t) { return kappa(model, -t * unit, lambda); };
    double lo = 1e-8, hi = 1.0;
    require(net(lo) < 0.0, Errc::unstable_queue, "net cumulant is not negative near zero");
    while (net(hi) <= 0.0) {
        lo = hi;
        hi *= 2.0;
        require(hi <= 1e3, Errc::no_root, "adjustment coefficient beyond the bracket cap");
    }
    double root = quad::bisect(net, lo, hi, 1e-14);
    AdjustmentResult r;
    r.lambda = lambda;
    r.theta_star = root * unit;
    r.at_root = spectral(model, -r.theta_star, lambda);
    r.kappa_at_root = r.at_root.kappa;
    return r;
}

} // namespace depcap

#endif
