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

#ifndef DEPCAP_COPULA_HPP
#define DEPCAP_COPULA_HPP

#include "error.hpp"
#include "linalg.hpp"
#include "normal.hpp"
#include "quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace depcap {

enum class CopulaFamily { Product, Comonotone, Countermonotone, FrechetMix, Gaussian };

inline const char *family_name(CopulaFamily f) noexcept
{
    switch (f) {
    case CopulaFamily::Product: return "product";
    case CopulaFamily::Comonotone: return "comonotone";
    case CopulaFamily::Countermonotone: return "countermonotone";
    case CopulaFamily::FrechetMix: return "frechet";
    case CopulaFamily::Gaussian: return "gaussian";
    }
    return "?";
}

/// Convex weights on the countermonotone (W), product (P) and comonotone (M) copulas.
struct FrechetWeights {
    double w = 0.0;
    double p = 1.0;
    double m = 0.0;

    friend bool operator==(const FrechetWeights &, const FrechetWeights &) = default;
};

/// Weights of the one-parameter family C_a = a^2(1-a)/2 W + (1-a^2) P + a^2(1+a)/2 M.
inline FrechetWeights frechet_weights_from_alpha(double alpha)
{
    require(alpha >= -1.0 && alpha <= 1.0, Errc::invalid_argument, "Frechet alpha outside [-1, 1]");
    const double a2 = alpha * alpha;
    return {0.5 * a2 * (1.0 - alpha), 1.0 - a2, 0.5 * a2 * (1.0 + alpha)};
}

/// Homogeneous solution of the Frechet semigroup identities at time gap h:
/// W weight e^{-2h}(1-e^{-h})/2, M weight e^{-2h}(1+e^{-h})/2.
inline FrechetWeights frechet_homogeneous(double h)
{
    require(h >= 0.0, Errc::invalid_argument, "time gap must be nonnegative");
    if (std::isinf(h))
        return {0.0, 1.0, 0.0};
    const double e1 = std::exp(-h), e2 = std::exp(-2.0 * h);
    const double w = 0.5 * e2 * (1.0 - e1);
    const double m = 0.5 * e2 * (1.0 + e1);
    return {w, 1.0 - w - m, m};
}

/// Parametric copula. Immutable once built; the factory functions validate
/// all invariants.
class CopulaSpec {
public:
    static CopulaSpec product() { return CopulaSpec(CopulaFamily::Product, {0.0, 1.0, 0.0}); }
    static CopulaSpec comonotone() { return CopulaSpec(CopulaFamily::Comonotone, {0.0, 0.0, 1.0}); }
    static CopulaSpec countermonotone() { return CopulaSpec(CopulaFamily::Countermonotone, {1.0, 0.0, 0.0}); }

    static CopulaSpec frechet(FrechetWeights wt)
    {
        require(wt.w >= 0.0 && wt.p >= -1e-15 && wt.m >= 0.0, Errc::invalid_argument, "negative Frechet weight");
        require(std::abs(wt.w + wt.p + wt.m - 1.0) <= 1e-12, Errc::invalid_argument, "Frechet weights must sum to 1");
        wt.p = std::max(wt.p, 0.0);
        return CopulaSpec(CopulaFamily::FrechetMix, wt);
    }

    static CopulaSpec frechet_alpha(double alpha)
    {
        CopulaSpec c = frechet(frechet_weights_from_alpha(alpha));
        c.alpha_ = alpha;
        return c;
    }

    static CopulaSpec gaussian(double rho) { return gaussian(Matrix{{1.0, rho}, {rho, 1.0}}); }

    static CopulaSpec gaussian(Matrix corr)
    {
        require(corr.square() && corr.rows() >= 2, Errc::dimension_mismatch, "Gaussian correlation must be square, n >= 2");
        for (std::size_t i = 0; i < corr.rows(); ++i) {
            require(std::abs(corr(i, i) - 1.0) <= 1e-12, Errc::invalid_argument, "correlation diagonal must be 1");
            for (std::size_t j = 0; j < i; ++j) {
                require(std::abs(corr(i, j) - corr(j, i)) <= 1e-12, Errc::invalid_argument, "correlation must be symmetric");
                require(std::abs(corr(i, j)) <= 1.0, Errc::invalid_argument, "correlation entry outside [-1, 1]");
            }
        }
        Matrix l;
        require(cholesky_psd(corr, l), Errc::not_psd, "correlation matrix is not positive semi-definite");
        CopulaSpec c(CopulaFamily::Gaussian, {0.0, 1.0, 0.0});
        c.corr_ = std::move(corr);
        return c;
    }

    CopulaFamily family() const noexcept { return family_; }
    std::size_t dimension() const noexcept { return family_ == CopulaFamily::Gaussian ? corr_.rows() : 2; }

    /// Frechet weights for P, M, W and FrechetMix. Gaussian copulas have none.
    std::optional<FrechetWeights> frechet_weights() const
    {
        if (family_ == CopulaFamily::Gaussian)
            return std::nullopt;
        return weights_;
    }
    std::optional<double> alpha() const noexcept { return alpha_; }
    const Matrix &correlation() const noexcept { return corr_; }

    /// Correlation of a bivariate Gaussian copula.
    double rho() const
    {
        require(family_ == CopulaFamily::Gaussian && corr_.rows() == 2, Errc::unsupported, "rho() needs a bivariate Gaussian");
        return corr_(0, 1);
    }

    /// C(u, v) for bivariate copulas.
    double value(double u, double v) const
    {
        require(dimension() == 2, Errc::dimension_mismatch, "bivariate evaluation of a higher-dimensional copula");
        u = std::clamp(u, 0.0, 1.0);
        v = std::clamp(v, 0.0, 1.0);
        if (u == 0.0 || v == 0.0)
            return 0.0;
        if (u == 1.0)
            return v;
        if (v == 1.0)
            return u;
        switch (family_) {
        case CopulaFamily::Gaussian: {
            const double r = corr_(0, 1);
            return normal::bivariate_cdf(normal::quantile(u), normal::quantile(v), r);
        }
        default:
            return weights_.w * std::max(u + v - 1.0, 0.0) + weights_.p * u * v + weights_.m * std::min(u, v);
        }
    }

    /// dC/du_wrt at (u, v): the conditional CDF of the other coordinate.
    /// Kinks (M on the diagonal, W on the anti-diagonal) take the right
    /// derivative; at u_wrt = 1 the left derivative is used.
    double partial(double u, double v, int wrt) const
    {
        require(dimension() == 2, Errc::dimension_mismatch, "partial derivative of a higher-dimensional copula");
        require(wrt == 0 || wrt == 1, Errc::invalid_argument, "partial derivative index must be 0 or 1");
        // All built-in bivariate families are exchangeable.
        const double x = std::clamp(wrt == 0 ? u : v, 0.0, 1.0);
        const double y = std::clamp(wrt == 0 ? v : u, 0.0, 1.0);
        if (family_ == CopulaFamily::Gaussian) {
            if (y == 0.0)
                return 0.0;
            if (y == 1.0)
                return 1.0;
            const double r = corr_(0, 1);
            if (r == 0.0)
                return y;
            const double s = std::sqrt((1.0 - r) * (1.0 + r));
            if (s == 0.0)
                return r > 0.0 ? (x < y ? 1.0 : 0.0) : (x + y >= 1.0 ? 1.0 : 0.0);
            return normal::cdf((normal::quantile(y) - r * normal::quantile(x)) / s);
        }
        const bool right = x < 1.0;
        const double dm = right ? (x < y ? 1.0 : 0.0) : (x <= y ? 1.0 : 0.0);
        const double dw = right ? (x + y - 1.0 >= 0.0 ? 1.0 : 0.0) : (y > 0.0 ? 1.0 : 0.0);
        return weights_.w * dw + weights_.p * y + weights_.m * dm;
    }

    /// True when an argument's partial derivative has an unbounded-slope
    /// endpoint (the Gaussian quantile transform), which needs a change of
    /// variables near 0 and 1 during quadrature.
    bool endpoint_singular() const noexcept { return family_ == CopulaFamily::Gaussian; }

    bool radially_symmetric() const noexcept { return true; }

private:
    CopulaSpec(CopulaFamily f, FrechetWeights w) : family_(f), weights_(w) {}

    CopulaFamily family_;
    FrechetWeights weights_;
    std::optional<double> alpha_;
    Matrix corr_;
};

/// C(u) at a point of [0,1]^d.
inline double eval(const CopulaSpec &c, std::span<const double> u)
{
    require(u.size() == c.dimension(), Errc::dimension_mismatch, "point dimension does not match copula");
    for (double x : u)
        require(x >= 0.0 && x <= 1.0, Errc::invalid_argument, "copula argument outside [0, 1]");
    if (u.size() == 2)
        return c.value(u[0], u[1]);
    std::vector<double> z(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        z[i] = normal::quantile(u[i]);
    return normal::multivariate_cdf(z, c.correlation());
}

inline double partial(const CopulaSpec &c, std::span<const double> u, int wrt)
{
    require(u.size() == 2, Errc::dimension_mismatch, "partial derivatives are bivariate only");
    return c.partial(u[0], u[1], wrt);
}

/// Bivariate Gaussian copula from two coordinates of a larger correlation matrix.
inline CopulaSpec gaussian_block(const CopulaSpec &c, std::size_t i, std::size_t j)
{
    require(c.family() == CopulaFamily::Gaussian, Errc::unsupported, "gaussian_block needs a Gaussian copula");
    require(i < c.dimension() && j < c.dimension() && i != j, Errc::invalid_argument, "bad coordinate pair");
    return CopulaSpec::gaussian(c.correlation()(i, j));
}

/// A bivariate copula sampled on a uniform (n+1)x(n+1) lattice and bilinearly
/// interpolated. Star products of anything produce one of these.
class GridCopula {
public:
    explicit GridCopula(std::size_t intervals = 256) : n_(intervals), values_((intervals + 1) * (intervals + 1), 0.0)
    {
        require(intervals >= 1, Errc::invalid_argument, "grid needs at least one interval");
    }

    template <class C>
    static GridCopula sample(const C &c, std::size_t intervals = 256)
    {
        GridCopula g(intervals);
        for (std::size_t i = 0; i <= intervals; ++i)
            for (std::size_t j = 0; j <= intervals; ++j)
                g.at(i, j) = c.value(g.node(i), g.node(j));
        return g;
    }

    std::size_t intervals() const noexcept { return n_; }
    double node(std::size_t i) const noexcept { return static_cast<double>(i) / static_cast<double>(n_); }

    double &at(std::size_t i, std::size_t j) noexcept { return values_[i * (n_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return values_[i * (n_ + 1) + j]; }

    double value(double u, double v) const
    {
        const auto [i, tu] = locate(u);
        const auto [j, tv] = locate(v);
        return (1 - tu) * (1 - tv) * at(i, j) + tu * (1 - tv) * at(i + 1, j) + (1 - tu) * tv * at(i, j + 1) +
               tu * tv * at(i + 1, j + 1);
    }

    /// Piecewise-constant derivative of the bilinear interpolant; on a cell
    /// boundary the cell to the right is used (left at 1).
    double partial(double u, double v, int wrt) const
    {
        require(wrt == 0 || wrt == 1, Errc::invalid_argument, "partial derivative index must be 0 or 1");
        const auto [i, tu] = locate(u);
        const auto [j, tv] = locate(v);
        const double n = static_cast<double>(n_);
        if (wrt == 0)
            return n * ((1 - tv) * (at(i + 1, j) - at(i, j)) + tv * (at(i + 1, j + 1) - at(i, j + 1)));
        return n * ((1 - tu) * (at(i, j + 1) - at(i, j)) + tu * (at(i + 1, j + 1) - at(i + 1, j)));
    }

    bool endpoint_singular() const noexcept { return false; }

    /// Largest |C(u,v) - (u + v - 1 + C(1-u, 1-v))| over the lattice.
    double radial_asymmetry() const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i <= n_; ++i)
            for (std::size_t j = 0; j <= n_; ++j) {
                const double survival = node(i) + node(j) - 1.0 + at(n_ - i, n_ - j);
                worst = std::max(worst, std::abs(at(i, j) - survival));
            }
        return worst;
    }

    /// Max abs difference against any copula on this lattice.
    template <class C>
    double max_deviation(const C &c) const
    {
        double worst = 0.0;
        for (std::size_t i = 0; i <= n_; ++i)
            for (std::size_t j = 0; j <= n_; ++j)
                worst = std::max(worst, std::abs(at(i, j) - c.value(node(i), node(j))));
        return worst;
    }

private:
    std::pair<std::size_t, double> locate(double u) const
    {
        const double x = std::clamp(u, 0.0, 1.0) * static_cast<double>(n_);
        auto i = static_cast<std::size_t>(std::floor(x));
        if (i >= n_)
            i = n_ - 1;
        return {i, x - static_cast<double>(i)};
    }

    std::size_t n_;
    std::vector<double> values_;
};

template <class C>
concept BivariateCopula = requires(const C &c, double u, double v, int k) {
    { c.value(u, v) } -> std::convertible_to<double>;
    { c.partial(u, v, k) } -> std::convertible_to<double>;
    { c.endpoint_singular() } -> std::convertible_to<bool>;
};

/// Largest violation of the copula axioms on an (n+1)^2 lattice: boundary
/// conditions, 2-increasingness of every cell, Frechet-Hoeffding envelope.
template <BivariateCopula C>
double copula_axiom_violation(const C &c, std::size_t n = 64)
{
    std::vector<double> g((n + 1) * (n + 1));
    auto node = [n](std::size_t i) { return static_cast<double>(i) / static_cast<double>(n); };
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= n; ++j)
            g[i * (n + 1) + j] = c.value(node(i), node(j));
    auto at = [&](std::size_t i, std::size_t j) { return g[i * (n + 1) + j]; };
    double worst = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
        worst = std::max({worst, std::abs(at(i, 0)), std::abs(at(0, i)), std::abs(at(i, n) - node(i)),
                          std::abs(at(n, i) - node(i))});
        for (std::size_t j = 0; j <= n; ++j) {
            const double v = at(i, j);
            const double lo = std::max(node(i) + node(j) - 1.0, 0.0), hi = std::min(node(i), node(j));
            worst = std::max({worst, lo - v, v - hi});
            if (i < n && j < n)
                worst = std::max(worst, -(at(i + 1, j + 1) - at(i + 1, j) - at(i, j + 1) + at(i, j)));
        }
    }
    return worst;
}

struct StarOptions {
    std::size_t grid = 256;          // output lattice intervals; also the quadrature panels
    std::size_t nodes_per_panel = 2; // initial Gauss-Legendre nodes in each panel
    std::size_t max_nodes_per_panel = 128;
    double tolerance = 1e-8;         // successive refinements must agree to this
};

namespace detail {

struct StarNodes {
    std::vector<double> xi;
    std::vector<double> weight;
};

// Panels are the output lattice cells, so every kink of M/W partials at a
// lattice abscissa and every grid-copula cell edge falls on a panel boundary.
// End panels switch to the normal-quantile variable when an operand is singular there.
inline StarNodes star_nodes(std::size_t panels, std::size_t q, bool singular_ends)
{
    StarNodes out;
    const auto &rule = quad::gauss_legendre(q);
    const double h = 1.0 / static_cast<double>(panels);
    constexpr double zcut = 8.5;
    for (std::size_t p = 0; p < panels; ++p) {
        const bool end = p == 0 || p + 1 == panels;
        if (singular_ends && end) {
            const double za = p == 0 ? -zcut : normal::quantile(1.0 - h);
            const double zb = p == 0 ? normal::quantile(h) : zcut;
            const double half = 0.5 * (zb - za), mid = 0.5 * (za + zb);
            for (std::size_t k = 0; k < q; ++k) {
                const double z = mid + half * rule.nodes[k];
                out.xi.push_back(normal::cdf(z));
                out.weight.push_back(rule.weights[k] * half * normal::pdf(z));
            }
        } else {
            const double a = p * h, half = 0.5 * h;
            for (std::size_t k = 0; k < q; ++k) {
                out.xi.push_back(a + half * (1.0 + rule.nodes[k]));
                out.weight.push_back(rule.weights[k] * half);
            }
        }
    }
    return out;
}

template <BivariateCopula A, BivariateCopula B>
GridCopula star_once(const A &a, const B &b, std::size_t grid, const StarNodes &nd)
{
    const std::size_t k = nd.xi.size(), m = grid + 1;
    GridCopula out(grid);
    std::vector<double> lhs(m * k), rhs(k * m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t q = 0; q < k; ++q)
            lhs[i * k + q] = a.partial(out.node(i), nd.xi[q], 1) * nd.weight[q];
    for (std::size_t q = 0; q < k; ++q)
        for (std::size_t j = 0; j < m; ++j)
            rhs[q * m + j] = b.partial(nd.xi[q], out.node(j), 0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t q = 0; q < k; ++q) {
            const double l = lhs[i * k + q];
            if (l == 0.0)
                continue;
            const double *r = &rhs[q * m];
            for (std::size_t j = 0; j < m; ++j)
                out.at(i, j) += l * r[j];
        }
    for (std::size_t i = 0; i < m; ++i) {
        out.at(i, 0) = out.at(0, i) = 0.0;
        out.at(i, grid) = out.at(grid, i) = out.node(i);
    }
    return out;
}

inline double grid_distance(const GridCopula &x, const GridCopula &y)
{
    double worst = 0.0;
    for (std::size_t i = 0; i <= x.intervals(); ++i)
        for (std::size_t j = 0; j <= x.intervals(); ++j)
            worst = std::max(worst, std::abs(x.at(i, j) - y.at(i, j)));
    return worst;
}

} // namespace detail

/// (A * B)(x, y) = \int_0^1 d2 A(x, s) d1 B(s, y) ds on the output lattice.
/// Nodes per panel double until two successive results agree to
/// `opt.tolerance`; failure to agree raises QuadratureDivergence.
template <BivariateCopula A, BivariateCopula B>
GridCopula star_product(const A &a, const B &b, const StarOptions &opt = {})
{
    require(opt.grid >= 2, Errc::invalid_argument, "star product grid too small");
    const bool singular = a.endpoint_singular() || b.endpoint_singular();
    std::size_t q = std::max<std::size_t>(opt.nodes_per_panel, 1);
    GridCopula prev = detail::star_once(a, b, opt.grid, detail::star_nodes(opt.grid, q, singular));
    while (2 * q <= opt.max_nodes_per_panel) {
        q *= 2;
        GridCopula next = detail::star_once(a, b, opt.grid, detail::star_nodes(opt.grid, q, singular));
        if (detail::grid_distance(prev, next) < opt.tolerance)
            return next;
        prev = std::move(next);
    }
    throw Error(Errc::quadrature_divergence, "star product did not converge");
}

/// One (s, u, t) check of a time-indexed copula family.
struct TripleResidual {
    double s = 0.0, u = 0.0, t = 0.0;
    double residual = 0.0;
    bool algebraic = false; // Frechet weight identities rather than a grid comparison
};

struct MarkovFamilyReport {
    std::vector<TripleResidual> triples;
    double max_residual = 0.0;

    bool passes(double tol) const noexcept { return max_residual < tol; }
};

using CopulaFamilyFn = std::function<CopulaSpec(double s, double t)>;

/// Checks C_st = C_su * C_ut for each triple. Frechet families are checked
/// through the weight identities W_st = M_su W_ut + W_su M_ut and
/// M_st = W_su W_ut + M_su M_ut; anything else through grid star products.
inline MarkovFamilyReport markov_family_check(const CopulaFamilyFn &family,
                                              std::span<const std::array<double, 3>> triples,
                                              const StarOptions &opt = {})
{
    MarkovFamilyReport report;
    for (const auto &tr : triples) {
        const double s = tr[0], u = tr[1], t = tr[2];
        require(s < u && u < t, Errc::invalid_argument, "Markov family triple needs s < u < t");
        const CopulaSpec cst = family(s, t), csu = family(s, u), cut = family(u, t);
        TripleResidual r{s, u, t, 0.0, false};
        const auto wst = cst.frechet_weights(), wsu = csu.frechet_weights(), wut = cut.frechet_weights();
        if (wst && wsu && wut) {
            r.algebraic = true;
            const double rw = std::abs(wst->w - (wsu->m * wut->w + wsu->w * wut->m));
            const double rm = std::abs(wst->m - (wsu->w * wut->w + wsu->m * wut->m));
            r.residual = std::max(rw, rm);
        } else {
            const GridCopula composed = star_product(csu, cut, opt);
            r.residual = composed.max_deviation(cst);
        }
        report.max_residual = std::max(report.max_residual, r.residual);
        report.triples.push_back(r);
    }
    return report;
}

/// T(u) = 1 - u, the involution that maps a radially symmetric copula onto
/// its countermonotone partner.
inline std::vector<double> negative_transform(std::span<const double> u, const CopulaSpec &c)
{
    require(u.size() == c.dimension(), Errc::dimension_mismatch, "point dimension does not match copula");
    require(c.radially_symmetric(), Errc::unsupported, "negative transform needs a radially symmetric copula");
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        require(u[i] >= 0.0 && u[i] <= 1.0, Errc::invalid_argument, "point outside [0,1]^n");
        out[i] = 1.0 - u[i];
    }
    return out;
}

inline std::vector<double> negative_transform(std::span<const double> u, const GridCopula &c, double tol = 1e-9)
{
    require(u.size() == 2, Errc::dimension_mismatch, "grid copulas are bivariate");
    require(c.radial_asymmetry() <= tol, Errc::unsupported, "negative transform needs a radially symmetric copula");
    return {1.0 - u[0], 1.0 - u[1]};
}

} // namespace depcap

#endif
