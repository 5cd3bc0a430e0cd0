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

#ifndef DEPCAP_MARKOV_HPP
#define DEPCAP_MARKOV_HPP

#include "copula.hpp"
#include "error.hpp"
#include "linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace depcap {

/// States with strictly increasing real values and unique labels.
class OrderedStateSpace {
public:
    OrderedStateSpace() = default;

    OrderedStateSpace(std::vector<std::string> labels, std::vector<double> values)
        : labels_(std::move(labels)), values_(std::move(values))
    {
        require(!values_.empty(), Errc::invalid_argument, "state space is empty");
        require(labels_.size() == values_.size(), Errc::dimension_mismatch, "labels and values differ in length");
        for (std::size_t i = 1; i < values_.size(); ++i)
            require(values_[i] > values_[i - 1], Errc::invalid_argument, "state values must be strictly increasing");
        require(std::set<std::string>(labels_.begin(), labels_.end()).size() == labels_.size(), Errc::invalid_argument,
                "state labels must be unique");
    }

    /// States labelled "0", "1", ... with values 0, 1, ...
    static OrderedStateSpace indexed(std::size_t n)
    {
        std::vector<std::string> labels(n);
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = std::to_string(i);
            values[i] = static_cast<double>(i);
        }
        return {std::move(labels), std::move(values)};
    }

    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<std::string> &labels() const noexcept { return labels_; }
    const std::vector<double> &values() const noexcept { return values_; }

    friend bool operator==(const OrderedStateSpace &, const OrderedStateSpace &) = default;

private:
    std::vector<std::string> labels_;
    std::vector<double> values_;
};

/// Probability vector over a state space.
class MarginalDistribution {
public:
    MarginalDistribution() = default;

    explicit MarginalDistribution(Vector p) : p_(std::move(p))
    {
        require(!p_.empty(), Errc::invalid_argument, "marginal is empty");
        double sum = 0.0;
        for (double x : p_) {
            require(x >= 0.0, Errc::invalid_argument, "marginal has a negative entry");
            sum += x;
        }
        require(std::abs(sum - 1.0) <= 1e-12, Errc::invalid_argument, "marginal must sum to 1");
    }

    static MarginalDistribution uniform(std::size_t n) { return MarginalDistribution(Vector(n, 1.0 / static_cast<double>(n))); }

    std::size_t size() const noexcept { return p_.size(); }
    double operator[](std::size_t i) const { return p_[i]; }
    const Vector &probs() const noexcept { return p_; }

    /// Cumulative sums with the last entry pinned to exactly 1.
    Vector cdf() const
    {
        Vector f(p_.size());
        std::partial_sum(p_.begin(), p_.end(), f.begin());
        f.back() = 1.0;
        return f;
    }

private:
    Vector p_;
};

/// Throws unless m is square, entries lie in [0,1] and rows sum to 1 (within tol).
inline void check_stochastic(const Matrix &m, double tol = 1e-12)
{
    require(m.square() && m.rows() > 0, Errc::dimension_mismatch, "transition matrix must be square and nonempty");
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            require(m(i, j) >= -tol && m(i, j) <= 1.0 + tol, Errc::invalid_argument, "transition probability outside [0, 1]");
            sum += m(i, j);
        }
        require(std::abs(sum - 1.0) <= tol, Errc::invalid_argument, "transition matrix row does not sum to 1");
    }
}

/// Transition matrix whose one-step copula is `c` for the given marginals:
/// p_ij = [C(F_i, G_j) - C(F_{i-1}, G_j) - C(F_i, G_{j-1}) + C(F_{i-1}, G_{j-1})] / w_i.
template <BivariateCopula C>
Matrix transition_from_copula(const C &c, const MarginalDistribution &now, const MarginalDistribution &next)
{
    const std::size_t n = now.size(), m = next.size();
    for (std::size_t i = 0; i < n; ++i)
        require(now[i] > 0.0, Errc::zero_mass_state, "current marginal has a zero-mass state");
    for (std::size_t j = 0; j < m; ++j)
        require(next[j] > 0.0, Errc::zero_mass_state, "next marginal has a zero-mass state");
    Vector f(n + 1, 0.0), g(m + 1, 0.0);
    const Vector fc = now.cdf(), gc = next.cdf();
    std::copy(fc.begin(), fc.end(), f.begin() + 1);
    std::copy(gc.begin(), gc.end(), g.begin() + 1);

    Matrix cv(n + 1, m + 1);
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= m; ++j)
            cv(i, j) = c.value(f[i], g[j]);

    Matrix p(n, m);
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            double d = cv(i + 1, j + 1) - cv(i, j + 1) - cv(i + 1, j) + cv(i, j);
            if (d < 0.0) {
                require(d > -1e-10, Errc::infeasible_copula, "copula and marginals admit no stochastic matrix");
                d = 0.0;
            }
            p(i, j) = d;
            row += d;
        }
        require(row > 0.0, Errc::infeasible_copula, "copula assigns no mass to a state row");
        for (std::size_t j = 0; j < m; ++j)
            p(i, j) /= row;
    }
    return p;
}

/// C(F(x), G(y)) rebuilt from w and P at every lattice threshold pair; the
/// (i, j) entry is sum_{s<=i} w_s P(s, <=j).
inline Matrix cumulative_joint(const MarginalDistribution &now, const Matrix &p)
{
    require(p.rows() == now.size(), Errc::dimension_mismatch, "marginal and matrix sizes differ");
    Matrix out(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < p.cols(); ++j) {
            acc += now[i] * p(i, j);
            out(i, j) = (i ? out(i - 1, j) : 0.0) + acc;
        }
    }
    return out;
}

/// w P, renormalized against rounding.
inline MarginalDistribution propagate(const MarginalDistribution &w, const Matrix &p)
{
    Vector next = vec_mat(w.probs(), p);
    const double sum = std::accumulate(next.begin(), next.end(), 0.0);
    for (double &x : next)
        x = std::max(x, 0.0) / sum;
    return MarginalDistribution(std::move(next));
}

/// Stationary distribution of an irreducible chain by power iteration from
/// the uniform vector. The lazy chain (P + I)/2 is iterated so periodic
/// chains converge to the same answer.
inline MarginalDistribution stationary_distribution(const Matrix &p, double tol = 1e-13, std::size_t max_iter = 1000000)
{
    check_stochastic(p, 1e-10);
    require(is_irreducible(p), Errc::non_ergodic, "transition matrix is reducible");
    const std::size_t n = p.rows();
    Vector x(n, 1.0 / static_cast<double>(n)), y(n);
    for (std::size_t it = 0; it < max_iter; ++it) {
        const Vector xp = vec_mat(x, p);
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            sum += (y[i] = 0.5 * (x[i] + xp[i]));
        for (double &v : y)
            v /= sum;
        const double change = max_abs_diff(x, y);
        x.swap(y);
        if (change < tol) {
            // Polish with undamped steps: the fixed point is shared.
            for (int k = 0; k < 4; ++k) {
                Vector z = vec_mat(x, p);
                const double s = std::accumulate(z.begin(), z.end(), 0.0);
                for (double &v : z)
                    v /= s;
                x.swap(z);
            }
            const double s = std::accumulate(x.begin(), x.end(), 0.0);
            for (double &v : x)
                v /= s;
            return MarginalDistribution(std::move(x));
        }
    }
    throw Error(Errc::non_ergodic, "power iteration for the stationary distribution did not contract");
}

/// Mixed-radix bookkeeping for product state spaces. Coordinate 0 is the
/// most significant digit, matching kron(P_0, P_1, ...).
struct ProductIndex {
    std::vector<std::size_t> dims;

    std::size_t size() const
    {
        return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    }

    std::size_t component(std::size_t joint, std::size_t coord) const
    {
        std::size_t stride = 1;
        for (std::size_t k = dims.size(); k-- > coord + 1;)
            stride *= dims[k];
        return (joint / stride) % dims[coord];
    }

    std::size_t join(std::span<const std::size_t> parts) const
    {
        require(parts.size() == dims.size(), Errc::dimension_mismatch, "wrong number of coordinates");
        std::size_t idx = 0;
        for (std::size_t k = 0; k < dims.size(); ++k)
            idx = idx * dims[k] + parts[k];
        return idx;
    }
};

struct JointChain {
    ProductIndex index;
    Matrix transition;
};

/// Joint chain for coordinates that are independent at equal times. A
/// Gaussian spatial copula qualifies only when it is the identity.
inline JointChain compose_joint_chain(std::span<const std::pair<OrderedStateSpace, Matrix>> parts,
                                      const CopulaSpec &spatial)
{
    require(!parts.empty(), Errc::invalid_argument, "no component chains");
    bool independent = false;
    if (auto w = spatial.frechet_weights())
        independent = w->p == 1.0;
    else {
        const Matrix &r = spatial.correlation();
        independent = true;
        for (std::size_t i = 0; i < r.rows(); ++i)
            for (std::size_t j = 0; j < r.cols(); ++j)
                if (i != j && r(i, j) != 0.0)
                    independent = false;
    }
    require(independent, Errc::unsupported, "exact composition needs independent coordinates");
    JointChain out;
    out.transition = Matrix::identity(1);
    for (const auto &[space, p] : parts) {
        check_stochastic(p, 1e-10);
        require(p.rows() == space.size(), Errc::dimension_mismatch, "state space and matrix sizes differ");
        out.index.dims.push_back(p.rows());
        out.transition = kron(out.transition, p);
    }
    return out;
}

struct GrangerReport {
    bool pass = true;
    double max_residual = 0.0;
};

/// Checks that the next value of `coord` depends on the current joint state
/// only through the current value of `coord`.
inline GrangerReport check_no_granger(const JointChain &chain, std::size_t coord, double tol = 1e-12)
{
    require(coord < chain.index.dims.size(), Errc::invalid_argument, "coordinate out of range");
    const std::size_t n = chain.index.size(), k = chain.index.dims[coord];
    require(chain.transition.rows() == n && chain.transition.square(), Errc::dimension_mismatch,
            "joint matrix does not match the product index");
    Matrix marg(n, k);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            marg(a, chain.index.component(b, coord)) += chain.transition(a, b);
    GrangerReport rep;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            if (chain.index.component(a, coord) != chain.index.component(b, coord))
                continue;
            for (std::size_t x = 0; x < k; ++x)
                rep.max_residual = std::max(rep.max_residual, std::abs(marg(a, x) - marg(b, x)));
        }
    rep.pass = rep.max_residual < tol;
    return rep;
}

} // namespace depcap

#endif
