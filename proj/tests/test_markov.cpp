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

#include <depcap/markov.hpp>
#include <depcap/random.hpp>

#include <catch_amalgamated.hpp>

#include <array>
#include <cmath>

using namespace depcap;
using Catch::Matchers::WithinAbs;

namespace {

void check_matrix(const Matrix &got, const Matrix &want, double tol)
{
    REQUIRE(got.rows() == want.rows());
    REQUIRE(got.cols() == want.cols());
    for (std::size_t i = 0; i < got.rows(); ++i)
        for (std::size_t j = 0; j < got.cols(); ++j)
            CHECK_THAT(got(i, j), WithinAbs(want(i, j), tol));
}

// Not a copula: exceeds the upper Frechet bound in the interior, so some
// second difference at the marginal lattice is negative.
struct BrokenCopula {
    double value(double u, double v) const
    {
        if (u <= 0.0 || v <= 0.0)
            return 0.0;
        if (u >= 1.0)
            return v;
        if (v >= 1.0)
            return u;
        return std::min(u, v) + 0.05;
    }
    double partial(double, double, int) const { return 0.0; }
    bool endpoint_singular() const { return false; }
};

MarginalDistribution random_marginal(Rng &g, std::size_t n)
{
    Vector p(n);
    double s = 0.0;
    for (double &x : p)
        s += (x = 0.05 + uniform_open(g));
    for (double &x : p)
        x /= s;
    return MarginalDistribution(p);
}

} // namespace

TEST_CASE("two-state transition matrices from copulas", "[markov]")
{
    const MarginalDistribution pi({0.3, 0.7});
    // Published figure values (4 decimals).
    check_matrix(transition_from_copula(CopulaSpec::frechet_alpha(0.5), pi, pi),
                 Matrix{{0.4125, 0.5875}, {0.2518, 0.7482}}, 5e-5);
    check_matrix(transition_from_copula(CopulaSpec::frechet_alpha(-0.5), pi, pi),
                 Matrix{{0.2875, 0.7125}, {0.3054, 0.6946}}, 5e-5);
    // Exact: C(0.3, 0.3) = 0.12375 for alpha = 0.5 and 0.08625 for alpha = -0.5.
    check_matrix(transition_from_copula(CopulaSpec::frechet_alpha(0.5), pi, pi),
                 Matrix{{0.12375 / 0.3, 1 - 0.12375 / 0.3}, {0.17625 / 0.7, 1 - 0.17625 / 0.7}}, 1e-15);
    check_matrix(transition_from_copula(CopulaSpec::frechet_alpha(-0.5), pi, pi),
                 Matrix{{0.08625 / 0.3, 1 - 0.08625 / 0.3}, {0.21375 / 0.7, 1 - 0.21375 / 0.7}}, 1e-15);
    check_matrix(transition_from_copula(CopulaSpec::comonotone(), pi, pi), Matrix::identity(2), 1e-15);
    check_matrix(transition_from_copula(CopulaSpec::product(), pi, pi), Matrix{{0.3, 0.7}, {0.3, 0.7}}, 1e-15);
    check_matrix(transition_from_copula(CopulaSpec::countermonotone(), pi, pi), Matrix{{0.0, 1.0}, {3.0 / 7, 4.0 / 7}},
                 1e-15);
}

TEST_CASE("transition_from_copula errors", "[markov]")
{
    const MarginalDistribution pi({0.3, 0.7}), zero({0.0, 1.0});
    try {
        transition_from_copula(CopulaSpec::product(), zero, pi);
        FAIL("expected ZeroMassState");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::zero_mass_state);
    }
    try {
        transition_from_copula(BrokenCopula{}, pi, pi);
        FAIL("expected InfeasibleCopula");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::infeasible_copula);
    }
}

TEST_CASE("cumulative identity and marginal propagation hold for random inputs", "[markov][invariant]")
{
    Rng g(17);
    const std::vector<CopulaSpec> cs{CopulaSpec::frechet_alpha(0.8), CopulaSpec::frechet_alpha(-0.3),
                                     CopulaSpec::gaussian(0.7), CopulaSpec::gaussian(-0.5),
                                     CopulaSpec::countermonotone()};
    for (const auto &c : cs)
        for (std::size_t n : {2u, 3u, 5u}) {
            const MarginalDistribution a = random_marginal(g, n), b = random_marginal(g, n);
            const Matrix p = transition_from_copula(c, a, b);
            CHECK_NOTHROW(check_stochastic(p));
            const Matrix cj = cumulative_joint(a, p);
            const Vector fa = a.cdf(), fb = b.cdf();
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    CHECK_THAT(cj(i, j), WithinAbs(c.value(fa[i], fb[j]), 1e-12));
            const MarginalDistribution next = propagate(a, p);
            for (std::size_t j = 0; j < n; ++j)
                CHECK_THAT(next[j], WithinAbs(b[j], 1e-12));
        }
}

TEST_CASE("homogeneous plans keep the stationary marginal", "[markov][invariant]")
{
    Rng g(5);
    for (double alpha : {-0.9, -0.2, 0.4, 0.95})
        for (std::size_t n : {2u, 4u}) {
            const MarginalDistribution pi = random_marginal(g, n);
            const Matrix p = transition_from_copula(CopulaSpec::frechet_alpha(alpha), pi, pi);
            const MarginalDistribution s = stationary_distribution(p);
            for (std::size_t i = 0; i < n; ++i)
                CHECK_THAT(s[i], WithinAbs(pi[i], 1e-10));
        }
}

TEST_CASE("comonotone and countermonotone bracket the diagonal", "[markov][invariant]")
{
    for (double p0 : {0.2, 0.3, 0.5, 0.65}) {
        const MarginalDistribution pi({p0, 1 - p0});
        const Matrix hi = transition_from_copula(CopulaSpec::comonotone(), pi, pi);
        const Matrix lo = transition_from_copula(CopulaSpec::countermonotone(), pi, pi);
        // every stochastic P with pi P = pi is fixed by p00; p10 = p0 (1 - p00) / (1 - p0)
        for (int k = 0; k <= 1000; ++k) {
            const double p00 = k / 1000.0;
            const double p10 = p0 * (1 - p00) / (1 - p0);
            if (p10 > 1.0)
                continue;
            CHECK(hi(0, 0) >= p00 - 1e-15);
            CHECK(hi(1, 1) >= 1 - p10 - 1e-15);
            CHECK(lo(0, 0) <= p00 + 1e-15);
            CHECK(lo(1, 1) <= 1 - p10 + 1e-15);
        }
    }
}

TEST_CASE("stationary distribution examples", "[markov]")
{
    const auto s = stationary_distribution(Matrix{{0.3, 0.7}, {0.3, 0.7}});
    CHECK_THAT(s[0], WithinAbs(0.3, 1e-12));
    const auto f = stationary_distribution(Matrix{{0.4125, 0.5875}, {0.2518, 0.7482}});
    CHECK_THAT(f[0], WithinAbs(0.3, 1e-4));
    // periodic chain: lazy iteration still converges
    const auto per = stationary_distribution(Matrix{{0.0, 1.0}, {1.0, 0.0}});
    CHECK_THAT(per[0], WithinAbs(0.5, 1e-12));
    try {
        stationary_distribution(Matrix::identity(2));
        FAIL("expected NonErgodic");
    } catch (const Error &e) {
        CHECK(e.code() == Errc::non_ergodic);
    }
    // residual against an arbitrary 3-state chain
    const Matrix p{{0.1, 0.6, 0.3}, {0.5, 0.25, 0.25}, {0.05, 0.05, 0.9}};
    const auto pi = stationary_distribution(p);
    const Vector r = vec_mat(pi.probs(), p);
    CHECK(max_abs_diff(r, pi.probs()) < 1e-12);
}

TEST_CASE("state space and marginal validation", "[markov]")
{
    CHECK_THROWS_AS(OrderedStateSpace({"a", "b"}, {1.0, 1.0}), Error);
    CHECK_THROWS_AS(OrderedStateSpace({"a", "a"}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(OrderedStateSpace({"a"}, {1.0, 2.0}), Error);
    CHECK_THROWS_AS(MarginalDistribution({0.5, 0.6}), Error);
    CHECK_THROWS_AS(MarginalDistribution({-0.1, 1.1}), Error);
    CHECK_THROWS_AS(check_stochastic(Matrix{{0.5, 0.6}, {0.5, 0.5}}), Error);
    CHECK(OrderedStateSpace::indexed(3).labels()[2] == "2");
    CHECK(MarginalDistribution({0.2, 0.3, 0.5}).cdf().back() == 1.0);
}

TEST_CASE("joint chain composition", "[markov]")
{
    const Matrix p{{0.2, 0.8}, {0.6, 0.4}}, q{{0.9, 0.1}, {0.3, 0.7}};
    const std::vector<std::pair<OrderedStateSpace, Matrix>> parts{{OrderedStateSpace::indexed(2), p},
                                                                  {OrderedStateSpace::indexed(2), q}};
    const JointChain j = compose_joint_chain(parts, CopulaSpec::product());
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t k = 0; k < 2; ++k)
            for (std::size_t a = 0; a < 2; ++a)
                for (std::size_t b = 0; b < 2; ++b) {
                    const std::array<std::size_t, 2> from{i, k}, to{a, b};
                    CHECK_THAT(j.transition(j.index.join(from), j.index.join(to)), WithinAbs(p(i, a) * q(k, b), 1e-15));
                }
    CHECK_NOTHROW(check_stochastic(j.transition));

    const std::vector<std::pair<OrderedStateSpace, Matrix>> degenerate{{OrderedStateSpace::indexed(2), p},
                                                                       {OrderedStateSpace::indexed(1), Matrix::identity(1)}};
    check_matrix(compose_joint_chain(degenerate, CopulaSpec::product()).transition, p, 0.0);

    const JointChain g = compose_joint_chain(parts, CopulaSpec::gaussian(0.0));
    check_matrix(g.transition, j.transition, 0.0);
    CHECK_THROWS_AS(compose_joint_chain(parts, CopulaSpec::gaussian(0.3)), Error);
    CHECK_THROWS_AS(compose_joint_chain(parts, CopulaSpec::frechet_alpha(0.5)), Error);

    const ProductIndex idx{{2, 3, 4}};
    for (std::size_t x = 0; x < idx.size(); ++x) {
        const std::array<std::size_t, 3> parts3{idx.component(x, 0), idx.component(x, 1), idx.component(x, 2)};
        CHECK(idx.join(parts3) == x);
    }
}

TEST_CASE("no-Granger check", "[markov]")
{
    const Matrix p{{0.2, 0.8}, {0.6, 0.4}}, q{{0.9, 0.1}, {0.3, 0.7}};
    const std::vector<std::pair<OrderedStateSpace, Matrix>> parts{{OrderedStateSpace::indexed(2), p},
                                                                  {OrderedStateSpace::indexed(2), q}};
    const JointChain j = compose_joint_chain(parts, CopulaSpec::product());
    CHECK(check_no_granger(j, 0).pass);
    CHECK(check_no_granger(j, 1).pass);

    // Power (coordinate 0) moves to 0 w.p. 0.2 from (0, fade 0) but 0.5 from (0, fade 1).
    JointChain bad{ProductIndex{{2, 2}},
                   Matrix{{0.1, 0.1, 0.4, 0.4}, {0.25, 0.25, 0.25, 0.25}, {0.3, 0.3, 0.2, 0.2}, {0.3, 0.3, 0.2, 0.2}}};
    const auto rep = check_no_granger(bad, 0);
    CHECK_FALSE(rep.pass);
    CHECK_THAT(rep.max_residual, WithinAbs(0.3, 1e-15));

    const JointChain single{ProductIndex{{3}}, Matrix{{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}}};
    CHECK(check_no_granger(single, 0).pass);
}
