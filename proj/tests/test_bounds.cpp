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

#include <depcap/bounds.hpp>

#include <boost/math/distributions/binomial.hpp>

#include <catch_amalgamated.hpp>

#include <cmath>

using namespace depcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double W = 20000.0;

template <class F>
Errc error_code(F &&f)
{
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("no error thrown");
    return Errc::invalid_argument;
}

MarkovAdditiveModel fading_model()
{
    const double g0 = std::exp(0.5), g1 = std::exp(0.5) * 0.7;
    return MarkovAdditiveModel::rayleigh(Matrix{{0.3, 0.7}, {0.1, 0.9}}, Matrix{{g0, g0}, {g1, g1}}, W);
}

// i.i.d. Bernoulli(p) capacity: S(t) is Binomial(t, p).
MarkovAdditiveModel bernoulli(double p) { return MarkovAdditiveModel::single_state(DiscretePmf({0.0, 1.0}, {1.0 - p, p})); }

const MarginalDistribution one({1.0});

} // namespace

TEST_CASE("cumulative bounds bracket the binomial law", "[bounds]")
{
    const double p = 0.7;
    const std::size_t t = 50;
    const boost::math::binomial_distribution<double> bin(static_cast<double>(t), p);
    Vector xs;
    for (int k = 20; k <= 48; k += 2)
        xs.push_back(k + 0.5);
    const auto c = cumulative_capacity_bounds(bernoulli(p), one, t, xs);
    REQUIRE(c.axis.size() == xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double exact = boost::math::cdf(bin, std::floor(xs[i]));
        CHECK(c.lower[i] <= exact + 1e-12);
        CHECK(exact <= c.upper[i] + 1e-12);
        if (i > 0) {
            CHECK(c.lower[i] >= c.lower[i - 1] - 1e-12);
            CHECK(c.upper[i] >= c.upper[i - 1] - 1e-12);
        }
    }
}

TEST_CASE("cumulative bounds of a constant capacity", "[bounds]")
{
    const auto m = MarkovAdditiveModel::single_state(Deterministic{2.0});
    const Vector xs{90.0, 99.0, 101.0, 110.0};
    const auto c = cumulative_capacity_bounds(m, one, 50, xs);
    CHECK_THAT(c.lower[0], WithinAbs(0.0, 1e-12));
    CHECK_THAT(c.upper[0], WithinAbs(0.0, 1e-6));
    CHECK_THAT(c.lower[3], WithinAbs(1.0, 1e-6));
    CHECK_THAT(c.upper[3], WithinAbs(1.0, 1e-12));
}

TEST_CASE("cumulative bounds order and prefactor", "[bounds][invariant]")
{
    const auto m = fading_model();
    const double mean = m.mean_increment();
    const std::size_t t = 200;
    Vector xs;
    for (int k = -10; k <= 10; ++k)
        xs.push_back(t * mean * (1.0 + 0.05 * k));
    for (const auto &w : {m.stationary(), MarginalDistribution({1.0, 0.0}), MarginalDistribution({0.0, 1.0})}) {
        const auto c = cumulative_capacity_bounds(m, w, t, xs);
        for (std::size_t i = 0; i < xs.size(); ++i) {
            CHECK(c.lower[i] <= c.upper[i]);
            CHECK(c.lower[i] >= 0.0);
            CHECK(c.upper[i] <= 1.0);
            CHECK(c.theta[i] > 0.0);
        }
        CHECK(c.upper.front() < 1e-3);
        CHECK(c.lower.back() > 1.0 - 1e-3);
    }
}

TEST_CASE("transient envelope of binomial capacity", "[bounds]")
{
    const double p = 0.6, eps = 1e-3;
    for (std::size_t t : {20u, 100u, 500u}) {
        const auto e = transient_capacity_bounds(bernoulli(p), one, t, eps);
        const boost::math::binomial_distribution<double> bin(static_cast<double>(t), p);
        const double dt = static_cast<double>(t);
        CHECK(e.c_lower <= p);
        CHECK(e.c_upper >= p);
        CHECK(e.theta_upper > 0.0);
        CHECK(e.theta_lower < 0.0);
        // P(S > t c_upper) and P(S < t c_lower) are each at most eps
        CHECK(boost::math::cdf(boost::math::complement(bin, std::floor(dt * e.c_upper))) <= eps);
        if (!e.trivial_lower && dt * e.c_lower >= 1.0)
            CHECK(boost::math::cdf(bin, std::ceil(dt * e.c_lower) - 1.0) <= eps);
    }
}

TEST_CASE("transient envelope shrinks with the horizon", "[bounds][invariant]")
{
    const auto m = fading_model();
    const double mean = m.mean_increment();
    double prev_width = std::numeric_limits<double>::infinity();
    for (std::size_t t : {10u, 100u, 1000u, 10000u}) {
        const auto e = transient_capacity_bounds(m, m.stationary(), t, 1e-3);
        CHECK(e.c_lower < mean);
        CHECK(e.c_upper > mean);
        const double width = e.c_upper - e.c_lower;
        CHECK(width < prev_width);
        prev_width = width;
    }
    const auto c = MarkovAdditiveModel::single_state(Deterministic{5.0});
    const auto e = transient_capacity_bounds(c, one, 1000, 1e-3);
    CHECK_THAT(e.c_upper, WithinRel(5.0, 1e-5));
    CHECK_THAT(e.c_lower, WithinRel(5.0, 1e-5));
}

TEST_CASE("single state delay band collapses to the exponential", "[bounds]")
{
    const double lambda = 0.5;
    const auto m = bernoulli(0.7);
    const auto adj = adjustment_coefficient(m, lambda);
    const Vector ds{0.0, 1.0, 2.5, 10.0};
    const auto c = delay_tail_bound(m, lambda, one, ds);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double expected = std::exp(-adj.theta_star * lambda * ds[i]);
        CHECK_THAT(c.lower[i], WithinRel(expected, 1e-12));
        CHECK_THAT(c.upper[i], WithinRel(expected, 1e-12));
    }
}

TEST_CASE("delay and backlog bands", "[bounds][invariant]")
{
    const auto m = fading_model();
    const double lambda = 0.6 * m.mean_increment();
    const auto adj = adjustment_coefficient(m, lambda);
    Vector ds;
    for (int k = 0; k <= 20; ++k)
        ds.push_back(0.25 * k);
    for (const auto &w : {m.stationary(), MarginalDistribution({1.0, 0.0})}) {
        const auto c = delay_tail_bound(m, lambda, w, ds);
        const auto adj_c = delay_tail_bound(m, lambda, w, ds, {.overshoot_adjusted_lower = true});
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(c.lower[i] <= c.upper[i]);
            CHECK_THAT(c.theta[i], WithinRel(adj.theta_star, 1e-15));
            CHECK_THAT(adj_c.lower[i], WithinRel(c.lower[i] * std::exp(-adj.theta_star * lambda), 1e-12));
            CHECK(adj_c.upper[i] == c.upper[i]);
            if (i > 0 && !c.clamped[i - 1]) {
                CHECK(c.upper[i] < c.upper[i - 1]);
                // log-linear decay with slope theta* lambda
                CHECK_THAT(std::log(c.upper[i - 1] / c.upper[i]), WithinRel(adj.theta_star * lambda * 0.25, 1e-10));
            }
        }
        Vector bs(ds);
        for (double &b : bs)
            b *= lambda;
        const auto b = backlog_tail_bound(m, lambda, w, bs);
        CHECK(b.quantity == "backlog_ccdf");
        for (std::size_t i = 0; i < ds.size(); ++i) {
            CHECK(b.axis[i] == bs[i]);
            CHECK_THAT(b.upper[i], WithinRel(c.upper[i], 1e-12));
            CHECK_THAT(b.lower[i], WithinRel(c.lower[i], 1e-12));
        }
    }
}

TEST_CASE("delay-constrained capacity", "[bounds]")
{
    const auto m = fading_model();
    const auto &w = m.stationary();
    const double mean = m.mean_increment();
    double prev = 0.0;
    for (double d : {2.0, 10.0, 50.0}) {
        const auto r = delay_constrained_capacity(m, d, 1e-3, w);
        CHECK(r.lambda_lower <= r.lambda_upper);
        CHECK(r.lambda_upper < mean);
        CHECK(r.lambda_lower > prev);
        prev = r.lambda_lower;
        CHECK(r.residual_lower < 1e-12);
        CHECK(r.residual_upper < 1e-12);
        const Vector at{d};
        CHECK_THAT(delay_tail_bound(m, r.lambda_lower, w, at).upper[0], WithinRel(1e-3, 1e-8));
        CHECK_THAT(delay_tail_bound(m, r.lambda_upper, w, at).lower[0], WithinRel(1e-3, 1e-8));
    }
}

TEST_CASE("bound error conditions", "[bounds]")
{
    const auto m = fading_model();
    const Vector xs{1.0};
    CHECK(error_code([&] { cumulative_capacity_bounds(m, m.stationary(), 0, xs); }) == Errc::invalid_argument);
    CHECK(error_code([&] { cumulative_capacity_bounds(m, one, 10, xs); }) == Errc::dimension_mismatch);
    CHECK(error_code([&] { transient_capacity_bounds(m, m.stationary(), 10, 0.0); }) == Errc::invalid_argument);
    CHECK(error_code([&] { delay_tail_bound(m, 2.0 * m.mean_increment(), m.stationary(), xs); }) ==
          Errc::unstable_queue);
    const Vector neg{-1.0};
    CHECK(error_code([&] { delay_tail_bound(m, 0.5 * m.mean_increment(), m.stationary(), neg); }) ==
          Errc::invalid_argument);
    CHECK(error_code([&] { delay_constrained_capacity(m, 0.0, 1e-3, m.stationary()); }) == Errc::invalid_argument);
    CHECK(error_code([&] { backlog_tail_bound(m, 0.0, m.stationary(), xs); }) == Errc::invalid_argument);
}
