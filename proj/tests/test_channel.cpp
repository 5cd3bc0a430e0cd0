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

#include <depcap/channel.hpp>
#include <depcap/random.hpp>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace depcap;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double W = 20000.0;
const double g_hi = std::exp(0.5);

// E[(1 + gamma Z)^a] by tanh-sinh style quadrature on [0, inf).
double moment_by_quadrature(double gamma, double a)
{
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double z) { return std::exp(a * std::log1p(gamma * z) - z); });
}

// Same moment in closed form: e^{1/gamma} gamma^a Gamma(a + 1, 1/gamma).
double moment_closed_form(double gamma, double a)
{
    return std::exp(1.0 / gamma + a * std::log(gamma)) * boost::math::tgamma(a + 1.0, 1.0 / gamma);
}

} // namespace

TEST_CASE("Rayleigh capacity mean matches E1 and a quadrature oracle", "[channel]")
{
    for (double gamma : {1e-3, 0.2, 1.0, g_hi, 30.0, 1e4}) {
        const IncrementLaw law = RayleighCapacity(W, gamma);
        if (1.0 / gamma < 700.0) {
            const double want = W / std::numbers::ln2 * std::exp(1.0 / gamma) * boost::math::expint(1, 1.0 / gamma);
            CHECK_THAT(capacity_mean(law), WithinRel(want, 1e-12));
        }
        boost::math::quadrature::exp_sinh<double> integrator;
        const double direct =
            integrator.integrate([&](double z) { return W * std::log2(1.0 + gamma * z) * std::exp(-z); });
        CHECK_THAT(capacity_mean(law), WithinRel(direct, 1e-9));
    }
}

TEST_CASE("Rayleigh capacity CDF and quantile", "[channel]")
{
    const IncrementLaw law = RayleighCapacity(W, g_hi);
    CHECK(capacity_cdf(law, 0.0) == 0.0);
    CHECK(capacity_cdf(law, -5.0) == 0.0);
    CHECK_THAT(capacity_cdf(law, W * std::log2(1.0 + g_hi)), WithinAbs(1.0 - std::exp(-1.0), 1e-15));
    double prev = 0.0;
    for (double x = 0.0; x <= 120000.0; x += 1000.0) {
        const double f = capacity_cdf(law, x);
        CHECK(f >= prev);
        prev = f;
        if (f > 1e-12 && f < 1.0 - 1e-6)
            CHECK_THAT(capacity_quantile(law, f), WithinAbs(x, 1e-10 * std::max(1.0, x)));
    }
    CHECK(std::isinf(capacity_quantile(law, 1.0)));
    CHECK(capacity_quantile(law, 0.0) == 0.0);
}

TEST_CASE("Rayleigh samples follow the CDF within the DKW band", "[channel]")
{
    const IncrementLaw law = RayleighCapacity(W, 0.7 * g_hi);
    Rng g(2024);
    const std::size_t n = 1000000;
    std::vector<double> s(n);
    double mean = 0.0;
    for (double &x : s) {
        x = capacity_sample(law, g);
        mean += x;
    }
    std::sort(s.begin(), s.end());
    const double eps = std::sqrt(std::log(2.0 / 1e-6) / (2.0 * n));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; k += 997)
        worst = std::max(worst, std::abs((k + 1.0) / n - capacity_cdf(law, s[k])));
    CHECK(worst < eps);
    CHECK(s.front() >= 0.0);
    // mean within 6 standard errors (sd of C is below 2 W here)
    CHECK_THAT(mean / n, WithinAbs(capacity_mean(law), 6 * 2 * W / std::sqrt(double(n))));
}

TEST_CASE("deterministic and vanishing-SNR laws", "[channel]")
{
    Rng g(1);
    const IncrementLaw five = Deterministic{5.0};
    for (int k = 0; k < 10; ++k)
        CHECK(capacity_sample(five, g) == 5.0);
    CHECK(capacity_cdf(five, 4.999) == 0.0);
    CHECK(capacity_cdf(five, 5.0) == 1.0);
    CHECK_THAT(log_mgf(five, 0.3), WithinAbs(1.5, 1e-15));
    const IncrementLaw tiny = RayleighCapacity(W, 1e-12);
    for (int k = 0; k < 100; ++k)
        CHECK(capacity_sample(tiny, g) < 1e-6);
}

TEST_CASE("Rayleigh MGF special values", "[channel]")
{
    for (double gamma : {0.3, g_hi, 0.7 * g_hi, 12.0}) {
        const IncrementLaw law = RayleighCapacity(W, gamma);
        CHECK(transition_mgf(law, 0.0) == 1.0);
        CHECK_THAT(transition_mgf(law, std::numbers::ln2 / W), WithinRel(1.0 + gamma, 1e-13));
        CHECK_THAT(transition_mgf(law, 2 * std::numbers::ln2 / W), WithinRel(1.0 + 2 * gamma + 2 * gamma * gamma, 1e-13));
    }
}

TEST_CASE("Rayleigh MGF against independent quadrature and closed form", "[channel]")
{
    for (double gamma : {0.2, g_hi, 0.7 * g_hi, 8.0})
        for (double a : {-150.0, -30.0, -5.0, -0.5, 0.5, 3.7, 25.0, 60.0}) {
            INFO("gamma " << gamma << " a " << a);
            const IncrementLaw law = RayleighCapacity(W, gamma);
            const double got = log_mgf(law, a * std::numbers::ln2 / W);
            CHECK_THAT(got, WithinAbs(std::log(moment_by_quadrature(gamma, a)), 1e-10 * std::max(1.0, std::abs(got))));
            if (a > -1.0)
                CHECK_THAT(got, WithinAbs(std::log(moment_closed_form(gamma, a)), 1e-10 * std::max(1.0, std::abs(got))));
        }
}

TEST_CASE("MGF is log-convex with slope equal to the mean at zero", "[channel][invariant]")
{
    const std::vector<IncrementLaw> laws{RayleighCapacity(W, g_hi), RayleighCapacity(1.0, 3.0),
                                         DiscretePmf({1.0, 4.0, 2.0}, {0.2, 0.5, 0.3})};
    for (const auto &law : laws) {
        const double scale = 1.0 / capacity_mean(law);
        for (double t = -20.0; t <= 20.0; t += 0.5) {
            const double a = log_mgf(law, (t - 0.5) * scale), b = log_mgf(law, (t + 0.5) * scale);
            CHECK(log_mgf(law, t * scale) <= 0.5 * (a + b) + 1e-12 * std::max(1.0, std::abs(a + b)));
        }
        const double h = 1e-5 * scale;
        const double slope = (log_mgf(law, h) - log_mgf(law, -h)) / (2 * h);
        CHECK_THAT(slope, WithinRel(capacity_mean(law), 1e-6));
    }
}

TEST_CASE("discrete PMF law", "[channel]")
{
    const DiscretePmf pmf({3.0, 1.0, 3.0}, {0.25, 0.5, 0.25});
    REQUIRE(pmf.support == std::vector<double>{1.0, 3.0});
    CHECK(pmf.probs == std::vector<double>{0.5, 0.5});
    const IncrementLaw law = pmf;
    CHECK(capacity_mean(law) == 2.0);
    CHECK(capacity_cdf(law, 2.0) == 0.5);
    CHECK(capacity_quantile(law, 0.5) == 1.0);
    CHECK(capacity_quantile(law, 0.51) == 3.0);
    CHECK_THAT(log_mgf(law, 0.7), WithinAbs(std::log(0.5 * std::exp(0.7) + 0.5 * std::exp(2.1)), 1e-15));
    CHECK_THAT(log_mgf(law, -900.0), WithinAbs(std::log(0.5) - 900.0, 1e-12));
    CHECK(support_min(law) == 1.0);
    CHECK(support_max(law) == 3.0);
    CHECK_THROWS_AS(DiscretePmf({1.0}, {0.9}), Error);
    CHECK_THROWS_AS(RayleighCapacity(0.0, 1.0), Error);
    CHECK_THROWS_AS(RayleighCapacity(1.0, -1.0), Error);
}
