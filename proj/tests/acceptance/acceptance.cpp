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

// Acceptance checks. `acceptance` runs all of them; `acceptance k` runs one.
// Each prints a single PASS/FAIL line; the exit status is nonzero on any FAIL.

#include <depcap/depcap.hpp>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifndef DEPCAP_SOURCE_DIR
#define DEPCAP_SOURCE_DIR "."
#endif

using namespace depcap;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

Scenario load(const char *name)
{
    return load_scenario(read_json_file(std::string(DEPCAP_SOURCE_DIR) + "/scenarios/" + name));
}

std::string fmt(const char *f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// ---- 1: two-state transition matrices ---------------------------------------

Outcome transition_matrices()
{
    const MarginalDistribution varpi0({0.3, 0.7});
    const auto states = OrderedStateSpace::indexed(2);
    const Matrix want_plus{{0.4125, 0.5875}, {0.2518, 0.7482}}, want_minus{{0.2875, 0.7125}, {0.3054, 0.6946}};
    double worst = 0.0;
    for (double alpha : {0.5, -0.5}) {
        const CopulaSpec c[] = {CopulaSpec::frechet_alpha(alpha)};
        const auto plan = plan_transitions(c, varpi0, states, {.orientation = Orientation::net_increment, .target = std::nullopt});
        worst = std::max(worst, max_abs_diff(plan.transitions[0], alpha > 0 ? want_plus : want_minus));
    }
    return {worst <= 5e-5, fmt("max entry error %.3g", worst)};
}

// ---- 2: copula algebra --------------------------------------------------------

Outcome copula_algebra()
{
    StarOptions opt;
    opt.grid = 256;
    const auto M = CopulaSpec::comonotone(), P = CopulaSpec::product(), W = CopulaSpec::countermonotone();
    double ident = 0.0;
    for (const auto &c : {P, M, W, CopulaSpec::frechet_alpha(0.5), CopulaSpec::gaussian(0.6)}) {
        ident = std::max(ident, star_product(M, c, opt).max_deviation(c));
        ident = std::max(ident, star_product(P, c, opt).max_deviation(P));
    }
    ident = std::max(ident, star_product(W, W, opt).max_deviation(M));
    double gauss = 0.0;
    for (auto [r1, r2] : {std::pair{0.6, -0.7}, std::pair{0.5, 0.8}})
        gauss = std::max(gauss, star_product(CopulaSpec::gaussian(r1), CopulaSpec::gaussian(r2), opt)
                                    .max_deviation(CopulaSpec::gaussian(r1 * r2)));
    Rng g(2024);
    std::vector<std::array<double, 3>> triples;
    for (int k = 0; k < 10; ++k) {
        std::array<double, 3> t{5 * uniform_open(g), 5 * uniform_open(g), 5 * uniform_open(g)};
        std::sort(t.begin(), t.end());
        triples.push_back(t);
    }
    const CopulaFamilyFn frechet = [](double s, double t) { return CopulaSpec::frechet(frechet_homogeneous(t - s)); };
    const double semigroup = markov_family_check(frechet, triples).max_residual;
    const bool ok = ident <= 1e-8 && gauss <= 1e-6 && semigroup <= 1e-12;
    return {ok, fmt("identities %.3g", ident) + fmt(", gaussian %.3g", gauss) + fmt(", semigroup %.3g", semigroup)};
}

// ---- 3: spectral suite --------------------------------------------------------

Outcome spectral_suite()
{
    const Scenario sc = load("fig2_alpha_plus.json");
    const MarkovAdditiveModel &m = sc.analytic();
    const double unit = 1.0 / m.mean_increment();
    const double k0 = std::abs(kappa(m, 0.0));
    double norm = 0.0, perron_err = 0.0;
    for (int k = -10; k <= 10; ++k) {
        const double theta = 0.5 * k * unit;
        const SpectralResult s = spectral(m, theta);
        norm = std::max({norm, std::abs(dot(m.stationary().probs(), s.h) - 1.0), std::abs(dot(s.v, s.h) - 1.0)});
        const Matrix f = build_kernel(m, theta).entries();
        const double tr = f(0, 0) + f(1, 1), det = f(0, 0) * f(1, 1) - f(0, 1) * f(1, 0);
        const double rho = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
        perron_err = std::max(perron_err, std::abs(s.kappa - std::log(rho)) / std::max(1.0, std::abs(std::log(rho))));
    }
    const PathEnsemble e = simulate_ensemble(m, m.stationary(), 20, 100000, sc.seed);
    const std::size_t times[] = {1, 5, 20};
    double worst_z = 0.0;
    for (double theta : {-0.5 * unit, 0.3 * unit})
        for (const Estimate &est : martingale_means(m, e, theta, times))
            worst_z = std::max(worst_z, std::abs(est.value - 1.0) / est.std_error);
    const bool ok = k0 <= 1e-12 && norm <= 1e-10 && perron_err <= 1e-12 && worst_z <= 3.0;
    return {ok, fmt("|kappa(0)| %.3g", k0) + fmt(", normalization %.3g", norm) + fmt(", Perron %.3g", perron_err) +
                    fmt(", martingale max |z| %.2f", worst_z)};
}

// ---- 4: delay band against simulation -----------------------------------------

Outcome bound_sandwich()
{
    bool ok = true;
    std::string detail;
    for (const char *name : {"fig2_alpha_plus.json", "fig2_alpha_minus.json"}) {
        const Scenario sc = load(name);
        const MarkovAdditiveModel &m = sc.analytic();
        const double lambda = *sc.arrival_rate;
        const MarginalDistribution w = sc.start();
        const PathEnsemble e = simulate_ensemble(m, w, sc.simulation.horizon, sc.simulation.paths, sc.seed);
        const QueueSamples q = lindley_queue(e, lambda, sc.simulation.warmup);
        const Vector &grid = sc.bounds.delay_grid;
        const EmpiricalTail emp = empirical_tail(q.delay, grid, sc.validate.delta, sc.validate.dkw_inflation);
        const TailBoundCurve band = delay_tail_bound(m, lambda, w, grid);
        const TailBoundCurve adjusted = delay_tail_bound(m, lambda, w, grid, {.overshoot_adjusted_lower = true});
        const ValidationReport r = validate_bounds(emp, band, sc.validate.min_exceedances);
        const ValidationReport ra = validate_bounds(emp, adjusted, sc.validate.min_exceedances);
        const double rate = adjustment_coefficient(m, lambda).theta_star * lambda;
        const double slope = tail_slope(emp, sc.validate.min_exceedances);
        const double slope_err = std::abs(slope / rate - 1.0);
        const bool here = q.delay.size() >= 100000 && r.violations == 0 && slope_err <= 0.10;
        ok = ok && here;
        detail += std::string(detail.empty() ? "" : "; ") + name + ": N=" + std::to_string(q.delay.size()) +
                  ", band violations " + std::to_string(r.violations) + "/" + std::to_string(r.points_checked) +
                  " (overshoot-adjusted " + std::to_string(ra.violations) + ")" + fmt(", slope error %.3f", slope_err);
    }
    return {ok, detail};
}

// ---- 5: dependence order ------------------------------------------------------

Outcome dependence_order()
{
    const Scenario plus = load("fig2_alpha_plus.json"), minus = load("fig2_alpha_minus.json");
    const MarginalDistribution &w = *plus.marginal;
    const auto W = with_copula(plus, CopulaSpec::countermonotone());
    const auto P = with_copula(plus, CopulaSpec::product());
    const auto M = with_copula(plus, CopulaSpec::comonotone());
    const CxReport wp = cx_compare(W, w, P, w, 4, 50), pm = cx_compare(P, w, M, w, 4, 50);
    double mean_gap = 0.0;
    for (const CxReport *r : {&wp, &pm})
        mean_gap = std::max(mean_gap, std::abs(r->mean_a - r->mean_b) / std::abs(r->mean_b));
    const bool chain = wp.verdict == CxVerdict::a_le_b && pm.verdict == CxVerdict::a_le_b && mean_gap <= 1e-12;
    const double lambda = *plus.arrival_rate;
    const double th_plus = adjustment_coefficient(plus.analytic(), lambda).theta_star;
    const double th_minus = adjustment_coefficient(minus.analytic(), lambda).theta_star;
    return {chain && th_plus > th_minus,
            std::string("W vs P ") + verdict_name(wp.verdict) + ", P vs M " + verdict_name(pm.verdict) +
                fmt(", mean gap %.2g", mean_gap) + fmt(", theta(+0.5) %.6g", th_plus) +
                fmt(" vs theta(-0.5) %.6g", th_minus)};
}

// ---- 6: transient envelope ----------------------------------------------------

Outcome transient_envelope()
{
    const Scenario sc = load("fig1_transient.json");
    const MarkovAdditiveModel &m = sc.analytic();
    const MarginalDistribution w = sc.start();
    const PathEnsemble e = simulate_ensemble(m, w, sc.simulation.horizon, sc.simulation.paths, sc.seed);
    const double allowed = 2.0 * sc.bounds.epsilon * static_cast<double>(e.paths) + 3.0;
    std::size_t worst = 0;
    for (std::size_t t : sc.bounds.horizons) {
        const TransientEnvelope env = transient_capacity_bounds(m, w, t, sc.bounds.epsilon);
        worst = std::max(worst, envelope_violations(e, t, env.c_lower, env.c_upper));
    }
    double mean = 0.0;
    for (std::size_t p = 0; p < e.paths; ++p)
        mean += e.total(p, e.horizon) / static_cast<double>(e.horizon);
    mean /= static_cast<double>(e.paths);
    const double rel = std::abs(mean / m.mean_increment() - 1.0);
    return {static_cast<double>(worst) <= allowed && rel <= 0.01,
            "max paths outside " + std::to_string(worst) + fmt(" (allowed %.0f)", allowed) +
                fmt(", mean error %.4f", rel)};
}

// ---- 7: delay-constrained capacity closure ------------------------------------

Outcome corollary_closure()
{
    const Scenario sc = load("fig2_alpha_plus.json");
    const MarkovAdditiveModel &m = sc.analytic();
    const MarginalDistribution w = sc.start();
    const std::pair<double, double> cases[] = {{1.0, 1e-2}, {5.0, 1e-3}, {10.0, 1e-3}, {20.0, 1e-4}, {50.0, 1e-6}};
    double worst = 0.0;
    bool ordered = true;
    for (auto [d, eps] : cases) {
        const DelayConstrainedCapacity c = delay_constrained_capacity(m, d, eps, w);
        ordered = ordered && c.lambda_lower <= c.lambda_upper;
        const Vector at{d};
        const double up = delay_tail_bound(m, c.lambda_lower, w, at).upper[0];
        const double lo = delay_tail_bound(m, c.lambda_upper, w, at).lower[0];
        worst = std::max({worst, std::abs(up / eps - 1.0), std::abs(lo / eps - 1.0)});
    }
    return {ordered && worst <= 1e-6, fmt("max relative error %.3g", worst) + (ordered ? ", ordered" : ", NOT ordered")};
}

// ---- 8: lag-1 sign ------------------------------------------------------------

Outcome lag1_sign()
{
    // Batches of independent ensembles; the standard error comes from the
    // spread of the batch estimates.
    constexpr std::size_t batches = 32, paths = 1000, horizon = 1000, skip = 50;
    bool ok = true;
    std::string detail;
    for (auto [name, sign] : {std::pair{"fig3_gaussian_negative.json", -1.0}, std::pair{"fig3_gaussian_positive.json", 1.0}}) {
        const Scenario sc = load(name);
        std::vector<double> est;
        for (std::size_t b = 0; b < batches; ++b) {
            const PathEnsemble e = simulate_ensemble(sc.controlled(), sc.start(), horizon, paths,
                                                     substream_seed(sc.seed, 1000000 + b));
            est.push_back(lag1_autocorrelation(e, skip, 1).value);
        }
        double mean = 0.0, var = 0.0;
        for (double x : est)
            mean += x;
        mean /= batches;
        for (double x : est)
            var += (x - mean) * (x - mean);
        const double se = std::sqrt(var / (batches - 1) / batches);
        const bool here = sign * mean > 3.0 * se;
        ok = ok && here;
        detail += std::string(detail.empty() ? "" : "; ") + name + fmt(": rho %.3g", mean) + fmt(" (SE %.2g)", se);
    }
    return {ok, detail};
}

struct Criterion {
    const char *title;
    Outcome (*run)();
};

const Criterion criteria[] = {
    {"two-state transition matrices", transition_matrices},
    {"copula algebra", copula_algebra},
    {"spectral suite", spectral_suite},
    {"delay band against simulation", bound_sandwich},
    {"dependence order", dependence_order},
    {"transient capacity envelope", transient_envelope},
    {"delay-constrained capacity closure", corollary_closure},
    {"lag-1 autocorrelation sign", lag1_sign},
};

} // namespace

int main(int argc, char **argv)
{
    std::vector<int> which;
    if (argc > 1)
        which.push_back(std::atoi(argv[1]));
    else
        for (int k = 1; k <= 8; ++k)
            which.push_back(k);
    bool all = true;
    for (int k : which) {
        if (k < 1 || k > 8) {
            std::fprintf(stderr, "usage: acceptance [1-8]\n");
            return 2;
        }
        const Criterion &c = criteria[k - 1];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%s %d %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", k, c.title, o.detail.c_str(), secs);
        std::fflush(stdout);
        all = all && o.pass;
    }
    return all ? 0 : 1;
}
