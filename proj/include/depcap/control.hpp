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

#ifndef DEPCAP_CONTROL_HPP
#define DEPCAP_CONTROL_HPP

#include "channel.hpp"
#include "copula.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "markov.hpp"
#include "model.hpp"
#include "normal.hpp"
#include "random.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace depcap {

/// Which ordered quantity the step copulas couple. States are listed in
/// increasing capacity; `net_increment` couples lambda - C, i.e. the states
/// in reverse order.
enum class Orientation { capacity, net_increment };

struct PlanOptions {
    Orientation orientation = Orientation::capacity;
    // Marginal every step should reach. Unset means each step keeps the
    // current marginal, so a stationary start stays stationary.
    std::optional<MarginalDistribution> target;
};

/// Time-indexed transitions of the controllable coordinate: step j uses
/// copulas[j] between marginals[j] and marginals[j + 1] = marginals[j] P_j.
struct ControlPlan {
    OrderedStateSpace states;
    std::vector<CopulaSpec> copulas;
    std::vector<MarginalDistribution> marginals; // horizon + 1 entries
    std::vector<Matrix> transitions;             // horizon entries
    Orientation orientation = Orientation::capacity;

    std::size_t horizon() const noexcept { return transitions.size(); }
};

namespace detail {

inline MarginalDistribution reversed(const MarginalDistribution &m)
{
    Vector p(m.probs().rbegin(), m.probs().rend());
    return MarginalDistribution(std::move(p));
}

inline Matrix reversed(const Matrix &p)
{
    const std::size_t n = p.rows();
    Matrix r(n, p.cols());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p.cols(); ++j)
            r(i, j) = p(n - 1 - i, p.cols() - 1 - j);
    return r;
}

} // namespace detail

inline ControlPlan plan_transitions(std::span<const CopulaSpec> copulas, const MarginalDistribution &varpi0,
                                   const OrderedStateSpace &states, const PlanOptions &opt = {})
{
    require(!copulas.empty(), Errc::invalid_argument, "plan needs at least one step copula");
    require(varpi0.size() == states.size(), Errc::dimension_mismatch, "initial distribution does not match states");
    if (opt.target)
        require(opt.target->size() == states.size(), Errc::dimension_mismatch, "target marginal does not match states");
    ControlPlan plan;
    plan.states = states;
    plan.orientation = opt.orientation;
    plan.copulas.assign(copulas.begin(), copulas.end());
    plan.marginals.push_back(varpi0);
    const bool flip = opt.orientation == Orientation::net_increment;
    for (std::size_t j = 0; j < copulas.size(); ++j) {
        const MarginalDistribution &now = plan.marginals.back();
        const MarginalDistribution next = opt.target ? *opt.target : now;
        Matrix p;
        try {
            p = flip ? detail::reversed(transition_from_copula(copulas[j], detail::reversed(now), detail::reversed(next)))
                     : transition_from_copula(copulas[j], now, next);
        } catch (const Error &e) {
            throw Error(e.code(), "plan step " + std::to_string(j) + ": " + e.what());
        }
        plan.marginals.push_back(propagate(now, p));
        plan.transitions.push_back(std::move(p));
    }
    return plan;
}

/// Simulation-only joint model of a planned power chain and a single-state
/// Rayleigh fading process linked by a Gaussian spatial copula. The power
/// latent is drawn uniformly inside the current state's quantile band of the
/// planned marginal; the fading latent is s Z_power + sqrt(1 - s^2) e, and
/// its unit-exponential gain -log Phi(-Z_fading) scales snr(i, j) on the
/// transition i -> j.
class CoupledFadingModel {
public:
    CoupledFadingModel(ControlPlan plan, double spatial_corr, Matrix snr, double bandwidth)
        : plan_(std::move(plan)), corr_(spatial_corr), snr_(std::move(snr)), bandwidth_(bandwidth)
    {
        const std::size_t n = plan_.states.size();
        require(snr_.rows() == n && snr_.cols() == n, Errc::dimension_mismatch, "SNR matrix does not match states");
        require(std::abs(corr_) <= 1.0, Errc::invalid_argument, "spatial correlation outside [-1, 1]");
        require(bandwidth_ > 0.0, Errc::invalid_argument, "bandwidth must be positive");
        for (std::size_t k = 0; k < plan_.marginals.size(); ++k)
            cdfs_.push_back(plan_.marginals[k].cdf());
    }

    std::size_t size() const noexcept { return plan_.states.size(); }
    const ControlPlan &plan() const noexcept { return plan_; }
    double spatial_correlation() const noexcept { return corr_; }
    const Matrix &snr() const noexcept { return snr_; }
    double bandwidth() const noexcept { return bandwidth_; }
    const Matrix &transition(std::size_t step) const
    {
        return plan_.transitions[std::min(step, plan_.transitions.size() - 1)];
    }

    /// The same chain with independent fading: exact marginals per transition.
    MarkovAdditiveModel markov_equivalent() const
    {
        std::vector<IncrementLaw> laws;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                laws.emplace_back(RayleighCapacity(bandwidth_, snr_(i, j)));
        return {plan_.states, plan_.transitions, std::move(laws)};
    }

    /// Fading gain coupled to the power latent of state i at step k.
    template <class URBG>
    double fading_gain(URBG &g, std::size_t k, std::size_t i) const
    {
        const Vector &f = cdfs_[std::min(k, cdfs_.size() - 1)];
        const double lo = i ? f[i - 1] : 0.0;
        const double u = lo + (f[i] - lo) * uniform_open(g);
        const double zp = normal::quantile(std::clamp(u, 1e-300, 1.0 - 1e-16));
        const double zf = corr_ * zp + std::sqrt((1.0 - corr_) * (1.0 + corr_)) * normal::quantile(uniform_open(g));
        return -std::log(normal::cdf(-zf));
    }

    double capacity(std::size_t i, std::size_t j, double gain) const
    {
        return bandwidth_ * std::log1p(snr_(i, j) * gain) / std::numbers::ln2;
    }

private:
    ControlPlan plan_;
    double corr_;
    Matrix snr_;
    double bandwidth_;
    std::vector<Vector> cdfs_;
};

using ControlledModel = std::variant<MarkovAdditiveModel, CoupledFadingModel>;

/// Joint model of the planned coordinate and the uncontrolled chain
/// (nullopt: a single fading state). Coordinates independent at equal times
/// compose exactly (controlled index most significant). A Gaussian spatial
/// copula over (controlled_j, uncontrolled_j, controlled_j+1, uncontrolled_j+1)
/// with a nonzero same-time link yields the simulation-only coupled model,
/// which needs a single fading state and no cross-lag or fading-lag terms.
inline ControlledModel assemble_controlled_model(const ControlPlan &plan, const std::optional<Matrix> &uncontrolled,
                                                 const CopulaSpec &spatial, const Matrix &snr, double bandwidth)
{
    const std::size_t nu = uncontrolled ? uncontrolled->rows() : 1;
    if (uncontrolled)
        check_stochastic(*uncontrolled);
    const std::size_t n = plan.states.size() * nu;
    require(snr.rows() == n && snr.cols() == n, Errc::dimension_mismatch, "SNR matrix does not match the joint states");

    bool independent = false;
    double link = 0.0;
    if (auto w = spatial.frechet_weights()) {
        independent = w->p == 1.0;
        require(independent, Errc::unsupported, "spatial copula family has no joint construction");
    } else {
        const Matrix &r = spatial.correlation();
        require(r.rows() == 4, Errc::unsupported, "Gaussian spatial copula must couple two coordinates over two slots");
        link = r(0, 1);
        require(r(2, 3) == link, Errc::unsupported, "same-time correlation must not change between slots");
        const bool no_cross_lag = r(0, 3) == 0.0 && r(1, 2) == 0.0;
        require(no_cross_lag, Errc::unsupported, "cross-lag correlation breaks the no-Granger structure");
        independent = link == 0.0;
        if (!independent) {
            require(!uncontrolled || nu == 1, Errc::unsupported, "coupled fading needs a single fading state");
            require(r(1, 3) == 0.0, Errc::unsupported, "coupled fading needs a memoryless fading latent");
        }
    }
    if (!independent)
        return CoupledFadingModel(plan, link, snr, bandwidth);

    std::vector<Matrix> joint;
    for (const auto &p : plan.transitions)
        joint.push_back(uncontrolled ? kron(p, *uncontrolled) : p);
    std::vector<IncrementLaw> laws;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            laws.emplace_back(RayleighCapacity(bandwidth, snr(i, j)));
    OrderedStateSpace states = uncontrolled ? OrderedStateSpace::indexed(n) : plan.states;
    return MarkovAdditiveModel(std::move(states), std::move(joint), std::move(laws));
}

} // namespace depcap

#endif
