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

#ifndef DEPCAP_MODEL_HPP
#define DEPCAP_MODEL_HPP

#include "channel.hpp"
#include "error.hpp"
#include "linalg.hpp"
#include "markov.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace depcap {

/// Finite-state Markov additive process: a modulating chain J_t and, on each
/// transition i -> j, an increment drawn from law(i, j). A time-indexed model
/// uses transitions[k] for the step k -> k+1 and repeats the last matrix
/// beyond the supplied horizon.
class MarkovAdditiveModel {
public:
    MarkovAdditiveModel(OrderedStateSpace states, std::vector<Matrix> transitions, std::vector<IncrementLaw> laws)
        : states_(std::move(states)), transitions_(std::move(transitions)), laws_(std::move(laws))
    {
        const std::size_t n = states_.size();
        require(!transitions_.empty(), Errc::invalid_argument, "model needs at least one transition matrix");
        for (const auto &p : transitions_) {
            require(p.rows() == n && p.cols() == n, Errc::dimension_mismatch, "transition matrix does not match states");
            check_stochastic(p);
        }
        require(laws_.size() == n * n, Errc::dimension_mismatch, "need one increment law per transition");
        if (is_irreducible(transitions_.back()))
            stationary_ = stationary_distribution(transitions_.back());
    }

    MarkovAdditiveModel(Matrix p, std::vector<IncrementLaw> laws)
        : MarkovAdditiveModel(OrderedStateSpace::indexed(p.rows()), std::vector<Matrix>{std::move(p)}, std::move(laws))
    {
    }

    /// Rayleigh capacity on every transition; snr(i, j) applies to i -> j.
    static MarkovAdditiveModel rayleigh(Matrix p, const Matrix &snr, double bandwidth)
    {
        require(snr.rows() == p.rows() && snr.cols() == p.cols(), Errc::dimension_mismatch, "SNR matrix shape");
        std::vector<IncrementLaw> laws;
        for (std::size_t i = 0; i < p.rows(); ++i)
            for (std::size_t j = 0; j < p.cols(); ++j)
                laws.emplace_back(RayleighCapacity(bandwidth, snr(i, j)));
        return {std::move(p), std::move(laws)};
    }

    static MarkovAdditiveModel single_state(IncrementLaw law)
    {
        return {Matrix::identity(1), std::vector<IncrementLaw>{std::move(law)}};
    }

    std::size_t size() const noexcept { return states_.size(); }
    const OrderedStateSpace &states() const noexcept { return states_; }
    const std::vector<Matrix> &transitions() const noexcept { return transitions_; }
    const Matrix &transition(std::size_t step) const { return transitions_[std::min(step, transitions_.size() - 1)]; }

    /// The matrix that governs the chain in the long run.
    const Matrix &steady_transition() const noexcept { return transitions_.back(); }
    bool homogeneous() const noexcept { return transitions_.size() == 1; }

    const IncrementLaw &law(std::size_t i, std::size_t j) const { return laws_[i * size() + j]; }
    const std::vector<IncrementLaw> &laws() const noexcept { return laws_; }

    bool ergodic() const noexcept { return stationary_.has_value(); }

    const MarginalDistribution &stationary() const
    {
        require(stationary_.has_value(), Errc::non_ergodic, "model chain is reducible; no unique stationary law");
        return *stationary_;
    }

    /// sum_ij w_i p_ij E[C_ij] for the steady matrix.
    double mean_increment(const MarginalDistribution &w) const
    {
        require(w.size() == size(), Errc::dimension_mismatch, "distribution does not match states");
        const Matrix &p = steady_transition();
        double m = 0.0;
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (p(i, j) > 0.0)
                    m += w[i] * p(i, j) * capacity_mean(law(i, j));
        return m;
    }

    double mean_increment() const { return mean_increment(stationary()); }

    /// Smallest essential increment over transitions the steady chain can take.
    double min_increment() const
    {
        double m = std::numeric_limits<double>::infinity();
        const Matrix &p = steady_transition();
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = 0; j < size(); ++j)
                if (p(i, j) > 0.0)
                    m = std::min(m, support_min(law(i, j)));
        return m;
    }

private:
    OrderedStateSpace states_;
    std::vector<Matrix> transitions_;
    std::vector<IncrementLaw> laws_;
    std::optional<MarginalDistribution> stationary_;
};

} // namespace depcap

#endif
