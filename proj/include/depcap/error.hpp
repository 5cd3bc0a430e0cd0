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

#ifndef DEPCAP_ERROR_HPP
#define DEPCAP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace depcap {

// Error classes. The CLI maps each class onto a process exit code.
enum class Errc {
    invalid_argument,     // precondition violated by the caller
    config,               // malformed scenario / file input
    dimension_mismatch,
    not_psd,              // correlation matrix is not positive semi-definite
    infeasible_copula,    // copula + marginals admit no stochastic matrix
    zero_mass_state,
    non_ergodic,
    non_irreducible,
    non_convergence,
    quadrature_divergence,
    unstable_queue,       // mean capacity does not exceed the arrival rate
    no_root,              // deterministic surplus, adjustment coefficient is infinite
    no_feasible_rate,
    marginal_mismatch,
    enumeration_too_large,
    unsupported,
    empty_sample,
};

inline const char *errc_name(Errc c) noexcept
{
    switch (c) {
    case Errc::invalid_argument: return "InvalidArgument";
    case Errc::config: return "ConfigError";
    case Errc::dimension_mismatch: return "DimensionMismatch";
    case Errc::not_psd: return "NonPSDCorrelation";
    case Errc::infeasible_copula: return "InfeasibleCopula";
    case Errc::zero_mass_state: return "ZeroMassState";
    case Errc::non_ergodic: return "NonErgodic";
    case Errc::non_irreducible: return "NonIrreducible";
    case Errc::non_convergence: return "NonConvergence";
    case Errc::quadrature_divergence: return "QuadratureDivergence";
    case Errc::unstable_queue: return "UnstableQueue";
    case Errc::no_root: return "NoRoot";
    case Errc::no_feasible_rate: return "NoFeasibleRate";
    case Errc::marginal_mismatch: return "MarginalMismatch";
    case Errc::enumeration_too_large: return "EnumerationTooLarge";
    case Errc::unsupported: return "Unsupported";
    case Errc::empty_sample: return "EmptySample";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string &what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

inline void require(bool cond, Errc code, const char *what)
{
    if (!cond)
        throw Error(code, what);
}

} // namespace depcap

#endif
