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

#ifndef DEPCAP_DEPCAP_HPP
#define DEPCAP_DEPCAP_HPP

#include "bounds.hpp"
#include "channel.hpp"
#include "control.hpp"
#include "copula.hpp"
#include "error.hpp"
#include "io.hpp"
#include "linalg.hpp"
#include "markov.hpp"
#include "model.hpp"
#include "normal.hpp"
#include "order.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "scenario.hpp"
#include "simulate.hpp"
#include "spectral.hpp"

#endif
