// Copyright 2026 The Qudit Control Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qudit/common.hpp"

namespace qudit {

struct LbfgsOptions {
    int max_iterations = 500;
    int memory = 20;
    double gradient_tolerance = 1e-9;   // on the infinity norm
    double function_tolerance = 1e-14;  // relative decrease over one iteration
    double armijo = 1e-4;
    int max_backtracks = 40;
};

struct LbfgsResult {
    RVec x;
    double f = 0.0;
    int iterations = 0;
    int evaluations = 0;
    std::string stop_reason;
};

/// Objective returning f(x) and writing the gradient into `grad`.
using ObjectiveFn = std::function<double(const RVec& x, RVec& grad)>;
/// Called after each accepted step; return false to stop.
using IterationFn = std::function<bool(int iteration, double f, const RVec& x, const RVec& grad)>;

/// Limited-memory BFGS with backtracking (Armijo) line search. Every accepted
/// step strictly decreases f.
LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, RVec x0, const LbfgsOptions& opts,
                           const IterationFn& on_iteration = {});

}  // namespace qudit
