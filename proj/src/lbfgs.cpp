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

#include "qudit/lbfgs.hpp"

#include <cmath>
#include <deque>

namespace qudit {

LbfgsResult lbfgs_minimize(const ObjectiveFn& fn, RVec x0, const LbfgsOptions& opts,
                           const IterationFn& on_iteration) {
    LbfgsResult res;
    RVec x = std::move(x0);
    RVec g(x.size());
    double f = fn(x, g);
    res.evaluations = 1;

    std::deque<RVec> s_hist, y_hist;
    std::deque<double> rho_hist;
    RVec g_new(x.size());

    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        if (g.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) {
            res.stop_reason = "gradient tolerance";
            break;
        }
        // Two-loop recursion for the quasi-Newton direction.
        RVec q = g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[i] = rho_hist[i] * s_hist[i].dot(q);
            q -= alpha[i] * y_hist[i];
        }
        double gamma = 1.0;
        if (!s_hist.empty()) gamma = s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        else gamma = 1.0 / std::max(g.norm(), 1e-300);
        RVec dir = gamma * q;
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(dir);
            dir += (alpha[i] - beta) * s_hist[i];
        }
        dir = -dir;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            // Not a descent direction: reset memory and fall back to steepest descent.
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            dir = -g / std::max(g.norm(), 1e-300);
            slope = g.dot(dir);
        }

        double step = 1.0;
        bool accepted = false;
        RVec x_new;
        double f_new = f;
        for (int ls = 0; ls < opts.max_backtracks; ++ls) {
            x_new = x + step * dir;
            f_new = fn(x_new, g_new);
            ++res.evaluations;
            if (std::isfinite(f_new) && f_new <= f + opts.armijo * step * slope && f_new < f) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            res.stop_reason = "line search failed";
            break;
        }

        RVec s = x_new - x;
        RVec y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-16 * s.norm() * y.norm()) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opts.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        const double decrease = f - f_new;
        x = std::move(x_new);
        g = g_new;
        f = f_new;
        if (on_iteration && !on_iteration(it + 1, f, x, g)) {
            ++it;
            res.stop_reason = "stopped by callback";
            break;
        }
        if (decrease <= opts.function_tolerance * std::max(std::abs(f), 1.0)) {
            ++it;
            res.stop_reason = "function tolerance";
            break;
        }
    }
    if (res.stop_reason.empty()) res.stop_reason = "iteration limit";
    res.x = std::move(x);
    res.f = f;
    res.iterations = it;
    return res;
}

}  // namespace qudit
