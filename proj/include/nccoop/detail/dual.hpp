// SPDX-License-Identifier: Apache-2.0
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

#ifndef NCCOOP_DETAIL_DUAL_HPP
#define NCCOOP_DETAIL_DUAL_HPP

#include <nccoop/channel.hpp>
#include <nccoop/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace nccoop {

/// One evaluation of the dual function during the bisection search.
struct DualIterate {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double dual_value = 0.0;
    double total1 = 0.0;
    double total2 = 0.0;
};

/// Settings of the nested bisection over (lambda1, lambda2).
struct DualOptions {
    double eps_lambda = 1e-6;    // relative width at which a bisection stops
    double power_tol = 1e-4;     // relative budget mismatch accepted for early exit
    double monotone_tol = 0.05;  // allowed non-monotone power response, relative to budget
    double lambda_floor = 1e-12; // smallest lambda tried, relative to lambda_max
    int fill_steps = 32;
    double weak_duality_tol = 1e-6;  // relative; covers the inner search resolution

    void validate() const {
        if (!(eps_lambda > 0.0 && eps_lambda < 1.0)) throw ParameterError("eps_lambda must be in (0,1)");
        if (!(power_tol >= 0.0)) throw ParameterError("power_tol must be non-negative");
        if (!(monotone_tol >= 0.0)) throw ParameterError("monotone_tol must be non-negative");
        if (!(lambda_floor > 0.0 && lambda_floor < 1.0)) throw ParameterError("lambda_floor must be in (0,1)");
        if (fill_steps < 0) throw ParameterError("fill_steps must be non-negative");
        if (!(weak_duality_tol >= 0.0)) throw ParameterError("weak_duality_tol must be non-negative");
    }
};

namespace detail {

/// Per-subcarrier maximizer of rate - lambda1 P1 - lambda2 P2.
struct InnerPoint {
    double p1 = 0.0;
    double p2 = 0.0;
    double rate = 0.0;
    double lagrangian = 0.0;
    int scheme = 0;
    std::size_t index = 0;  // model-specific handle, e.g. a table entry
};

struct DualOutcome {
    std::vector<InnerPoint> points;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double dual_value = 0.0;
    double primal_value = 0.0;
    bool weak_duality = true;
    std::vector<DualIterate> iterates;
};

/// Nested bisection on log(lambda): the outer loop sets lambda1, the inner
/// loop finds lambda2 meeting the BTS 2 budget. Model must provide
///   size(), maximize(l, lambda1, lambda2) -> InnerPoint,
///   evaluate(l, p1, p2) -> InnerPoint (rate and scheme at fixed powers).
template <class Model>
class NestedBisection {
public:
    NestedBisection(const Model& model, PowerBudget budgets, double lambda_max, DualOptions opt)
        : model_(model), b_(budgets), lmax_(lambda_max), opt_(opt), pts_(model.size()) {
        opt_.validate();
        budgets.validate();
        if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) throw ParameterError("lambda_max must be positive");
        best_.assign(model.size(), InnerPoint{});
    }

    DualOutcome solve() {
        const double lo0 = std::log(lmax_ * opt_.lambda_floor);
        const double hi0 = std::log(lmax_);
        double l1;
        std::vector<std::pair<double, double>> trace;
        if (b_.p1 <= 0.0) {
            l1 = hi0;
            inner(l1);
        } else {
            l1 = lo0;
            inner(lo0);
        }
        if (b_.p1 > 0.0 && total1_ > b_.p1) {
            double lo = lo0, hi = hi0;
            trace.emplace_back(lo0, total1_);
            l1 = hi;
            bool exact = false;
            while (hi - lo > opt_.eps_lambda) {
                const double mid = 0.5 * (lo + hi);
                inner(mid);
                trace.emplace_back(mid, total1_);
                if (std::abs(total1_ - b_.p1) <= opt_.power_tol * b_.p1) {
                    l1 = mid;
                    exact = true;
                    break;
                }
                (total1_ > b_.p1 ? lo : hi) = mid;
            }
            if (!exact) {
                l1 = hi;
                inner(l1);
                trace.emplace_back(l1, total1_);
            }
            check_monotone(trace, b_.p1, "BTS 1");
        }
        DualOutcome out;
        out.lambda1 = std::exp(l1);
        out.lambda2 = last_lambda2_;
        fill();
        out.points = best_;
        out.primal_value = 0.0;
        for (const auto& p : best_) out.primal_value += p.rate;
        out.dual_value = iterates_.empty() ? out.primal_value : iterates_.front().dual_value;
        for (const auto& it : iterates_) {
            out.dual_value = std::min(out.dual_value, it.dual_value);
            if (it.dual_value < out.primal_value - opt_.weak_duality_tol * std::max(1.0, out.primal_value))
                out.weak_duality = false;
        }
        out.iterates = std::move(iterates_);
        return out;
    }

private:
    // Evaluates the Lagrangian at (exp(a), exp(b)); records the iterate and
    // keeps the best budget-feasible allocation seen so far.
    void eval(double a, double b) {
        const double l1 = std::exp(a), l2 = std::exp(b);
        double lag = 0.0, rate = 0.0, t1 = 0.0, t2 = 0.0;
        for (std::size_t l = 0; l < pts_.size(); ++l) {
            pts_[l] = model_.maximize(l, l1, l2);
            lag += pts_[l].lagrangian;
            rate += pts_[l].rate;
            t1 += pts_[l].p1;
            t2 += pts_[l].p2;
        }
        total1_ = t1;
        total2_ = t2;
        iterates_.push_back({l1, l2, lag + l1 * b_.p1 + l2 * b_.p2, t1, t2});
        if (t1 <= b_.p1 && t2 <= b_.p2 && rate > best_value_) {
            best_value_ = rate;
            best_ = pts_;
        }
    }

    void inner(double a) {
        const double lo0 = std::log(lmax_ * opt_.lambda_floor);
        const double hi0 = std::log(lmax_);
        if (b_.p2 <= 0.0) {
            eval(a, hi0);
            last_lambda2_ = lmax_;
            return;
        }
        eval(a, lo0);
        if (total2_ <= b_.p2) {
            last_lambda2_ = std::exp(lo0);
            return;
        }
        std::vector<std::pair<double, double>> trace{{lo0, total2_}};
        double lo = lo0, hi = hi0;
        while (hi - lo > opt_.eps_lambda) {
            const double mid = 0.5 * (lo + hi);
            eval(a, mid);
            trace.emplace_back(mid, total2_);
            if (std::abs(total2_ - b_.p2) <= opt_.power_tol * b_.p2) {
                last_lambda2_ = std::exp(mid);
                check_monotone(trace, b_.p2, "BTS 2");
                return;
            }
            (total2_ > b_.p2 ? lo : hi) = mid;
        }
        eval(a, hi);
        trace.emplace_back(hi, total2_);
        last_lambda2_ = std::exp(hi);
        check_monotone(trace, b_.p2, "BTS 2");
    }

    void check_monotone(std::vector<std::pair<double, double>> trace, double budget, const char* who) const {
        std::sort(trace.begin(), trace.end());
        double run_min = trace.empty() ? 0.0 : trace.front().second;
        for (const auto& [lam, total] : trace) {
            if (total > run_min + opt_.monotone_tol * budget)
                throw SearchResolutionError(std::string("dual search: total power of ") + who +
                                            " increased with its multiplier near lambda = " +
                                            std::to_string(std::exp(lam)) +
                                            "; refine the inner search grid (more grid points or refinement rounds)");
            run_min = std::min(run_min, total);
        }
    }

    // Spends leftover budget in equal chunks on the subcarrier with the
    // largest rate increase.
    void fill() {
        if (opt_.fill_steps == 0) return;
        double t1 = 0.0, t2 = 0.0;
        for (const auto& p : best_) {
            t1 += p.p1;
            t2 += p.p2;
        }
        const double c1 = std::max(0.0, b_.p1 - t1) / opt_.fill_steps;
        const double c2 = std::max(0.0, b_.p2 - t2) / opt_.fill_steps;
        for (int s = 0; s < opt_.fill_steps; ++s) {
            for (int k = 1; k <= 2; ++k) {
                const double c = k == 1 ? c1 : c2;
                if (!(c > 0.0)) continue;
                double gain = 0.0;
                std::size_t arg = best_.size();
                InnerPoint cand;
                for (std::size_t l = 0; l < best_.size(); ++l) {
                    const InnerPoint q = k == 1 ? model_.evaluate(l, best_[l].p1 + c, best_[l].p2)
                                                : model_.evaluate(l, best_[l].p1, best_[l].p2 + c);
                    if (q.rate - best_[l].rate > gain) {
                        gain = q.rate - best_[l].rate;
                        arg = l;
                        cand = q;
                    }
                }
                if (arg < best_.size()) best_[arg] = cand;
            }
        }
    }

    const Model& model_;
    PowerBudget b_;
    double lmax_;
    DualOptions opt_;
    std::vector<InnerPoint> pts_;
    std::vector<InnerPoint> best_;
    double best_value_ = 0.0;
    double total1_ = 0.0;
    double total2_ = 0.0;
    double last_lambda2_ = 0.0;
    std::vector<DualIterate> iterates_;
};

}  // namespace detail
}  // namespace nccoop

#endif
