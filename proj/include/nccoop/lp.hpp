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

#ifndef NCCOOP_LP_HPP
#define NCCOOP_LP_HPP

#include <nccoop/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace nccoop {

using Matrix = std::vector<std::vector<double>>;

/// maximize c.x  s.t.  A_eq x = b_eq,  A_ub x <= b_ub,  x >= lower.
struct LinearProgram {
    std::vector<double> c;
    Matrix a_eq;
    std::vector<double> b_eq;
    Matrix a_ub;
    std::vector<double> b_ub;
    std::vector<double> lower;  // empty means all zero

    [[nodiscard]] std::size_t num_vars() const { return c.size(); }

    void validate() const {
        const std::size_t n = c.size();
        if (n == 0) throw ParameterError("LinearProgram: no variables");
        if (a_eq.size() != b_eq.size()) throw ParameterError("LinearProgram: A_eq/b_eq row mismatch");
        if (a_ub.size() != b_ub.size()) throw ParameterError("LinearProgram: A_ub/b_ub row mismatch");
        if (!lower.empty() && lower.size() != n) throw ParameterError("LinearProgram: lower bound length mismatch");
        auto finite = [](double v) { return std::isfinite(v); };
        for (double v : c)
            if (!finite(v)) throw ParameterError("LinearProgram: non-finite objective");
        for (const Matrix* a : {&a_eq, &a_ub})
            for (const auto& row : *a) {
                if (row.size() != n) throw ParameterError("LinearProgram: row length mismatch");
                for (double v : row)
                    if (!finite(v)) throw ParameterError("LinearProgram: non-finite coefficient");
            }
        for (const std::vector<double>* b : {&b_eq, &b_ub, &lower})
            for (double v : *b)
                if (!finite(v)) throw ParameterError("LinearProgram: non-finite bound");
    }
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
    LpStatus status = LpStatus::infeasible;
    std::vector<double> x;
    double value = 0.0;
};

namespace detail {

// Dense tableau for max problems in equality form with nonnegative rhs.
// Row r < m holds the constraint; row m holds reduced costs (negated objective).
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), t_((rows + 1) * (cols + 1), 0.0), basis_(rows) {}

    double& at(std::size_t r, std::size_t c) { return t_[r * (n_ + 1) + c]; }
    double at(std::size_t r, std::size_t c) const { return t_[r * (n_ + 1) + c]; }
    double& rhs(std::size_t r) { return at(r, n_); }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    std::vector<std::size_t>& basis() { return basis_; }

    void pivot(std::size_t pr, std::size_t pc) {
        const double p = at(pr, pc);
        for (std::size_t c = 0; c <= n_; ++c) at(pr, c) /= p;
        for (std::size_t r = 0; r <= m_; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (std::size_t c = 0; c <= n_; ++c) at(r, c) -= f * at(pr, c);
        }
        basis_[pr] = pc;
    }

    // Bland's rule over columns [0, active_cols). Returns false if unbounded.
    bool optimize(std::size_t active_cols, double tol) {
        for (std::size_t iter = 0; iter < 100000; ++iter) {
            std::size_t enter = active_cols;
            for (std::size_t c = 0; c < active_cols; ++c)
                if (at(m_, c) < -tol) {
                    enter = c;
                    break;
                }
            if (enter == active_cols) return true;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < m_; ++r)
                if (at(r, enter) > tol) best = std::min(best, at(r, n_) / at(r, enter));
            std::size_t leave = m_;
            for (std::size_t r = 0; r < m_; ++r) {
                if (at(r, enter) <= tol || at(r, n_) / at(r, enter) > best + tol) continue;
                if (leave == m_ || basis_[r] < basis_[leave]) leave = r;
            }
            if (leave == m_) return false;
            pivot(leave, enter);
        }
        throw InternalError("simplex: iteration limit reached");
    }

private:
    std::size_t m_;
    std::size_t n_;
    std::vector<double> t_;
    std::vector<std::size_t> basis_;
};

}  // namespace detail

/// Two-phase primal simplex on a dense tableau with Bland's anti-cycling rule.
/// Infeasible and unbounded programs are reported through the status.
inline LpResult solve_lp(const LinearProgram& lp, double tol = 1e-9) {
    lp.validate();
    const std::size_t n = lp.num_vars();
    const std::size_t m_eq = lp.a_eq.size();
    const std::size_t m_ub = lp.a_ub.size();
    const std::size_t m = m_eq + m_ub;
    std::vector<double> lower = lp.lower.empty() ? std::vector<double>(n, 0.0) : lp.lower;

    // Columns: n structural, m_ub slacks, m artificials.
    const std::size_t n_struct = n + m_ub;
    const std::size_t n_total = n_struct + m;
    detail::Tableau t(m, n_total);

    auto fill_row = [&](std::size_t r, const std::vector<double>& a, double b, bool slack, std::size_t slack_idx) {
        double rhs = b;
        for (std::size_t j = 0; j < n; ++j) rhs -= a[j] * lower[j];
        const double sign = rhs < 0.0 ? -1.0 : 1.0;
        for (std::size_t j = 0; j < n; ++j) t.at(r, j) = sign * a[j];
        if (slack) t.at(r, n + slack_idx) = sign;
        t.at(r, n_struct + r) = 1.0;
        t.rhs(r) = sign * rhs;
        t.basis()[r] = n_struct + r;
    };
    for (std::size_t i = 0; i < m_eq; ++i) fill_row(i, lp.a_eq[i], lp.b_eq[i], false, 0);
    for (std::size_t i = 0; i < m_ub; ++i) fill_row(m_eq + i, lp.a_ub[i], lp.b_ub[i], true, i);

    // Phase 1: maximize -(sum of artificials).
    for (std::size_t c = 0; c <= n_total; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < m; ++r) s += t.at(r, c);
        t.at(m, c) = c < n_struct ? -s : (c == n_total ? -s : 0.0);
    }
    t.optimize(n_total, tol);
    double infeas = 0.0;
    for (std::size_t r = 0; r < m; ++r)
        if (t.basis()[r] >= n_struct) infeas += t.rhs(r);
    double scale = 1.0;
    for (std::size_t r = 0; r < m; ++r) scale = std::max(scale, std::abs(r < m_eq ? lp.b_eq[r] : lp.b_ub[r - m_eq]));
    if (infeas > tol * scale * 10.0) return {LpStatus::infeasible, {}, 0.0};

    // Drive remaining artificials out of the basis; rows that cannot pivot are redundant.
    std::vector<bool> redundant(m, false);
    for (std::size_t r = 0; r < m; ++r) {
        if (t.basis()[r] < n_struct) continue;
        std::size_t pc = n_struct;
        for (std::size_t c = 0; c < n_struct; ++c)
            if (std::abs(t.at(r, c)) > tol) {
                pc = c;
                break;
            }
        if (pc < n_struct)
            t.pivot(r, pc);
        else
            redundant[r] = true;
    }

    // Phase 2 objective row over structural columns only.
    for (std::size_t c = 0; c <= n_total; ++c) t.at(m, c) = 0.0;
    for (std::size_t j = 0; j < n; ++j) t.at(m, j) = -lp.c[j];
    for (std::size_t r = 0; r < m; ++r) {
        if (redundant[r]) continue;
        const std::size_t b = t.basis()[r];
        const double f = t.at(m, b);
        if (f == 0.0) continue;
        for (std::size_t c = 0; c <= n_total; ++c) t.at(m, c) -= f * t.at(r, c);
    }
    // Redundant rows are all-zero over structural columns, so they never pivot.
    if (!t.optimize(n_struct, tol)) return {LpStatus::unbounded, {}, 0.0};

    LpResult res;
    res.status = LpStatus::optimal;
    res.x = lower;
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t b = t.basis()[r];
        if (!redundant[r] && b < n) res.x[b] += t.rhs(r);
    }
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) res.value += lp.c[j] * res.x[j];
    return res;
}

}  // namespace nccoop

#endif
