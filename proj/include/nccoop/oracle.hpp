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

#ifndef NCCOOP_ORACLE_HPP
#define NCCOOP_ORACLE_HPP

// Brute-force reference implementations used to validate the optimizers.
// Slow on purpose; they share only the rate formulas with the solvers.

#include <nccoop/channel.hpp>
#include <nccoop/error.hpp>
#include <nccoop/lp.hpp>
#include <nccoop/narrowband.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace nccoop::oracle {

struct GridPoint {
    double value = 0.0;  // R2 for grid_frontier, R1 + mu R2 for grid_sum_rate
    PowerAllocation alloc;
};

/// Lattice search for max R2 at R1 = r1_target.
///
/// Three of the four powers run over an n_grid lattice on [0, P_k] and the
/// fourth is solved from the R1 equation, so every sample meets the rate
/// constraint exactly (a rate bin of width zero). Six sweeps are merged: solve
/// for each of the four powers with the other three on the lattice, and solve
/// for P11 or P12 with the owning BTS saturated. The result is feasible, hence a lower bound on the
/// true frontier; its deficit is governed by the lattice step.
inline GridPoint grid_frontier(const NarrowbandGains& g, const PowerBudget& b, double r1_target, std::size_t n_grid) {
    if (n_grid < 10) throw ParameterError("grid_frontier: n_grid must be at least 10");
    g.validate();
    b.validate();
    const double s = std::exp2(r1_target) - 1.0;
    const double eps1 = 1e-12 * std::max(1.0, b.p1);
    const double eps2 = 1e-12 * std::max(1.0, b.p2);
    std::vector<double> l1(n_grid), l2(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        l1[i] = b.p1 * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        l2[i] = b.p2 * static_cast<double>(i) / static_cast<double>(n_grid - 1);
    }

    double best_ratio = -1.0;
    PowerAllocation best;
    auto consider = [&](double p11, double p21, double p12, double p22) {
        const double ratio = (g.g21 * p21 + g.g22 * p22) / (1.0 + g.g21 * p11 + g.g22 * p12);
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = {p11, p21, p12, p22};
        }
    };

    if (g.g11 > 0.0) {
        for (std::size_t j = 0; j < n_grid; ++j)          // P21
            for (std::size_t a = 0; a < n_grid; ++a)      // P12
                for (std::size_t c = 0; a + c < n_grid; ++c) {  // P22
                    const double p21 = l1[j], p12 = l2[a], p22 = l2[c];
                    const double p11 = (s * (1.0 + g.g11 * p21 + g.g12 * p22) - g.g12 * p12) / g.g11;
                    if (p11 >= -eps1 && p11 + p21 <= b.p1 + eps1) consider(std::max(p11, 0.0), p21, p12, p22);
                }
        for (std::size_t a = 0; a < n_grid; ++a)
            for (std::size_t c = 0; a + c < n_grid; ++c) {
                const double p12 = l2[a], p22 = l2[c];
                const double p11 = (s * (1.0 + g.g11 * b.p1 + g.g12 * p22) - g.g12 * p12) / (g.g11 * (1.0 + s));
                if (p11 >= -eps1 && p11 <= b.p1 + eps1) {
                    const double q = std::clamp(p11, 0.0, b.p1);
                    consider(q, b.p1 - q, p12, p22);
                }
            }
    }
    if (g.g12 > 0.0) {
        for (std::size_t i = 0; i < n_grid; ++i)          // P11
            for (std::size_t j = 0; i + j < n_grid; ++j)  // P21
                for (std::size_t c = 0; c < n_grid; ++c) {  // P22
                    const double p11 = l1[i], p21 = l1[j], p22 = l2[c];
                    const double p12 = (s * (1.0 + g.g11 * p21 + g.g12 * p22) - g.g11 * p11) / g.g12;
                    if (p12 >= -eps2 && p12 + p22 <= b.p2 + eps2) consider(p11, p21, std::max(p12, 0.0), p22);
                }
        for (std::size_t i = 0; i < n_grid; ++i)
            for (std::size_t j = 0; i + j < n_grid; ++j) {
                const double p11 = l1[i], p21 = l1[j];
                const double p12 = (s * (1.0 + g.g11 * p21 + g.g12 * b.p2) - g.g11 * p11) / (g.g12 * (1.0 + s));
                if (p12 >= -eps2 && p12 <= b.p2 + eps2) {
                    const double q = std::clamp(p12, 0.0, b.p2);
                    consider(p11, p21, q, b.p2 - q);
                }
            }
    }
    // Interference-side solves: P21 or P22 from the R1 equation (needs s > 0).
    if (s > 0.0 && g.g11 > 0.0) {
        for (std::size_t i = 0; i < n_grid; ++i)          // P11
            for (std::size_t a = 0; a < n_grid; ++a)      // P12
                for (std::size_t c = 0; a + c < n_grid; ++c) {  // P22
                    const double p11 = l1[i], p12 = l2[a], p22 = l2[c];
                    const double p21 = ((g.g11 * p11 + g.g12 * p12) / s - 1.0 - g.g12 * p22) / g.g11;
                    if (p21 >= -eps1 && p11 + p21 <= b.p1 + eps1) consider(p11, std::max(p21, 0.0), p12, p22);
                }
    }
    if (s > 0.0 && g.g12 > 0.0) {
        for (std::size_t i = 0; i < n_grid; ++i)          // P11
            for (std::size_t j = 0; i + j < n_grid; ++j)  // P21
                for (std::size_t a = 0; a < n_grid; ++a) {  // P12
                    const double p11 = l1[i], p21 = l1[j], p12 = l2[a];
                    const double p22 = ((g.g11 * p11 + g.g12 * p12) / s - 1.0 - g.g11 * p21) / g.g12;
                    if (p22 >= -eps2 && p12 + p22 <= b.p2 + eps2) consider(p11, p21, p12, std::max(p22, 0.0));
                }
    }
    if (best_ratio < 0.0) throw InternalError("grid_frontier: no lattice sample meets the R1 target");
    return {std::log2(1.0 + best_ratio), best};
}

/// Lattice maximum of R1 + mu R2 over an n_grid^4 lattice pruned by the
/// per-BTS budgets. Ties keep the first point in lexicographic lattice order.
inline GridPoint grid_sum_rate(const NarrowbandGains& g, const PowerBudget& b, double mu, std::size_t n_grid) {
    if (n_grid < 2) throw ParameterError("grid_sum_rate: n_grid must be at least 2");
    g.validate();
    b.validate();
    std::vector<double> l1(n_grid), l2(n_grid);
    for (std::size_t i = 0; i < n_grid; ++i) {
        l1[i] = b.p1 * static_cast<double>(i) / static_cast<double>(n_grid - 1);
        l2[i] = b.p2 * static_cast<double>(i) / static_cast<double>(n_grid - 1);
    }
    // For mu = 1 the objective is log2 of a product, so the product is compared directly.
    const bool product_form = mu == 1.0;
    double best = -std::numeric_limits<double>::infinity();
    PowerAllocation arg;
    for (std::size_t i = 0; i < n_grid; ++i)
        for (std::size_t j = 0; i + j < n_grid; ++j) {
            const double p11 = l1[i], p21 = l1[j];
            for (std::size_t a = 0; a < n_grid; ++a)
                for (std::size_t c = 0; a + c < n_grid; ++c) {
                    const double p12 = l2[a], p22 = l2[c];
                    const double i1 = 1.0 + g.g11 * p21 + g.g12 * p22;
                    const double i2 = 1.0 + g.g21 * p11 + g.g22 * p12;
                    const double t1 = (i1 + g.g11 * p11 + g.g12 * p12) / i1;
                    const double t2 = (i2 + g.g21 * p21 + g.g22 * p22) / i2;
                    const double v = product_form ? t1 * t2 : std::log2(t1) + mu * std::log2(t2);
                    if (v > best) {
                        best = v;
                        arg = {p11, p21, p12, p22};
                    }
                }
        }
    return {product_form ? std::log2(best) : best, arg};
}

/// Central-difference gradient of f at x with step h. Coordinates whose
/// two-sided stencil leaves [lower, upper] fall back to a one-sided difference.
inline std::vector<double> finite_diff_stationarity(const std::function<double(const std::vector<double>&)>& f,
                                                    std::vector<double> x, double h,
                                                    const std::vector<double>& lower = {},
                                                    const std::vector<double>& upper = {}) {
    if (!(h > 0.0)) throw ParameterError("finite_diff_stationarity: step must be positive");
    std::vector<double> grad(x.size());
    const double f0 = f(x);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double lo = lower.empty() ? -std::numeric_limits<double>::infinity() : lower[i];
        const double hi = upper.empty() ? std::numeric_limits<double>::infinity() : upper[i];
        const double xi = x[i];
        const bool can_minus = xi - h >= lo;
        const bool can_plus = xi + h <= hi;
        double fp = f0, fm = f0, span = 0.0;
        if (can_plus) {
            x[i] = xi + h;
            fp = f(x);
            span += h;
        }
        if (can_minus) {
            x[i] = xi - h;
            fm = f(x);
            span += h;
        }
        x[i] = xi;
        grad[i] = span > 0.0 ? (fp - fm) / span : 0.0;
    }
    return grad;
}

namespace detail {

// Solves the square system M y = r by Gaussian elimination with partial
// pivoting; returns nullopt if singular.
inline std::optional<std::vector<double>> solve_square(Matrix m, std::vector<double> r) {
    const std::size_t n = r.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t row = col + 1; row < n; ++row)
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        if (std::abs(m[piv][col]) < 1e-11) return std::nullopt;
        std::swap(m[piv], m[col]);
        std::swap(r[piv], r[col]);
        for (std::size_t row = col + 1; row < n; ++row) {
            const double f = m[row][col] / m[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) m[row][c] -= f * m[col][c];
            r[row] -= f * r[col];
        }
    }
    std::vector<double> y(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = r[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= m[i][c] * y[c];
        y[i] = s / m[i][i];
    }
    return y;
}

// Removes linearly dependent rows of [A | b]; returns false if inconsistent.
inline bool reduce_rows(Matrix& a, std::vector<double>& b) {
    Matrix kept;
    std::vector<double> kb;
    Matrix echelon;  // rows of kept in reduced form, with pivot columns
    std::vector<std::size_t> pivots;
    std::vector<double> eb;
    for (std::size_t r = 0; r < a.size(); ++r) {
        std::vector<double> row = a[r];
        double rb = b[r];
        for (std::size_t e = 0; e < echelon.size(); ++e) {
            const double f = row[pivots[e]] / echelon[e][pivots[e]];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < row.size(); ++c) row[c] -= f * echelon[e][c];
            rb -= f * eb[e];
        }
        std::size_t pc = row.size();
        double mag = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c)
            if (std::abs(row[c]) > mag) {
                mag = std::abs(row[c]);
                pc = c;
            }
        if (mag < 1e-10) {
            if (std::abs(rb) > 1e-9) return false;
            continue;
        }
        echelon.push_back(row);
        pivots.push_back(pc);
        eb.push_back(rb);
        kept.push_back(a[r]);
        kb.push_back(b[r]);
    }
    a = std::move(kept);
    b = std::move(kb);
    return true;
}

// Best objective over all basic feasible solutions of {A x = b, x >= 0}.
inline std::optional<std::pair<double, std::vector<double>>> enumerate_vertices(const Matrix& a,
                                                                                const std::vector<double>& b,
                                                                                const std::vector<double>& c,
                                                                                double tol) {
    const std::size_t m = a.size();
    const std::size_t n = c.size();
    std::optional<std::pair<double, std::vector<double>>> best;
    if (m == 0) {
        // Only x = 0 is basic.
        return std::make_pair(0.0, std::vector<double>(n, 0.0));
    }
    if (m > n) return std::nullopt;
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    while (true) {
        Matrix sq(m, std::vector<double>(m));
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t k = 0; k < m; ++k) sq[r][k] = a[r][idx[k]];
        if (auto y = solve_square(sq, b)) {
            bool ok = true;
            for (double v : *y)
                if (v < -tol) ok = false;
            if (ok) {
                std::vector<double> x(n, 0.0);
                double val = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    x[idx[k]] = std::max((*y)[k], 0.0);
                    val += c[idx[k]] * x[idx[k]];
                }
                if (!best || val > best->first) best = std::make_pair(val, x);
            }
        }
        // next combination
        std::size_t i = m;
        while (i > 0 && idx[i - 1] == n - m + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t k = i; k < m; ++k) idx[k] = idx[k - 1] + 1;
    }
    return best;
}

}  // namespace detail

/// Vertex-enumeration LP oracle: converts to equality form with slacks and
/// evaluates every basic feasible solution. Unboundedness is detected by
/// enumerating the extreme rays of the recession cone (normalized by sum = 1).
inline LpResult simplex_vertex_enum(const LinearProgram& lp, double tol = 1e-9) {
    lp.validate();
    const std::size_t n = lp.num_vars();
    const std::size_t m_ub = lp.a_ub.size();
    if (lp.a_eq.size() + m_ub > 8) throw ParameterError("simplex_vertex_enum: at most 8 constraints");
    const std::vector<double> lower = lp.lower.empty() ? std::vector<double>(n, 0.0) : lp.lower;
    const std::size_t nn = n + m_ub;
    Matrix a;
    std::vector<double> b;
    std::vector<double> c(nn, 0.0);
    for (std::size_t j = 0; j < n; ++j) c[j] = lp.c[j];
    auto push = [&](const std::vector<double>& row, double rhs, std::optional<std::size_t> slack) {
        std::vector<double> r(nn, 0.0);
        double shifted = rhs;
        for (std::size_t j = 0; j < n; ++j) {
            r[j] = row[j];
            shifted -= row[j] * lower[j];
        }
        if (slack) r[n + *slack] = 1.0;
        a.push_back(r);
        b.push_back(shifted);
    };
    for (std::size_t i = 0; i < lp.a_eq.size(); ++i) push(lp.a_eq[i], lp.b_eq[i], std::nullopt);
    for (std::size_t i = 0; i < m_ub; ++i) push(lp.a_ub[i], lp.b_ub[i], i);

    Matrix ar = a;
    std::vector<double> br = b;
    if (!detail::reduce_rows(ar, br)) return {LpStatus::infeasible, {}, 0.0};
    const auto vert = detail::enumerate_vertices(ar, br, c, tol);
    if (!vert) return {LpStatus::infeasible, {}, 0.0};

    // Recession cone {d >= 0, A d = 0}, normalized by sum(d) = 1.
    Matrix cone = a;
    std::vector<double> zero(a.size(), 0.0);
    cone.push_back(std::vector<double>(nn, 1.0));
    zero.push_back(1.0);
    if (detail::reduce_rows(cone, zero)) {
        if (const auto ray = detail::enumerate_vertices(cone, zero, c, tol); ray && ray->first > tol)
            return {LpStatus::unbounded, {}, 0.0};
    }

    LpResult res;
    res.status = LpStatus::optimal;
    res.x.resize(n);
    res.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        res.x[j] = vert->second[j] + lower[j];
        res.value += lp.c[j] * res.x[j];
    }
    return res;
}

}  // namespace nccoop::oracle

#endif
