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

#ifndef NCCOOP_DETAIL_SEARCH_HPP
#define NCCOOP_DETAIL_SEARCH_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace nccoop::detail {

struct Max1d {
    double x = 0.0;
    double value = -1e300;
};

/// Golden-section maximization on [lo, hi]; assumes local unimodality.
template <class F>
Max1d golden_max(F&& f, double lo, double hi, int iters = 48) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? Max1d{c, fc} : Max1d{d, fd};
}

/// Maximize f over a sorted grid, then refine by golden section between the
/// neighbours of the best grid point. Never returns worse than the grid optimum.
template <class F>
Max1d grid_refine_max(F&& f, const std::vector<double>& grid, int iters = 48) {
    Max1d best;
    std::size_t bi = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double v = f(grid[i]);
        if (v > best.value) {
            best = {grid[i], v};
            bi = i;
        }
    }
    if (grid.size() < 2) return best;
    const double lo = grid[bi == 0 ? 0 : bi - 1];
    const double hi = grid[std::min(bi + 1, grid.size() - 1)];
    const Max1d g = golden_max(f, lo, hi, iters);
    return g.value > best.value ? g : best;
}

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = hi;
    return v;
}

/// {0} plus geometric points cap * ratio^-k (k = n_log..1) plus a uniform grid
/// up to cap, sorted and de-duplicated. Covers small water-filling powers and
/// concentrated allocations with few points.
inline std::vector<double> hybrid_grid(double cap, std::size_t n_log, std::size_t n_lin, double ratio = 3.0) {
    std::vector<double> v{0.0};
    if (!(cap > 0.0)) return v;
    double x = cap;
    for (std::size_t k = 0; k < n_log; ++k) {
        x /= ratio;
        v.push_back(x);
    }
    for (std::size_t i = 1; i <= n_lin; ++i) v.push_back(cap * static_cast<double>(i) / static_cast<double>(n_lin));
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

}  // namespace nccoop::detail

#endif
