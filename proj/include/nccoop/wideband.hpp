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

#ifndef NCCOOP_WIDEBAND_HPP
#define NCCOOP_WIDEBAND_HPP

#include <nccoop/channel.hpp>
#include <nccoop/detail/dual.hpp>
#include <nccoop/detail/search.hpp>
#include <nccoop/error.hpp>
#include <nccoop/narrowband.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace nccoop {

/// Transmission scheme used on one subcarrier.
enum class WidebandScheme { coop_to_1, coop_to_2, coop_swap, noncoop, beamforming };

inline const char* to_string(WidebandScheme s) {
    switch (s) {
        case WidebandScheme::coop_to_1: return "coop-1";
        case WidebandScheme::coop_to_2: return "coop-2";
        case WidebandScheme::coop_swap: return "coop-swap";
        case WidebandScheme::noncoop: return "noncoop";
        case WidebandScheme::beamforming: return "beamforming";
    }
    return "?";
}

/// Weighted rates of the four per-subcarrier power assignments at given
/// per-BTS powers: both BTSs serve mobile 1, both serve mobile 2, each BTS
/// serves the other cell's mobile, each BTS serves its own mobile.
struct SubcarrierRateOptions {
    double r1c = 0.0;
    double r2c = 0.0;
    double r3c = 0.0;
    double rnc = 0.0;

    [[nodiscard]] double of(WidebandScheme s) const {
        switch (s) {
            case WidebandScheme::coop_to_1: return r1c;
            case WidebandScheme::coop_to_2: return r2c;
            case WidebandScheme::coop_swap: return r3c;
            case WidebandScheme::noncoop: return rnc;
            default: throw ParameterError("scheme has no scalar rate option");
        }
    }
};

struct SchemeMask {
    bool coop_to_1 = true;
    bool coop_to_2 = true;
    bool coop_swap = true;
    bool noncoop = true;

    [[nodiscard]] bool allows(WidebandScheme s) const {
        switch (s) {
            case WidebandScheme::coop_to_1: return coop_to_1;
            case WidebandScheme::coop_to_2: return coop_to_2;
            case WidebandScheme::coop_swap: return coop_swap;
            case WidebandScheme::noncoop: return noncoop;
            default: return false;
        }
    }
    [[nodiscard]] bool any() const { return coop_to_1 || coop_to_2 || coop_swap || noncoop; }

    static SchemeMask only_noncoop() { return {false, false, false, true}; }
};

inline constexpr std::array<WidebandScheme, 4> scalar_schemes{WidebandScheme::coop_to_1, WidebandScheme::coop_to_2,
                                                                WidebandScheme::coop_swap, WidebandScheme::noncoop};

inline double noncoop_rate(const NarrowbandGains& g, double p1, double p2, double mu) {
    return std::log2(1.0 + g.g11 * p1 / (1.0 + g.g12 * p2)) + mu * std::log2(1.0 + g.g22 * p2 / (1.0 + g.g21 * p1));
}

inline double swap_rate(const NarrowbandGains& g, double p1, double p2, double mu) {
    return std::log2(1.0 + g.g12 * p2 / (1.0 + g.g11 * p1)) + mu * std::log2(1.0 + g.g21 * p1 / (1.0 + g.g22 * p2));
}

inline SubcarrierRateOptions subcarrier_rate_options(const NarrowbandGains& g, double p1, double p2, double mu) {
    return {std::log2(1.0 + g.g11 * p1 + g.g12 * p2), mu * std::log2(1.0 + g.g21 * p1 + g.g22 * p2),
            swap_rate(g, p1, p2, mu), noncoop_rate(g, p1, p2, mu)};
}

struct SubcarrierBest {
    double value = 0.0;
    WidebandScheme scheme = WidebandScheme::coop_to_1;
};

/// Best of the allowed options; ties go to the earlier scheme.
inline SubcarrierBest subcarrier_best_rate(const NarrowbandGains& g, double p1, double p2, double mu,
                                           const SchemeMask& mask = {}) {
    detail::check_non_negative(p1, "P1");
    detail::check_non_negative(p2, "P2");
    detail::check_non_negative(mu, "mu");
    const SubcarrierRateOptions r = subcarrier_rate_options(g, p1, p2, mu);
    SubcarrierBest best{-std::numeric_limits<double>::infinity(), WidebandScheme::coop_to_1};
    for (WidebandScheme s : scalar_schemes)
        if (mask.allows(s) && r.of(s) > best.value) best = {r.of(s), s};
    if (!mask.any()) throw ParameterError("scheme mask excludes every scheme");
    return best;
}

/// Per-subcarrier search settings for maximizing rate - lambda . P.
struct SearchConfig {
    double cap1 = 100.0;  // box [0, cap1] x [0, cap2]
    double cap2 = 100.0;
    std::size_t n_log = 20;
    double log_ratio = 2.0;
    std::size_t n_lin = 8;
    int refine_rounds = 100;
    int golden_iters = 32;
    double refine_slack = 0.05;  // refine an interference scheme when its grid value is this close
    SchemeMask mask;

    void validate() const {
        detail::check_non_negative(cap1, "cap1");
        detail::check_non_negative(cap2, "cap2");
        if (!(log_ratio > 1.0)) throw ParameterError("log_ratio must exceed 1");
        if (n_log + n_lin < 2) throw ParameterError("search grid needs at least two points");
        if (refine_rounds < 0 || golden_iters < 1) throw ParameterError("invalid refinement settings");
        if (!mask.any()) throw ParameterError("scheme mask excludes every scheme");
    }
};

struct InnerResult {
    double p1 = 0.0;
    double p2 = 0.0;
    double lagrangian_value = 0.0;
    double rate = 0.0;
    WidebandScheme scheme = WidebandScheme::coop_to_1;
    bool unbounded = false;  // a zero multiplier pushed power to the search cap
};

/// Maximizer of max_s R_s(P1, P2) - lambda1 P1 - lambda2 P2 on one subcarrier.
/// Interference-limited options are tabulated on a fixed grid once, so
/// repeated calls with different multipliers only rescan the table.
class SubcarrierSearch {
public:
    SubcarrierSearch(const NarrowbandGains& g, double mu, const SearchConfig& cfg) : g_(g), mu_(mu), cfg_(cfg) {
        g.validate();
        detail::check_non_negative(mu, "mu");
        cfg.validate();
        grid1_ = detail::hybrid_grid(cfg.cap1, cfg.n_log, cfg.n_lin, cfg.log_ratio);
        grid2_ = detail::hybrid_grid(cfg.cap2, cfg.n_log, cfg.n_lin, cfg.log_ratio);
        if (cfg.mask.noncoop) tabulate(nc_, WidebandScheme::noncoop);
        if (cfg.mask.coop_swap) tabulate(sw_, WidebandScheme::coop_swap);
    }

    [[nodiscard]] detail::InnerPoint maximize(double l1, double l2) const {
        detail::InnerPoint best{0, 0, 0, -std::numeric_limits<double>::infinity(), 0};
        auto consider = [&](const detail::InnerPoint& p) {
            if (p.lagrangian > best.lagrangian) best = p;
        };
        if (cfg_.mask.coop_to_1) consider(coop(1.0, g_.g11, g_.g12, l1, l2, WidebandScheme::coop_to_1));
        if (cfg_.mask.coop_to_2) consider(coop(mu_, g_.g21, g_.g22, l1, l2, WidebandScheme::coop_to_2));
        if (cfg_.mask.coop_swap) consider(interference(sw_, WidebandScheme::coop_swap, l1, l2, best.lagrangian));
        if (cfg_.mask.noncoop) consider(interference(nc_, WidebandScheme::noncoop, l1, l2, best.lagrangian));
        return best;
    }

    [[nodiscard]] detail::InnerPoint evaluate(double p1, double p2) const {
        const SubcarrierBest b = subcarrier_best_rate(g_, p1, p2, mu_, cfg_.mask);
        return {p1, p2, b.value, b.value, static_cast<int>(b.scheme)};
    }

    [[nodiscard]] double rate(WidebandScheme s, double p1, double p2) const {
        return s == WidebandScheme::noncoop ? noncoop_rate(g_, p1, p2, mu_) : swap_rate(g_, p1, p2, mu_);
    }

    [[nodiscard]] const SearchConfig& config() const { return cfg_; }

private:
    void tabulate(std::vector<double>& t, WidebandScheme s) const {
        t.resize(grid1_.size() * grid2_.size());
        for (std::size_t i = 0; i < grid1_.size(); ++i)
            for (std::size_t j = 0; j < grid2_.size(); ++j) t[i * grid2_.size() + j] = rate(s, grid1_[i], grid2_[j]);
    }

    // w log2(1 + a P1 + b P2) - l1 P1 - l2 P2 is concave with a linear
    // argument, so its box maximum has one coordinate at 0 or at its cap.
    [[nodiscard]] detail::InnerPoint coop(double w, double a, double b, double l1, double l2,
                                          WidebandScheme s) const {
        auto value = [&](double p1, double p2) { return w * std::log2(1.0 + a * p1 + b * p2) - l1 * p1 - l2 * p2; };
        auto stationary = [&](double gain, double lam, double base, double cap) {
            if (!(gain > 0.0) || !(w > 0.0)) return 0.0;
            if (!(lam > 0.0)) return cap;
            return std::clamp(w / (lam * std::numbers::ln2) - base / gain, 0.0, cap);
        };
        detail::InnerPoint best{0, 0, 0, 0, static_cast<int>(s)};
        auto consider = [&](double p1, double p2) {
            const double v = value(p1, p2);
            if (v > best.lagrangian) best = {p1, p2, v + l1 * p1 + l2 * p2, v, static_cast<int>(s)};
        };
        for (double other : {0.0, cfg_.cap2}) consider(stationary(a, l1, 1.0 + b * other, cfg_.cap1), other);
        for (double other : {0.0, cfg_.cap1}) consider(other, stationary(b, l2, 1.0 + a * other, cfg_.cap2));
        return best;
    }

    [[nodiscard]] detail::InnerPoint interference(const std::vector<double>& t, WidebandScheme s, double l1,
                                                  double l2, double incumbent) const {
        const std::size_t n2 = grid2_.size();
        std::size_t bi = 0, bj = 0;
        double bv = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid1_.size(); ++i) {
            const double c1 = l1 * grid1_[i];
            const double* row = &t[i * n2];
            for (std::size_t j = 0; j < n2; ++j) {
                const double v = row[j] - c1 - l2 * grid2_[j];
                if (v > bv) {
                    bv = v;
                    bi = i;
                    bj = j;
                }
            }
        }
        double x = grid1_[bi], y = grid2_[bj];
        if (bv >= incumbent - cfg_.refine_slack * (1.0 + std::abs(incumbent)) && cfg_.refine_rounds > 0) {
            const double lo1 = x - grid1_[bi == 0 ? 0 : bi - 1], hi1 = grid1_[std::min(bi + 1, grid1_.size() - 1)] - x;
            const double lo2 = y - grid2_[bj == 0 ? 0 : bj - 1], hi2 = grid2_[std::min(bj + 1, n2 - 1)] - y;
            // Coordinate ascent. A bracket doubles when the maximum lands on
            // its edge and halves after a sweep that failed to move.
            double s1 = 1.0, s2 = 1.0;
            auto step = [&](auto&& f, double& z, double& sc, double lo, double hi, double cap) {
                const double a = std::max(0.0, z - sc * lo), b = std::min(cap, z + sc * hi);
                const auto m = detail::golden_max(f, a, b, cfg_.golden_iters);
                if (!(m.value > bv)) {
                    sc *= 0.5;
                    return;
                }
                bv = m.value;
                const double edge = 1e-3 * (b - a);
                if ((m.x - a < edge && a > 0.0) || (b - m.x < edge && b < cap)) sc *= 2.0;
                z = m.x;
            };
            for (int r = 0; r < cfg_.refine_rounds; ++r) {
                const double before = bv;
                step([&](double p) { return rate(s, p, y) - l1 * p - l2 * y; }, x, s1, lo1, hi1, cfg_.cap1);
                step([&](double p) { return rate(s, x, p) - l1 * x - l2 * p; }, y, s2, lo2, hi2, cfg_.cap2);
                if (bv - before <= 1e-12 * (1.0 + std::abs(bv))) break;
            }
        }
        return {x, y, bv + l1 * x + l2 * y, bv, static_cast<int>(s)};
    }

    NarrowbandGains g_;
    double mu_;
    SearchConfig cfg_;
    std::vector<double> grid1_;
    std::vector<double> grid2_;
    std::vector<double> nc_;
    std::vector<double> sw_;
};

inline InnerResult inner_maximize(const NarrowbandGains& g, double lambda1, double lambda2, double mu,
                                  const SearchConfig& cfg = {}) {
    detail::check_non_negative(lambda1, "lambda1");
    detail::check_non_negative(lambda2, "lambda2");
    const detail::InnerPoint p = SubcarrierSearch(g, mu, cfg).maximize(lambda1, lambda2);
    InnerResult r{p.p1, p.p2, p.lagrangian, p.rate, static_cast<WidebandScheme>(p.scheme), false};
    r.unbounded = (lambda1 == 0.0 && cfg.cap1 > 0.0 && p.p1 >= cfg.cap1) ||
                  (lambda2 == 0.0 && cfg.cap2 > 0.0 && p.p2 >= cfg.cap2);
    return r;
}

/// Power allocation over L subcarriers with per-subcarrier schemes and the
/// diagnostics of the search that produced it.
struct WidebandAllocation {
    std::vector<double> p1;
    std::vector<double> p2;
    std::vector<WidebandScheme> scheme;
    std::vector<double> rate;                    // weighted rate contribution per subcarrier
    std::vector<PowerAllocation> split;          // per-stream powers when beamforming
    std::vector<std::array<double, 4>> beta;     // beamforming angles (beta11, beta21, beta12, beta22)
    double value = 0.0;                          // weighted sum rate
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double dual_value = std::numeric_limits<double>::quiet_NaN();
    double duality_gap = std::numeric_limits<double>::quiet_NaN();
    bool weak_duality = true;
    std::optional<double> upper_bound;           // optimum of the high-SNR upper-bound problem
    std::vector<DualIterate> iterates;

    [[nodiscard]] std::size_t size() const { return p1.size(); }
    [[nodiscard]] double total(int k) const {
        const auto& v = k == 1 ? p1 : p2;
        return std::accumulate(v.begin(), v.end(), 0.0);
    }
    [[nodiscard]] double relative_gap() const { return value > 0.0 ? duality_gap / value : duality_gap; }
    [[nodiscard]] bool feasible(const PowerBudget& b, double rel_tol = 1e-3) const {
        for (std::size_t l = 0; l < size(); ++l)
            if (p1[l] < 0.0 || p2[l] < 0.0) return false;
        return total(1) <= b.p1 * (1.0 + rel_tol) + 1e-12 && total(2) <= b.p2 * (1.0 + rel_tol) + 1e-12;
    }
};

namespace detail {

inline void check_scalar(const WidebandChannel& ch, const PowerBudget& b, double mu) {
    ch.validate();
    b.validate();
    check_non_negative(mu, "mu");
    if (ch.mode != ChannelMode::scalar) throw ParameterError("scalar-mode channel required");
}

inline double max_gain(const WidebandChannel& ch) {
    double m = 0.0;
    for (std::size_t l = 0; l < ch.size(); ++l) {
        const auto g = ch.gains(l);
        m = std::max({m, g.g11, g.g21, g.g12, g.g22});
    }
    return m;
}

struct ScalarDualModel {
    std::vector<SubcarrierSearch> subs;
    [[nodiscard]] std::size_t size() const { return subs.size(); }
    [[nodiscard]] InnerPoint maximize(std::size_t l, double l1, double l2) const { return subs[l].maximize(l1, l2); }
    [[nodiscard]] InnerPoint evaluate(std::size_t l, double p1, double p2) const { return subs[l].evaluate(p1, p2); }
};

inline WidebandAllocation from_outcome(const DualOutcome& o) {
    WidebandAllocation a;
    for (const auto& p : o.points) {
        a.p1.push_back(p.p1);
        a.p2.push_back(p.p2);
        a.rate.push_back(p.rate);
        a.scheme.push_back(static_cast<WidebandScheme>(p.scheme));
    }
    a.value = o.primal_value;
    a.lambda1 = o.lambda1;
    a.lambda2 = o.lambda2;
    a.dual_value = o.dual_value;
    a.duality_gap = o.dual_value - o.primal_value;
    a.weak_duality = o.weak_duality;
    a.iterates = o.iterates;
    return a;
}

}  // namespace detail

struct DualSolveConfig {
    SearchConfig search;  // caps are replaced by the total budgets
    DualOptions dual;
};

/// Lagrangian dual of the multicarrier power control problem, solved by
/// nested bisection; each dual evaluation decouples across subcarriers.
inline WidebandAllocation dual_solve(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                     const DualSolveConfig& cfg = {}) {
    detail::check_scalar(ch, budgets, mu);
    SearchConfig sc = cfg.search;
    sc.cap1 = budgets.p1;
    sc.cap2 = budgets.p2;
    detail::ScalarDualModel model;
    model.subs.reserve(ch.size());
    for (std::size_t l = 0; l < ch.size(); ++l) model.subs.emplace_back(ch.gains(l), mu, sc);
    const double gmax = detail::max_gain(ch);
    const double lmax = std::max(1e-300, (1.0 + mu) * gmax / std::numbers::ln2);
    if (!(gmax > 0.0)) {
        WidebandAllocation a;
        a.p1.assign(ch.size(), 0.0);
        a.p2.assign(ch.size(), 0.0);
        a.rate.assign(ch.size(), 0.0);
        a.scheme.assign(ch.size(), WidebandScheme::coop_to_1);
        a.dual_value = 0.0;
        a.duality_gap = 0.0;
        return a;
    }
    detail::NestedBisection<detail::ScalarDualModel> nb(model, budgets, lmax, cfg.dual);
    return detail::from_outcome(nb.solve());
}

/// Weighted sum rate of an allocation, each subcarrier evaluated with its own scheme tag.
inline double sum_rate(const WidebandChannel& ch, const WidebandAllocation& a, double mu) {
    if (ch.mode != ChannelMode::scalar) throw ParameterError("sum_rate: scalar-mode channel required");
    if (a.size() != ch.size() || a.p2.size() != ch.size() || a.scheme.size() != ch.size())
        throw ParameterError("sum_rate: allocation size does not match the channel");
    double s = 0.0;
    for (std::size_t l = 0; l < ch.size(); ++l) s += subcarrier_rate_options(ch.gains(l), a.p1[l], a.p2[l], mu).of(a.scheme[l]);
    return s;
}

namespace detail {

struct WaterLevel {
    double level = 0.0;
    double value = 0.0;  // sum of log2(1 + P/y) in bits
};

/// Water-filling of budget p over noise levels y (infinite entries are unusable).
inline WaterLevel water_fill(std::vector<double> y, double p) {
    std::erase_if(y, [](double v) { return !std::isfinite(v); });
    if (y.empty() || !(p > 0.0)) return {y.empty() ? 0.0 : *std::min_element(y.begin(), y.end()), 0.0};
    std::sort(y.begin(), y.end());
    double sum = 0.0, level = 0.0;
    std::size_t m = 0;
    for (; m < y.size(); ++m) {
        sum += y[m];
        level = (p + sum) / static_cast<double>(m + 1);
        if (m + 1 == y.size() || level <= y[m + 1]) break;
    }
    double value = 0.0;
    for (std::size_t i = 0; i <= m; ++i) value += std::log2(level / y[i]);
    return {level, value};
}

// Convex dual of the upper-bound problem; its inner maximum uses one BTS.
inline double ub_dual(const std::vector<double>& y1, const std::vector<double>& y2, const PowerBudget& b, double l1,
                      double l2, double& t1, double& t2) {
    constexpr double ln2 = std::numbers::ln2;
    auto term = [&](double y, double lam, double& p) {
        p = 0.0;
        if (!std::isfinite(y)) return 0.0;
        const double w = 1.0 / (lam * ln2);
        if (w <= y) return 0.0;
        p = w - y;
        return std::log2(w / y) - lam * p;
    };
    double g = l1 * b.p1 + l2 * b.p2;
    t1 = t2 = 0.0;
    for (std::size_t l = 0; l < y1.size(); ++l) {
        double q1, q2;
        const double v1 = term(y1[l], l1, q1), v2 = term(y2[l], l2, q2);
        if (v1 >= v2) {
            g += v1;
            t1 += q1;
        } else {
            g += v2;
            t2 += q2;
        }
    }
    return g;
}

inline double ub_optimum(const std::vector<double>& y1, const std::vector<double>& y2, const PowerBudget& b) {
    double ymin = std::numeric_limits<double>::infinity();
    for (double v : y1) ymin = std::min(ymin, v);
    for (double v : y2) ymin = std::min(ymin, v);
    if (!std::isfinite(ymin)) return 0.0;
    const double hi0 = std::log(1.0 / (ymin * std::numbers::ln2));
    const double lo0 = hi0 - 60.0;
    // The dual is convex but kinked where a subcarrier switches BTS, so it is
    // minimized by nested golden section rather than by subgradient signs.
    double t1 = 0.0, t2 = 0.0;
    auto inner = [&](double a) {
        return -golden_max([&](double c) { return -ub_dual(y1, y2, b, std::exp(a), std::exp(c), t1, t2); }, lo0, hi0, 120)
                    .value;
    };
    return -golden_max([&](double a) { return -inner(a); }, lo0, hi0, 120).value;
}

}  // namespace detail

/// High-SNR scheme for mu = 1: per subcarrier only the better cooperative MAC
/// is kept, and the bound log2(1 + P1/y1 + P2/y2) with y_k = 1/max_j g_jk is
/// optimized by two-level water-filling. Each subcarrier gets power from at
/// most one BTS; the split between BTSs is the best threshold on y1/y2.
inline WidebandAllocation highsnr_waterfill(const WidebandChannel& ch, const PowerBudget& budgets, double mu = 1.0) {
    detail::check_scalar(ch, budgets, mu);
    if (mu != 1.0) throw ParameterError("highsnr_waterfill is defined for mu = 1 only");
    const std::size_t L = ch.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> y1(L), y2(L);
    for (std::size_t l = 0; l < L; ++l) {
        const auto g = ch.gains(l);
        const double m1 = std::max(g.g11, g.g21), m2 = std::max(g.g12, g.g22);
        y1[l] = m1 > 0.0 ? 1.0 / m1 : inf;
        y2[l] = m2 > 0.0 ? 1.0 / m2 : inf;
    }
    std::vector<std::size_t> order(L);
    std::iota(order.begin(), order.end(), 0);
    auto ratio = [&](std::size_t l) {
        if (!std::isfinite(y1[l])) return inf;
        if (!std::isfinite(y2[l])) return 0.0;
        return y1[l] / y2[l];
    };
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ratio(a) < ratio(b); });

    double best = -1.0;
    std::size_t split = 0;
    detail::WaterLevel w1, w2;
    for (std::size_t s = L + 1; s-- > 0;) {
        std::vector<double> a, b;
        for (std::size_t i = 0; i < L; ++i) (i < s ? a : b).push_back(i < s ? y1[order[i]] : y2[order[i]]);
        const auto f1 = detail::water_fill(a, budgets.p1);
        const auto f2 = detail::water_fill(b, budgets.p2);
        if (f1.value + f2.value > best) {
            best = f1.value + f2.value;
            split = s;
            w1 = f1;
            w2 = f2;
        }
    }

    WidebandAllocation out;
    out.p1.assign(L, 0.0);
    out.p2.assign(L, 0.0);
    out.scheme.assign(L, WidebandScheme::coop_to_1);
    out.rate.assign(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t l = order[i];
        const auto g = ch.gains(l);
        if (i < split) {
            if (std::isfinite(y1[l])) out.p1[l] = std::max(0.0, w1.level - y1[l]);
            if (g.g21 > g.g11) out.scheme[l] = WidebandScheme::coop_to_2;
        } else {
            if (std::isfinite(y2[l])) out.p2[l] = std::max(0.0, w2.level - y2[l]);
            if (g.g22 > g.g12) out.scheme[l] = WidebandScheme::coop_to_2;
        }
        out.rate[l] = subcarrier_rate_options(g, out.p1[l], out.p2[l], 1.0).of(out.scheme[l]);
        out.value += out.rate[l];
    }
    constexpr double ln2 = std::numbers::ln2;
    out.lambda1 = w1.level > 0.0 ? 1.0 / (w1.level * ln2) : 0.0;
    out.lambda2 = w2.level > 0.0 ? 1.0 / (w2.level * ln2) : 0.0;
    out.upper_bound = std::max(out.value, detail::ub_optimum(y1, y2, budgets));
    out.dual_value = *out.upper_bound;
    out.duality_gap = *out.upper_bound - out.value;
    return out;
}

}  // namespace nccoop

#endif
