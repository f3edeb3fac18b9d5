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

#ifndef NCCOOP_BASELINES_HPP
#define NCCOOP_BASELINES_HPP

#include <nccoop/beamforming.hpp>
#include <nccoop/channel.hpp>
#include <nccoop/detail/search.hpp>
#include <nccoop/error.hpp>
#include <nccoop/narrowband.hpp>
#include <nccoop/wideband.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

namespace nccoop {

/// Each BTS serves only its own mobile, with powers P11 <= P1 and P22 <= P2.
struct NoncoopResult {
    double value = 0.0;
    RatePair rates;
    double p1 = 0.0;  // P11
    double p2 = 0.0;  // P22
};

enum class NoncoopMode { sumrate, frontier };

inline RatePair noncoop_rates(const NarrowbandGains& g, double p1, double p2) {
    return rate_pair(g, {p1, 0.0, 0.0, p2});
}

/// Joint power control without data sharing: maximizes R1 + mu R2 over
/// [0, P1] x [0, P2] by grid search plus coordinate refinement.
inline NoncoopResult noncoop_power_control(const NarrowbandGains& g, const PowerBudget& b, double mu,
                                           SearchConfig cfg = {}) {
    b.validate();
    cfg.cap1 = b.p1;
    cfg.cap2 = b.p2;
    cfg.mask = SchemeMask::only_noncoop();
    cfg.refine_slack = std::numeric_limits<double>::infinity();
    const detail::InnerPoint p = SubcarrierSearch(g, mu, cfg).maximize(0.0, 0.0);
    NoncoopResult r{0.0, noncoop_rates(g, p.p1, p.p2), p.p1, p.p2};
    r.value = r.rates.weighted(mu);
    return r;
}

/// Largest R2 of the noncooperative scheme at R1 = r1_target. The SINR of
/// mobile 2 increases with P22 once P11 is set to just meet the target, so
/// P22 is as large as the budgets allow.
inline NoncoopResult noncoop_frontier_point(const NarrowbandGains& g, const PowerBudget& b, double r1_target) {
    g.validate();
    b.validate();
    const double r1max = std::log2(1.0 + g.g11 * b.p1);
    if (!(r1_target >= -1e-12 && r1_target <= r1max + 1e-12))
        throw ParameterError("noncoop_frontier_point: R1 target outside [0, log2(1 + g11 P1)]");
    const double s = std::exp2(std::clamp(r1_target, 0.0, r1max)) - 1.0;
    double p22 = b.p2;
    if (s > 0.0 && g.g12 > 0.0) p22 = std::clamp((g.g11 * b.p1 / s - 1.0) / g.g12, 0.0, b.p2);
    const double p11 = s > 0.0 ? std::min(b.p1, s * (1.0 + g.g12 * p22) / g.g11) : 0.0;
    NoncoopResult r{0.0, noncoop_rates(g, p11, p22), p11, p22};
    r.value = r.rates.r2;
    return r;
}

inline NoncoopResult noncoop_power_control(const NarrowbandGains& g, const PowerBudget& b, double mu_or_r1,
                                           NoncoopMode mode) {
    return mode == NoncoopMode::sumrate ? noncoop_power_control(g, b, mu_or_r1) : noncoop_frontier_point(g, b, mu_or_r1);
}

inline std::vector<NoncoopResult> noncoop_frontier(const NarrowbandGains& g, const PowerBudget& b,
                                                   std::size_t n_points = 101) {
    if (n_points < 2) throw ParameterError("noncoop_frontier: n_points must be at least 2");
    const double r1max = std::log2(1.0 + g.g11 * b.p1);
    std::vector<NoncoopResult> out;
    for (std::size_t i = 0; i < n_points; ++i)
        out.push_back(noncoop_frontier_point(g, b, r1max * static_cast<double>(i) / static_cast<double>(n_points - 1)));
    return out;
}

/// Wideband noncooperative reference: equal budgets Ptot_k / L per
/// subcarrier, joint power control on each subcarrier.
inline WidebandAllocation noncoop_wideband(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                           const SearchConfig& cfg = {}) {
    detail::check_scalar(ch, budgets, mu);
    const double L = static_cast<double>(ch.size());
    const PowerBudget per{budgets.p1 / L, budgets.p2 / L};
    WidebandAllocation a;
    for (std::size_t l = 0; l < ch.size(); ++l) {
        const NoncoopResult r = noncoop_power_control(ch.gains(l), per, mu, cfg);
        a.p1.push_back(r.p1);
        a.p2.push_back(r.p2);
        a.scheme.push_back(WidebandScheme::noncoop);
        a.rate.push_back(r.value);
        a.value += r.value;
    }
    return a;
}

/// Noncooperative transmission with power allocated across subcarriers by the dual search.
inline WidebandAllocation noncoop_wideband_dual(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                                DualSolveConfig cfg = {}) {
    cfg.search.mask = SchemeMask::only_noncoop();
    return dual_solve(ch, budgets, mu, cfg);
}

/// Equal power on every subcarrier, best scheme per subcarrier.
inline WidebandAllocation equal_power_coop(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                           const SchemeMask& mask = {}) {
    detail::check_scalar(ch, budgets, mu);
    const std::size_t L = ch.size();
    WidebandAllocation a;
    a.p1.assign(L, budgets.p1 / static_cast<double>(L));
    a.p2.assign(L, budgets.p2 / static_cast<double>(L));
    for (std::size_t l = 0; l < L; ++l) {
        const SubcarrierBest b = subcarrier_best_rate(ch.gains(l), a.p1[l], a.p2[l], mu, mask);
        a.scheme.push_back(b.scheme);
        a.rate.push_back(b.value);
        a.value += b.value;
    }
    return a;
}

/// Zero-forcing without cooperation: BTS k beams to its own mobile inside the
/// null space of the cross channel, at full power.
inline RatePair zf_rate_pair(const MisoChannel& ch, const PowerBudget& b) {
    ch.validate();
    b.validate();
    const NarrowbandGains g = ch.gains();
    const double s1 = std::sin(ch.alpha(1)), s2 = std::sin(ch.alpha(2));
    return {std::log2(1.0 + g.g11 * s1 * s1 * b.p1), std::log2(1.0 + g.g22 * s2 * s2 * b.p2)};
}

struct NoncoopBfResult {
    double rate = 0.0;
    RatePair rates;
    BeamConfig config;  // P21 = P12 = 0
};

/// Joint beamforming and power control without message sharing: each BTS
/// serves its own mobile; beta11, beta22, P11 <= P1 and P22 <= P2 are
/// optimized by multi-start coordinate ascent.
inline NoncoopBfResult noncoop_nullspace_bf(const MisoChannel& ch, const PowerBudget& b, double mu,
                                            const BfSearchConfig& cfg = {}) {
    ch.validate();
    b.validate();
    detail::check_non_negative(mu, "mu");
    cfg.validate();
    const NarrowbandGains g = ch.gains();
    const double a1 = ch.alpha(1), a2 = ch.alpha(2);
    using X = std::array<double, 4>;  // beta11, beta22, q1, q2
    auto rates = [&](const X& x) {
        const double p11 = x[2] * b.p1, p22 = x[3] * b.p2;
        const double s1 = g.g11 * detail::cos2(x[0] - a1) * p11, i1 = g.g12 * detail::cos2(x[1]) * p22;
        const double s2 = g.g22 * detail::cos2(x[1] - a2) * p22, i2 = g.g21 * detail::cos2(x[0]) * p11;
        return RatePair{std::log2(1.0 + s1 / (1.0 + i1)), std::log2(1.0 + s2 / (1.0 + i2))};
    };
    auto f = [&](const X& x) { return rates(x).weighted(mu); };
    const auto angle_grid = detail::linspace(0.0, half_pi, cfg.n_angle);
    const auto power_grid = detail::linspace(0.0, 1.0, cfg.n_power);
    const std::array<X, 4> starts{{{half_pi, half_pi, 1.0, 1.0}, {a1, a2, 1.0, 1.0}, {a1, half_pi, 1.0, 0.0},
                                   {half_pi, a2, 0.0, 1.0}}};
    double best = -1.0;
    X arg{};
    for (X x : starts) {
        double v = f(x);
        for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
            const double start = v;
            for (int i : {2, 3, 0, 1}) {
                const auto m = detail::grid_refine_max(
                    [&](double t) {
                        X y = x;
                        y[i] = t;
                        return f(y);
                    },
                    i < 2 ? angle_grid : power_grid);
                if (m.value > v) {
                    v = m.value;
                    x[i] = m.x;
                }
            }
            if (v - start < cfg.tol) break;
        }
        if (v > best) {
            best = v;
            arg = x;
        }
    }
    NoncoopBfResult r;
    r.rates = rates(arg);
    r.rate = r.rates.weighted(mu);
    r.config = {arg[0], half_pi, half_pi, arg[1], {arg[2] * b.p1, 0.0, 0.0, arg[3] * b.p2}, a1, a2};
    return r;
}

inline std::vector<NoncoopBfResult> noncoop_nullspace_bf_frontier(const MisoChannel& ch, const PowerBudget& b,
                                                                  const std::vector<double>& mu_list,
                                                                  const BfSearchConfig& cfg = {}) {
    if (mu_list.empty()) throw ParameterError("noncoop_nullspace_bf_frontier: mu_list must not be empty");
    std::vector<NoncoopBfResult> out;
    for (double mu : mu_list) out.push_back(noncoop_nullspace_bf(ch, b, mu, cfg));
    return out;
}

/// Wideband null-space transmission: every beam zero-forces the cross
/// channel, and each BTS water-fills its budget over the effective gains
/// g_kk sin^2(alpha_k) of its own mobile.
inline WidebandAllocation noncoop_nullspace_bf(const WidebandChannel& ch, const PowerBudget& budgets, double mu) {
    detail::check_miso(ch, budgets, mu);
    const std::size_t L = ch.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> y1(L), y2(L);
    for (std::size_t l = 0; l < L; ++l) {
        const NarrowbandGains g = ch.miso[l].gains();
        const double s1 = std::sin(ch.miso[l].alpha(1)), s2 = std::sin(ch.miso[l].alpha(2));
        const double e1 = g.g11 * s1 * s1, e2 = g.g22 * s2 * s2;
        y1[l] = e1 > 1e-300 ? 1.0 / e1 : inf;
        y2[l] = e2 > 1e-300 ? 1.0 / e2 : inf;
    }
    const auto w1 = detail::water_fill(y1, budgets.p1);
    const auto w2 = detail::water_fill(y2, budgets.p2);
    WidebandAllocation a;
    for (std::size_t l = 0; l < L; ++l) {
        const double p1 = std::isfinite(y1[l]) && budgets.p1 > 0.0 ? std::max(0.0, w1.level - y1[l]) : 0.0;
        const double p2 = std::isfinite(y2[l]) && budgets.p2 > 0.0 ? std::max(0.0, w2.level - y2[l]) : 0.0;
        const double r = (p1 > 0.0 ? std::log2(1.0 + p1 / y1[l]) : 0.0) + mu * (p2 > 0.0 ? std::log2(1.0 + p2 / y2[l]) : 0.0);
        a.p1.push_back(p1);
        a.p2.push_back(p2);
        a.scheme.push_back(WidebandScheme::noncoop);
        a.rate.push_back(r);
        a.split.push_back({p1, 0.0, 0.0, p2});
        a.beta.push_back({half_pi, half_pi, half_pi, half_pi});
        a.value += r;
    }
    constexpr double ln2 = std::numbers::ln2;
    a.lambda1 = w1.level > 0.0 ? 1.0 / (w1.level * ln2) : 0.0;
    a.lambda2 = w2.level > 0.0 ? 1.0 / (w2.level * ln2) : 0.0;
    return a;
}

/// Approximate coherent-cooperation reference: both BTSs act as one
/// transmitter with a sum-power budget. Per subcarrier it either
/// zero-forces the stacked channel (one stream per mobile) or beams to a
/// single mobile with maximum ratio; powers are water-filled over all
/// streams with one multiplier.
struct CoherentResult {
    double value = 0.0;
    std::string label = "approximate coherent baseline";
};

namespace detail {

struct CoherentModes {
    // gains of (stream to mobile 1, stream to mobile 2) for ZF, MRT to 1, MRT to 2
    std::array<std::array<double, 2>, 3> gain{};
};

inline CoherentModes coherent_modes(std::span<const Complex> h1, std::span<const Complex> h2) {
    const double n1 = squared_norm(h1), n2 = squared_norm(h2);
    const double c = std::norm(inner(h1, h2));
    const double det = n1 * n2 - c;
    CoherentModes m;
    if (det > 1e-12 * n1 * n2) m.gain[0] = {det / n2, det / n1};
    m.gain[1] = {n1, 0.0};
    m.gain[2] = {0.0, n2};
    return m;
}

}  // namespace detail

inline CoherentResult coherent_upper_baseline(const WidebandChannel& ch, const PowerBudget& budgets, double mu) {
    ch.validate();
    budgets.validate();
    detail::check_non_negative(mu, "mu");
    std::vector<detail::CoherentModes> modes;
    for (std::size_t l = 0; l < ch.size(); ++l) {
        CVector h1, h2;
        if (ch.mode == ChannelMode::scalar) {
            const NarrowbandGains g = ch.scalar[l];
            h1 = {std::sqrt(g.g11), std::sqrt(g.g12)};
            h2 = {std::sqrt(g.g21), std::sqrt(g.g22)};
        } else {
            const MisoChannel& h = ch.miso[l];
            h1 = h.h11;
            h1.insert(h1.end(), h.h12.begin(), h.h12.end());
            h2 = h.h21;
            h2.insert(h2.end(), h.h22.begin(), h.h22.end());
        }
        modes.push_back(detail::coherent_modes(h1, h2));
    }
    const double ptot = budgets.p1 + budgets.p2;
    const std::array<double, 2> w{1.0, mu};
    constexpr double ln2 = std::numbers::ln2;
    double gmax = 0.0;
    for (const auto& m : modes)
        for (const auto& gm : m.gain) gmax = std::max({gmax, gm[0], gm[1]});
    if (!(ptot > 0.0) || !(gmax > 0.0)) return {};
    // For a multiplier lam, each subcarrier picks its best mode for the
    // Lagrangian; power is weighted water-filling inside the mode.
    auto evaluate = [&](double lam, double& power) {
        double value = 0.0;
        power = 0.0;
        for (const auto& m : modes) {
            double best_lag = 0.0, best_val = 0.0, best_pow = 0.0;
            for (const auto& gm : m.gain) {
                double lag = 0.0, val = 0.0, pw = 0.0;
                for (int j = 0; j < 2; ++j) {
                    if (!(gm[j] > 0.0) || !(w[j] > 0.0)) continue;
                    const double p = std::max(0.0, w[j] / (lam * ln2) - 1.0 / gm[j]);
                    const double r = w[j] * std::log2(1.0 + gm[j] * p);
                    lag += r - lam * p;
                    val += r;
                    pw += p;
                }
                if (lag > best_lag) {
                    best_lag = lag;
                    best_val = val;
                    best_pow = pw;
                }
            }
            value += best_val;
            power += best_pow;
        }
        return value;
    };
    double lo = std::log((1.0 + mu) * gmax / ln2) - 80.0, hi = std::log((1.0 + mu) * gmax / ln2);
    double value = 0.0, power = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        evaluate(std::exp(mid), power);
        (power > ptot ? lo : hi) = mid;
    }
    value = evaluate(std::exp(hi), power);
    return {value};
}

}  // namespace nccoop

#endif
