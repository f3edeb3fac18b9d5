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

#ifndef NCCOOP_NARROWBAND_HPP
#define NCCOOP_NARROWBAND_HPP

#include <nccoop/channel.hpp>
#include <nccoop/error.hpp>
#include <nccoop/lp.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace nccoop {

/// Power P_jk that BTS k spends on the message for mobile j.
struct PowerAllocation {
    double p11 = 0.0;
    double p21 = 0.0;
    double p12 = 0.0;
    double p22 = 0.0;

    [[nodiscard]] double bts_total(int k) const { return k == 1 ? p11 + p21 : p12 + p22; }

    [[nodiscard]] bool feasible(const PowerBudget& b, double tol = 1e-9) const {
        return p11 >= -tol && p21 >= -tol && p12 >= -tol && p22 >= -tol && bts_total(1) <= b.p1 + tol &&
               bts_total(2) <= b.p2 + tol;
    }

    bool operator==(const PowerAllocation&) const = default;
};

/// Achievable rates in bits per channel use.
struct RatePair {
    double r1 = 0.0;
    double r2 = 0.0;

    [[nodiscard]] double weighted(double mu) const { return r1 + mu * r2; }
};

/// Regime of a frontier point: both BTSs at full power, or each BTS
/// serving exactly one message.
enum class Regime { full_power, exclusive };

inline const char* to_string(Regime r) { return r == Regime::full_power ? "full-power" : "exclusive"; }

struct FrontierPoint {
    RatePair rates;
    PowerAllocation alloc;
    Regime regime = Regime::full_power;
};

/// Noncoherent two-MAC rates: each mobile decodes both halves of its message
/// and treats the other mobile's streams as noise.
inline RatePair rate_pair(const NarrowbandGains& g, const PowerAllocation& p) {
    const double s1 = g.g11 * p.p11 + g.g12 * p.p12;
    const double i1 = g.g11 * p.p21 + g.g12 * p.p22;
    const double s2 = g.g21 * p.p21 + g.g22 * p.p22;
    const double i2 = g.g21 * p.p11 + g.g22 * p.p12;
    return {std::log2(1.0 + s1 / (1.0 + i1)), std::log2(1.0 + s2 / (1.0 + i2))};
}

inline double weighted_rate(const NarrowbandGains& g, const PowerAllocation& p, double mu) {
    return rate_pair(g, p).weighted(mu);
}

/// Upper end of the valid range of R_j: both BTSs at full power to mobile j.
inline double max_single_rate(const NarrowbandGains& g, const PowerBudget& b, int j) {
    return std::log2(1.0 + g.gain(j, 1) * b.p1 + g.gain(j, 2) * b.p2);
}

inline double snr_product(const RatePair& r) { return (std::exp2(r.r1) - 1.0) * (std::exp2(r.r2) - 1.0); }

struct RegimeCheck {
    Regime regime = Regime::full_power;
    bool satisfied = false;
};

/// Structural test on a frontier allocation: full power at both BTSs when
/// (2^R1-1)(2^R2-1) <= 1, otherwise P_1k * P_2k = 0 at both BTSs.
inline RegimeCheck regime_check(const NarrowbandGains& g, const PowerBudget& b, const PowerAllocation& p,
                                double tol = 1e-6) {
    const RatePair r = rate_pair(g, p);
    RegimeCheck out;
    if (snr_product(r) <= 1.0) {
        out.regime = Regime::full_power;
        out.satisfied = std::abs(p.bts_total(1) - b.p1) <= tol * std::max(1.0, b.p1) &&
                        std::abs(p.bts_total(2) - b.p2) <= tol * std::max(1.0, b.p2);
    } else {
        out.regime = Regime::exclusive;
        out.satisfied = p.p11 * p.p21 <= tol * std::max(1.0, b.p1 * b.p1) &&
                        p.p12 * p.p22 <= tol * std::max(1.0, b.p2 * b.p2);
    }
    return out;
}

namespace detail {

inline PowerAllocation clean_allocation(PowerAllocation p, const PowerBudget& b) {
    auto clip = [](double v, double hi) { return std::clamp(v, 0.0, hi); };
    p.p11 = clip(p.p11, b.p1);
    p.p21 = clip(p.p21, b.p1);
    p.p12 = clip(p.p12, b.p2);
    p.p22 = clip(p.p22, b.p2);
    // Rescale if rounding pushed a BTS marginally over its budget.
    if (p.bts_total(1) > b.p1 && p.bts_total(1) > 0.0) {
        const double s = b.p1 / p.bts_total(1);
        p.p11 *= s;
        p.p21 *= s;
    }
    if (p.bts_total(2) > b.p2 && p.bts_total(2) > 0.0) {
        const double s = b.p2 / p.bts_total(2);
        p.p12 *= s;
        p.p22 *= s;
    }
    return p;
}

inline FrontierPoint make_point(const NarrowbandGains& g, const PowerAllocation& p) {
    FrontierPoint fp{rate_pair(g, p), p, Regime::full_power};
    fp.regime = snr_product(fp.rates) <= 1.0 ? Regime::full_power : Regime::exclusive;
    return fp;
}

}  // namespace detail

/// Maximum R2 subject to R1 = r1_target, via the linear program obtained from
/// the linear-fractional problem by the substitution P_jk = Pt_jk / Z with
/// Z = 1 + g21 P11 + g22 P12. Variables: (Pt11, Pt21, Pt12, Pt22, Z).
inline FrontierPoint frontier_point(const NarrowbandGains& g, const PowerBudget& b, double r1_target,
                                    double tol = 1e-9) {
    g.validate();
    b.validate();
    detail::check_finite(r1_target, "R1 target");
    const double r1_max = max_single_rate(g, b, 1);
    const double slack = 1e-12 * std::max(1.0, r1_max);
    if (r1_target < -slack || r1_target > r1_max + slack)
        throw ParameterError("frontier_point: R1 target outside [0, log2(1 + g11 P1 + g12 P2)]");

    if (r1_target <= 0.0) return detail::make_point(g, {0.0, b.p1, 0.0, b.p2});
    if (r1_target >= r1_max) return detail::make_point(g, {b.p1, 0.0, b.p2, 0.0});

    const double s = std::exp2(r1_target) - 1.0;
    LinearProgram lp;
    lp.c = {0.0, g.g21, 0.0, g.g22, 0.0};
    lp.a_eq = {{g.g11, -s * g.g11, g.g12, -s * g.g12, -s}, {g.g21, 0.0, g.g22, 0.0, 1.0}};
    lp.b_eq = {0.0, 1.0};
    lp.a_ub = {{1.0, 1.0, 0.0, 0.0, -b.p1}, {0.0, 0.0, 1.0, 1.0, -b.p2}};
    lp.b_ub = {0.0, 0.0};
    const LpResult res = solve_lp(lp, tol);
    if (res.status != LpStatus::optimal) throw InternalError("frontier_point: LP not optimal for an in-range target");
    const double z = res.x[4];
    if (!(z > 0.0)) throw InternalError("frontier_point: LP returned Z <= 0");
    const PowerAllocation p = detail::clean_allocation({res.x[0] / z, res.x[1] / z, res.x[2] / z, res.x[3] / z}, b);
    return detail::make_point(g, p);
}

/// n_points frontier points at uniformly spaced R1 targets over the valid range.
inline std::vector<FrontierPoint> frontier(const NarrowbandGains& g, const PowerBudget& b, std::size_t n_points = 101) {
    if (n_points < 2) throw ParameterError("frontier: n_points must be at least 2");
    const double r1_max = max_single_rate(g, b, 1);
    std::vector<FrontierPoint> pts;
    pts.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double t = i + 1 == n_points ? r1_max : r1_max * static_cast<double>(i) / static_cast<double>(n_points - 1);
        pts.push_back(frontier_point(g, b, t));
    }
    return pts;
}

// Candidate ids for weighted-sum-rate maximization. Corners first, in the
// order (P11,P21,P12,P22) = (P1,0,P2,0), (0,P1,0,P2), (0,P1,P2,0), (P1,0,0,P2);
// then the stationary families (x,0,0,P2), (0,P1,x,0), (P1,0,0,x), (0,x,P2,0).
enum CandidateId : int {
    corner_coop_to_1 = 0,
    corner_coop_to_2 = 1,
    corner_swapped = 2,
    corner_noncoop = 3,
    stationary_p11 = 4,
    stationary_p12 = 5,
    stationary_p22 = 6,
    stationary_p21 = 7,
};

inline constexpr int num_candidates = 8;

inline bool is_corner(int id) { return id >= 0 && id < 4; }

inline PowerAllocation corner_allocation(const PowerBudget& b, int id) {
    switch (id) {
        case corner_coop_to_1: return {b.p1, 0.0, b.p2, 0.0};
        case corner_coop_to_2: return {0.0, b.p1, 0.0, b.p2};
        case corner_swapped: return {0.0, b.p1, b.p2, 0.0};
        case corner_noncoop: return {b.p1, 0.0, 0.0, b.p2};
        default: throw ParameterError("corner_allocation: id must be in 0..3");
    }
}

/// Allocation of stationary family `id` with the free power set to x.
inline PowerAllocation stationary_family(const PowerBudget& b, int id, double x) {
    switch (id) {
        case stationary_p11: return {x, 0.0, 0.0, b.p2};
        case stationary_p12: return {0.0, b.p1, x, 0.0};
        case stationary_p22: return {b.p1, 0.0, 0.0, x};
        case stationary_p21: return {0.0, x, b.p2, 0.0};
        default: throw ParameterError("stationary_family: id must be in 4..7");
    }
}

/// Upper limit of the free power of stationary family `id`.
inline double stationary_range(const PowerBudget& b, int id) {
    return id == stationary_p11 || id == stationary_p21 ? b.p1 : b.p2;
}

/// Interior stationary point of family `id`, if the maximizing root of its
/// first-order condition is real and lies strictly inside (0, P_k).
///
/// Each family has weighted rate f(x) = ws log(1 + a x) + wi log(1 + c / (1 + d x)),
/// whose derivative has the sign of A2 x^2 + A1 x + A0 with
/// A2 = ws a d^2, A1 = ws a d (2 + c) - wi a c d, A0 = ws a (1 + c) - wi c d.
/// A2 > 0, so the smaller root is the local maximum.
inline std::optional<PowerAllocation> stationary_candidate(const NarrowbandGains& g, const PowerBudget& b, double mu,
                                                           int id) {
    double ws = 1.0, a = 0.0, wi = mu, c = 0.0, d = 0.0;
    switch (id) {
        case stationary_p11: ws = 1.0, a = g.g11 / (1.0 + g.g12 * b.p2), wi = mu, c = g.g22 * b.p2, d = g.g21; break;
        case stationary_p12: ws = 1.0, a = g.g12 / (1.0 + g.g11 * b.p1), wi = mu, c = g.g21 * b.p1, d = g.g22; break;
        case stationary_p22: ws = mu, a = g.g22 / (1.0 + g.g21 * b.p1), wi = 1.0, c = g.g11 * b.p1, d = g.g12; break;
        case stationary_p21: ws = mu, a = g.g21 / (1.0 + g.g22 * b.p2), wi = 1.0, c = g.g12 * b.p2, d = g.g11; break;
        default: throw ParameterError("stationary_candidate: id must be in 4..7");
    }
    const double a2 = ws * a * d * d;
    const double a1 = ws * a * d * (2.0 + c) - wi * a * c * d;
    const double a0 = ws * a * (1.0 + c) - wi * c * d;
    if (!(a2 > 0.0)) return std::nullopt;
    const double disc = a1 * a1 - 4.0 * a2 * a0;
    if (disc < 0.0) return std::nullopt;
    const double q = -0.5 * (a1 + std::copysign(std::sqrt(disc), a1));
    double root;
    if (q == 0.0)
        root = 0.0;
    else
        root = std::min(q / a2, a0 / q);
    const double hi = stationary_range(b, id);
    if (!(root > 0.0 && root < hi)) return std::nullopt;
    return stationary_family(b, id, root);
}

struct WeightedSumRateResult {
    double rate = 0.0;
    PowerAllocation alloc;
    int candidate_id = 0;
    RatePair rates;
};

/// Maximizes R1 + mu R2 over the four corner allocations and, for mu != 1,
/// the interior stationary points. Ties resolve to the lowest candidate id.
inline WeightedSumRateResult max_weighted_sum_rate(const NarrowbandGains& g, const PowerBudget& b, double mu) {
    g.validate();
    b.validate();
    detail::check_non_negative(mu, "mu");
    WeightedSumRateResult best;
    best.rate = -1.0;
    auto consider = [&](const PowerAllocation& p, int id) {
        const RatePair r = rate_pair(g, p);
        const double v = r.weighted(mu);
        if (v > best.rate + 1e-12 * std::max(1.0, std::abs(best.rate))) best = {v, p, id, r};
    };
    for (int id = 0; id < 4; ++id) consider(corner_allocation(b, id), id);
    if (mu != 1.0)
        for (int id = 4; id < num_candidates; ++id)
            if (auto p = stationary_candidate(g, b, mu, id)) consider(*p, id);
    return best;
}

}  // namespace nccoop

#endif
