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

#ifndef NCCOOP_BEAMFORMING_HPP
#define NCCOOP_BEAMFORMING_HPP

#include <nccoop/channel.hpp>
#include <nccoop/detail/dual.hpp>
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
#include <vector>

namespace nccoop {

inline constexpr double half_pi = std::numbers::pi / 2.0;

/// Beam angles and stream powers of one MISO channel use. beta_jk is the
/// angle of the beam BTS k uses for mobile j, measured from the cross
/// channel: beta = alpha_k is maximum-ratio, beta = pi/2 is zero-forcing.
struct BeamConfig {
    double beta11 = half_pi;
    double beta21 = half_pi;
    double beta12 = half_pi;
    double beta22 = half_pi;
    PowerAllocation power;
    double alpha1 = 0.0;
    double alpha2 = 0.0;

    [[nodiscard]] double beta(int j, int k) const {
        if (k == 1) return j == 1 ? beta11 : beta21;
        return j == 1 ? beta12 : beta22;
    }

    void validate() const {
        for (double b : {beta11, beta21, beta12, beta22})
            if (!(b >= 0.0 && b <= half_pi + 1e-12)) throw ParameterError("beam angles must lie in [0, pi/2]");
        for (double p : {power.p11, power.p21, power.p12, power.p22}) detail::check_non_negative(p, "stream power");
    }
};

/// Unit beam v = cos(beta) a + sin(beta) b, where a is the cross-channel
/// direction phase-aligned with h_own and b the normalized component of h_own
/// orthogonal to it. Then |h_own^H v|^2 = |h_own|^2 cos^2(beta - alpha) and
/// |h_cross^H v|^2 = |h_cross|^2 cos^2(beta).
inline CVector beamformer_from_angle(std::span<const Complex> h_own, std::span<const Complex> h_cross, double beta) {
    if (h_own.size() != h_cross.size() || h_own.size() < 2) throw ParameterError("beamformer: vectors of length >= 2 required");
    detail::check_finite(beta, "beta");
    const double no = std::sqrt(detail::squared_norm(h_own));
    const double nc = std::sqrt(detail::squared_norm(h_cross));
    if (!(no > 0.0) || !(nc > 0.0)) throw DegenerateInputError("beamformer: zero channel vector");
    const std::size_t n = h_own.size();
    CVector c(n), a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = h_cross[i] / nc;
    Complex proj{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) proj += std::conj(c[i]) * h_own[i] / no;
    const Complex phase = std::abs(proj) > 0.0 ? proj / std::abs(proj) : Complex{1.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = c[i] * phase;
        b[i] = h_own[i] / no - c[i] * proj;
    }
    double nb = std::sqrt(detail::squared_norm(b));
    if (nb < 1e-12) {
        // Parallel channels: any unit vector orthogonal to the cross channel.
        std::size_t m = 0;
        for (std::size_t i = 1; i < n; ++i)
            if (std::abs(c[i]) < std::abs(c[m])) m = i;
        for (std::size_t i = 0; i < n; ++i) b[i] = (i == m ? 1.0 : 0.0) - c[i] * std::conj(c[m]);
        nb = std::sqrt(detail::squared_norm(b));
    }
    CVector v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = std::cos(beta) * a[i] + std::sin(beta) * b[i] / nb;
    return v;
}

namespace detail {

inline double cos2(double x) {
    const double c = std::cos(x);
    return c * c;
}

/// Weighted rate over the six free variables of a full-power configuration:
/// x = (beta11, beta21, beta12, beta22, t1, t2), P11 = t1 P1, P12 = t2 P2.
struct BfObjective {
    NarrowbandGains g;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
    double mu = 1.0;

    using X = std::array<double, 6>;

    [[nodiscard]] RatePair rates(const X& x) const {
        const double p11 = x[4] * p1, p21 = (1.0 - x[4]) * p1, p12 = x[5] * p2, p22 = (1.0 - x[5]) * p2;
        const double s1 = g.g11 * cos2(x[0] - alpha1) * p11 + g.g12 * cos2(x[2] - alpha2) * p12;
        const double i1 = g.g11 * cos2(x[1]) * p21 + g.g12 * cos2(x[3]) * p22;
        const double s2 = g.g21 * cos2(x[1] - alpha1) * p21 + g.g22 * cos2(x[3] - alpha2) * p22;
        const double i2 = g.g21 * cos2(x[0]) * p11 + g.g22 * cos2(x[2]) * p12;
        return {std::log2(1.0 + s1 / (1.0 + i1)), std::log2(1.0 + s2 / (1.0 + i2))};
    }
    [[nodiscard]] double operator()(const X& x) const { return rates(x).weighted(mu); }

    [[nodiscard]] static double upper(int i) { return i < 4 ? half_pi : 1.0; }
};

}  // namespace detail

inline RatePair rate_pair_bf(const MisoChannel& ch, const BeamConfig& cfg) {
    ch.validate();
    cfg.validate();
    const NarrowbandGains g = ch.gains();
    const auto c2 = detail::cos2;
    const auto& p = cfg.power;
    const double a1 = cfg.alpha1, a2 = cfg.alpha2;
    const double s1 = g.g11 * c2(cfg.beta11 - a1) * p.p11 + g.g12 * c2(cfg.beta12 - a2) * p.p12;
    const double i1 = g.g11 * c2(cfg.beta21) * p.p21 + g.g12 * c2(cfg.beta22) * p.p22;
    const double s2 = g.g21 * c2(cfg.beta21 - a1) * p.p21 + g.g22 * c2(cfg.beta22 - a2) * p.p22;
    const double i2 = g.g21 * c2(cfg.beta11) * p.p11 + g.g22 * c2(cfg.beta12) * p.p12;
    return {std::log2(1.0 + s1 / (1.0 + i1)), std::log2(1.0 + s2 / (1.0 + i2))};
}

/// Configuration with the channel's own alignment angles filled in.
inline BeamConfig make_beam_config(const MisoChannel& ch, std::array<double, 4> beta, const PowerAllocation& p) {
    return {beta[0], beta[1], beta[2], beta[3], p, ch.alpha(1), ch.alpha(2)};
}

enum class BfMethod { iterative, exhaustive };

struct BfSearchConfig {
    std::size_t n_angle = 31;       // 1-D grid per angle in the iterative method
    std::size_t n_power = 31;       // 1-D grid per power split in the iterative method
    std::size_t n_exhaustive = 13;  // points per dimension in the exhaustive method
    int exhaustive_rounds = 2;
    int max_sweeps = 200;
    double tol = 1e-6;

    void validate() const {
        if (n_angle < 2 || n_power < 2 || n_exhaustive < 2) throw ParameterError("beamforming grids need >= 2 points");
        if (exhaustive_rounds < 0 || max_sweeps < 1 || !(tol > 0.0)) throw ParameterError("invalid beamforming search settings");
    }
};

struct BfResult {
    double rate = 0.0;
    RatePair rates;
    BeamConfig config;
    bool global_optimum_guaranteed = false;
    int sweeps = 0;
};

namespace detail {

/// Coordinate ascent from x: each sweep optimizes the two power splits and
/// then the four angles, each by a 1-D grid plus golden refinement. The
/// per-stream gain factors are cached so a line search over one angle only
/// recomputes that stream's two factors.
inline double bf_coordinate_ascent(const BfObjective& f, BfObjective::X& x, const BfSearchConfig& cfg, int& sweeps,
                                   int golden_iters = 40) {
    static constexpr std::array<int, 6> order{4, 5, 0, 1, 2, 3};
    const auto angle_grid = linspace(0.0, half_pi, cfg.n_angle);
    const auto power_grid = linspace(0.0, 1.0, cfg.n_power);
    const NarrowbandGains& g = f.g;
    // own[i], cross[i]: received gain of stream i at its target and at the other mobile.
    std::array<double, 4> own{}, cross{};
    const std::array<double, 4> g_own{g.g11, g.g21, g.g12, g.g22};
    const std::array<double, 4> g_cross{g.g21, g.g11, g.g22, g.g12};
    const std::array<double, 4> alpha{f.alpha1, f.alpha1, f.alpha2, f.alpha2};
    auto set_angle = [&](int i, double b) {
        own[i] = g_own[i] * cos2(b - alpha[i]);
        cross[i] = g_cross[i] * cos2(b);
    };
    for (int i = 0; i < 4; ++i) set_angle(i, x[i]);
    auto value = [&](double t1, double t2) {
        const double p11 = t1 * f.p1, p21 = (1.0 - t1) * f.p1, p12 = t2 * f.p2, p22 = (1.0 - t2) * f.p2;
        const double s1 = own[0] * p11 + own[2] * p12, i1 = cross[1] * p21 + cross[3] * p22;
        const double s2 = own[1] * p21 + own[3] * p22, i2 = cross[0] * p11 + cross[2] * p12;
        return std::log2(1.0 + s1 / (1.0 + i1)) + f.mu * std::log2(1.0 + s2 / (1.0 + i2));
    };
    double best = value(x[4], x[5]);
    for (sweeps = 0; sweeps < cfg.max_sweeps;) {
        ++sweeps;
        const double start = best;
        for (int i : order) {
            Max1d m;
            if (i == 4) {
                m = grid_refine_max([&](double v) { return value(v, x[5]); }, power_grid, golden_iters);
            } else if (i == 5) {
                m = grid_refine_max([&](double v) { return value(x[4], v); }, power_grid, golden_iters);
            } else {
                m = grid_refine_max(
                    [&](double v) {
                        set_angle(i, v);
                        return value(x[4], x[5]);
                    },
                    angle_grid, golden_iters);
            }
            if (m.value > best) {
                best = m.value;
                x[i] = m.x;
            }
            if (i < 4) set_angle(i, x[i]);
        }
        if (best - start < cfg.tol) break;
    }
    return best;
}

inline double bf_exhaustive(const BfObjective& f, BfObjective::X& x, const BfSearchConfig& cfg) {
    const std::size_t n = cfg.n_exhaustive;
    std::array<double, 6> lo{}, hi{};
    for (int i = 0; i < 6; ++i) hi[i] = BfObjective::upper(i);
    double best = f(x);
    const NarrowbandGains& g = f.g;
    for (int round = 0; round <= cfg.exhaustive_rounds; ++round) {
        std::array<std::vector<double>, 6> ax;
        for (int i = 0; i < 6; ++i) ax[i] = linspace(lo[i], hi[i], n);
        std::vector<double> c11(n), z11(n), c21(n), z21(n), c12(n), z12(n), c22(n), z22(n);
        for (std::size_t i = 0; i < n; ++i) {
            c11[i] = cos2(ax[0][i] - f.alpha1);
            z11[i] = cos2(ax[0][i]);
            c21[i] = cos2(ax[1][i] - f.alpha1);
            z21[i] = cos2(ax[1][i]);
            c12[i] = cos2(ax[2][i] - f.alpha2);
            z12[i] = cos2(ax[2][i]);
            c22[i] = cos2(ax[3][i] - f.alpha2);
            z22[i] = cos2(ax[3][i]);
        }
        BfObjective::X arg = x;
        for (double t1 : ax[4]) {
            const double p11 = t1 * f.p1, p21 = (1.0 - t1) * f.p1;
            for (double t2 : ax[5]) {
                const double p12 = t2 * f.p2, p22 = (1.0 - t2) * f.p2;
                for (std::size_t a = 0; a < n; ++a) {
                    const double s1a = g.g11 * c11[a] * p11, i2a = g.g21 * z11[a] * p11;
                    for (std::size_t b = 0; b < n; ++b) {
                        const double i1b = g.g11 * z21[b] * p21, s2b = g.g21 * c21[b] * p21;
                        for (std::size_t c = 0; c < n; ++c) {
                            const double s1 = s1a + g.g12 * c12[c] * p12, i2 = i2a + g.g22 * z12[c] * p12;
                            const double l2 = 1.0 + i2;
                            for (std::size_t d = 0; d < n; ++d) {
                                const double i1 = i1b + g.g12 * z22[d] * p22;
                                const double s2 = s2b + g.g22 * c22[d] * p22;
                                const double v = std::log2(1.0 + s1 / (1.0 + i1)) + f.mu * std::log2(1.0 + s2 / l2);
                                if (v > best) {
                                    best = v;
                                    arg = {ax[0][a], ax[1][b], ax[2][c], ax[3][d], t1, t2};
                                }
                            }
                        }
                    }
                }
            }
        }
        x = arg;
        for (int i = 0; i < 6; ++i) {
            const double step = (hi[i] - lo[i]) / static_cast<double>(n - 1);
            lo[i] = std::max(0.0, x[i] - step);
            hi[i] = std::min(BfObjective::upper(i), x[i] + step);
        }
    }
    return best;
}

inline BfObjective::X zf_start() { return {half_pi, half_pi, half_pi, half_pi, 0.5, 0.5}; }

/// Zero-forcing start with equal splits, then the four single-message-per-BTS
/// corners with maximum-ratio beams on the powered streams.
inline std::array<BfObjective::X, 5> bf_starts(double alpha1, double alpha2) {
    const double h = half_pi;
    return {{zf_start(),
             {alpha1, h, alpha2, h, 1.0, 1.0},
             {h, alpha1, h, alpha2, 0.0, 0.0},
             {h, alpha1, alpha2, h, 0.0, 1.0},
             {alpha1, h, h, alpha2, 1.0, 0.0}}};
}

inline BeamConfig to_config(const BfObjective& f, const BfObjective::X& x) {
    return {x[0], x[1], x[2], x[3], {x[4] * f.p1, (1.0 - x[4]) * f.p1, x[5] * f.p2, (1.0 - x[5]) * f.p2}, f.alpha1,
            f.alpha2};
}

inline BfObjective make_objective(const MisoChannel& ch, const PowerBudget& b, double mu) {
    ch.validate();
    b.validate();
    check_non_negative(mu, "mu");
    return {ch.gains(), ch.alpha(1), ch.alpha(2), b.p1, b.p2, mu};
}

}  // namespace detail

/// Weighted sum rate maximization over beam angles and power splits. Both
/// BTSs transmit at full power, leaving four angles and two splits.
inline BfResult max_weighted_sum_rate_bf(const MisoChannel& ch, const PowerBudget& budget, double mu,
                                         BfMethod method = BfMethod::iterative, const BfSearchConfig& cfg = {}) {
    cfg.validate();
    const detail::BfObjective f = detail::make_objective(ch, budget, mu);
    auto x = detail::zf_start();
    BfResult r;
    if (method == BfMethod::exhaustive) {
        detail::bf_exhaustive(f, x, cfg);
        r.global_optimum_guaranteed = false;
    } else {
        double best = -1.0;
        for (auto start : detail::bf_starts(f.alpha1, f.alpha2)) {
            int sweeps = 0;
            const double v = detail::bf_coordinate_ascent(f, start, cfg, sweeps);
            r.sweeps += sweeps;
            if (v > best) {
                best = v;
                x = start;
            }
        }
    }
    r.config = detail::to_config(f, x);
    r.rates = f.rates(x);
    r.rate = r.rates.weighted(mu);
    return r;
}

struct BfFrontierPoint {
    double mu = 0.0;
    RatePair rates;
    BeamConfig config;
};

/// Boundary points of the beamforming rate region, one weighted-sum maximizer per mu.
inline std::vector<BfFrontierPoint> frontier_bf(const MisoChannel& ch, const PowerBudget& budget,
                                                const std::vector<double>& mu_list, const BfSearchConfig& cfg = {}) {
    if (mu_list.empty()) throw ParameterError("frontier_bf: mu_list must not be empty");
    std::vector<BfFrontierPoint> out;
    for (double mu : mu_list) {
        const BfResult r = max_weighted_sum_rate_bf(ch, budget, mu, BfMethod::iterative, cfg);
        out.push_back({mu, r.rates, r.config});
    }
    return out;
}

struct BfDualConfig {
    BfSearchConfig search{16, 16, 13, 2, 200, 1e-6};  // per table entry
    DualOptions dual;
    double grid_step = 1.4142135623730951;  // ratio between tabulated per-subcarrier budgets
    int grid_below = 8;                     // levels below Ptot/L
    int grid_above = 4;                     // levels above Ptot/L
    bool force_zero_forcing = false;        // restrict every beam to pi/2

    void validate() const {
        search.validate();
        dual.validate();
        if (!(grid_step > 1.0) || grid_below < 0 || grid_above < 0) throw ParameterError("invalid budget grid");
    }
};

namespace detail {

/// Per-subcarrier beamforming rates tabulated on a grid of per-BTS budgets;
/// neighbouring entries warm-start each other.
class BfSubcarrierTable {
public:
    BfSubcarrierTable(const MisoChannel& ch, double mu, const std::vector<double>& b1, const std::vector<double>& b2,
                      const BfDualConfig& cfg)
        : f_{ch.gains(), ch.alpha(1), ch.alpha(2), 0.0, 0.0, mu}, b1_(b1), b2_(b2), cfg_(cfg) {
        const std::size_t n2 = b2.size();
        rate_.resize(b1.size() * n2);
        x_.resize(b1.size() * n2);
        for (std::size_t i = 0; i < b1.size(); ++i) {
            for (std::size_t j = 0; j < n2; ++j) {
                BfObjective f = f_;
                f.p1 = b1[i];
                f.p2 = b2[j];
                std::vector<BfObjective::X> starts;
                for (const auto& st : bf_starts(f.alpha1, f.alpha2)) starts.push_back(st);
                double best = -1.0;
                BfObjective::X arg{};
                for (const auto& s : starts) {
                    auto [v, x] = solve(b1[i], b2[j], s);
                    if (v > best) {
                        best = v;
                        arg = x;
                    }
                }
                rate_[i * n2 + j] = best;
                x_[i * n2 + j] = arg;
            }
        }
    }

    [[nodiscard]] InnerPoint maximize(double l1, double l2) const {
        const std::size_t n2 = b2_.size();
        InnerPoint best{0, 0, 0, -std::numeric_limits<double>::infinity(), static_cast<int>(WidebandScheme::beamforming), 0};
        for (std::size_t i = 0; i < b1_.size(); ++i)
            for (std::size_t j = 0; j < n2; ++j) {
                const double v = rate_[i * n2 + j] - l1 * b1_[i] - l2 * b2_[j];
                if (v > best.lagrangian) best = {b1_[i], b2_[j], rate_[i * n2 + j], v, best.scheme, i * n2 + j};
            }
        return best;
    }

    [[nodiscard]] double entry(std::size_t i, std::size_t j) const { return rate_.at(i * b2_.size() + j); }

    // Off-grid budgets: warm start from the nearest tabulated entry.
    [[nodiscard]] InnerPoint evaluate(double p1, double p2) const {
        auto nearest = [](const std::vector<double>& v, double p) {
            std::size_t k = 0;
            for (std::size_t i = 1; i < v.size(); ++i)
                if (std::abs(v[i] - p) < std::abs(v[k] - p)) k = i;
            return k;
        };
        const std::size_t idx = nearest(b1_, p1) * b2_.size() + nearest(b2_, p2);
        auto [v, x] = solve(p1, p2, x_[idx]);
        extra_.push_back(x);
        return {p1, p2, v, v, static_cast<int>(WidebandScheme::beamforming), rate_.size() + extra_.size() - 1};
    }

    [[nodiscard]] BeamConfig config(std::size_t index, double p1, double p2) const {
        BfObjective f = f_;
        f.p1 = p1;
        f.p2 = p2;
        return to_config(f, index < x_.size() ? x_[index] : extra_.at(index - x_.size()));
    }

private:
    [[nodiscard]] std::pair<double, BfObjective::X> solve(double p1, double p2, BfObjective::X x) const {
        BfObjective f = f_;
        f.p1 = p1;
        f.p2 = p2;
        if (cfg_.force_zero_forcing) {
            // Interference-free: only the two power splits remain.
            x[0] = x[1] = x[2] = x[3] = half_pi;
            double best = f(x);
            for (int sweep = 0; sweep < cfg_.search.max_sweeps; ++sweep) {
                const double start = best;
                for (int i : {4, 5}) {
                    auto g = [&](double v) {
                        BfObjective::X y = x;
                        y[i] = v;
                        return f(y);
                    };
                    const Max1d m = grid_refine_max(g, linspace(0.0, 1.0, cfg_.search.n_power), 60);
                    if (m.value > best) {
                        best = m.value;
                        x[i] = m.x;
                    }
                }
                if (best - start < cfg_.search.tol * 1e-3) break;
            }
            return {best, x};
        }
        int sweeps = 0;
        const double v = bf_coordinate_ascent(f, x, cfg_.search, sweeps, 30);
        return {v, x};
    }

    BfObjective f_;
    std::vector<double> b1_;
    std::vector<double> b2_;
    BfDualConfig cfg_;
    std::vector<double> rate_;
    std::vector<BfObjective::X> x_;
    mutable std::vector<BfObjective::X> extra_;
};

struct BfDualModel {
    std::vector<BfSubcarrierTable> subs;
    [[nodiscard]] std::size_t size() const { return subs.size(); }
    [[nodiscard]] InnerPoint maximize(std::size_t l, double l1, double l2) const { return subs[l].maximize(l1, l2); }
    [[nodiscard]] InnerPoint evaluate(std::size_t l, double p1, double p2) const { return subs[l].evaluate(p1, p2); }
};

inline std::vector<double> budget_grid(double mean, const BfDualConfig& cfg) {
    std::vector<double> v{0.0};
    if (!(mean > 0.0)) return v;
    for (int k = -cfg.grid_below; k <= cfg.grid_above; ++k) v.push_back(mean * std::pow(cfg.grid_step, k));
    return v;
}

inline void check_miso(const WidebandChannel& ch, const PowerBudget& b, double mu) {
    ch.validate();
    b.validate();
    check_non_negative(mu, "mu");
    if (ch.mode != ChannelMode::miso) throw ParameterError("MISO-mode channel required");
}

}  // namespace detail

/// Wideband cooperative beamforming: the inner problem of the dual is solved
/// on a per-subcarrier table of budget pairs, each entry jointly optimized
/// over angles and power splits.
inline WidebandAllocation wideband_bf_dual_solve(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                                 const BfDualConfig& cfg = {}) {
    detail::check_miso(ch, budgets, mu);
    cfg.validate();
    const double L = static_cast<double>(ch.size());
    const auto b1 = detail::budget_grid(budgets.p1 / L, cfg);
    const auto b2 = detail::budget_grid(budgets.p2 / L, cfg);
    detail::BfDualModel model;
    model.subs.reserve(ch.size());
    double gmax = 0.0;
    for (const auto& h : ch.miso) {
        model.subs.emplace_back(h, mu, b1, b2, cfg);
        const auto g = h.gains();
        gmax = std::max({gmax, g.g11, g.g21, g.g12, g.g22});
    }
    WidebandAllocation a;
    if (!(gmax > 0.0)) {
        a.p1.assign(ch.size(), 0.0);
        a.p2.assign(ch.size(), 0.0);
        a.rate.assign(ch.size(), 0.0);
        a.scheme.assign(ch.size(), WidebandScheme::beamforming);
        a.dual_value = a.duality_gap = 0.0;
        return a;
    }
    detail::NestedBisection<detail::BfDualModel> nb(model, budgets, (1.0 + mu) * gmax / std::numbers::ln2, cfg.dual);
    const detail::DualOutcome o = nb.solve();
    a = detail::from_outcome(o);
    for (std::size_t l = 0; l < ch.size(); ++l) {
        const BeamConfig c = model.subs[l].config(o.points[l].index, o.points[l].p1, o.points[l].p2);
        a.split.push_back(c.power);
        a.beta.push_back({c.beta11, c.beta21, c.beta12, c.beta22});
    }
    return a;
}

/// Equal budgets Ptot_k / L per subcarrier, beams and splits optimized per subcarrier.
inline WidebandAllocation equal_power_coop_bf(const WidebandChannel& ch, const PowerBudget& budgets, double mu,
                                              const BfSearchConfig& cfg = {}) {
    detail::check_miso(ch, budgets, mu);
    const double L = static_cast<double>(ch.size());
    const PowerBudget per{budgets.p1 / L, budgets.p2 / L};
    WidebandAllocation a;
    for (const auto& h : ch.miso) {
        const BfResult r = max_weighted_sum_rate_bf(h, per, mu, BfMethod::iterative, cfg);
        a.p1.push_back(per.p1);
        a.p2.push_back(per.p2);
        a.scheme.push_back(WidebandScheme::beamforming);
        a.rate.push_back(r.rate);
        a.split.push_back(r.config.power);
        a.beta.push_back({r.config.beta11, r.config.beta21, r.config.beta12, r.config.beta22});
        a.value += r.rate;
    }
    return a;
}

/// Weighted sum rate of a beamforming allocation re-evaluated from its angles and stream powers.
inline double sum_rate_bf(const WidebandChannel& ch, const WidebandAllocation& a, double mu) {
    if (ch.mode != ChannelMode::miso) throw ParameterError("sum_rate_bf: MISO-mode channel required");
    if (a.split.size() != ch.size() || a.beta.size() != ch.size())
        throw ParameterError("sum_rate_bf: allocation carries no beam configuration for every subcarrier");
    double s = 0.0;
    for (std::size_t l = 0; l < ch.size(); ++l) {
        const auto& b = a.beta[l];
        s += rate_pair_bf(ch.miso[l], make_beam_config(ch.miso[l], b, a.split[l])).weighted(mu);
    }
    return s;
}

}  // namespace nccoop

#endif
