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

#ifndef NCCOOP_CHANNEL_HPP
#define NCCOOP_CHANNEL_HPP

#include <nccoop/detail/rng.hpp>
#include <nccoop/error.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace nccoop {

using Complex = std::complex<double>;
using CVector = std::vector<Complex>;

/// Link power gains of one (sub-)channel; g_jk is the gain from BTS k to
/// mobile j. Noise power is normalized to one.
struct NarrowbandGains {
    double g11 = 0.0;
    double g21 = 0.0;
    double g12 = 0.0;
    double g22 = 0.0;

    /// Gain from BTS k to mobile j, both 1-based.
    [[nodiscard]] double gain(int j, int k) const {
        if (k == 1) return j == 1 ? g11 : g21;
        return j == 1 ? g12 : g22;
    }

    void validate() const {
        detail::check_non_negative(g11, "g11");
        detail::check_non_negative(g21, "g21");
        detail::check_non_negative(g12, "g12");
        detail::check_non_negative(g22, "g22");
    }

    bool operator==(const NarrowbandGains&) const = default;
};

/// Per-BTS power limits. Narrowband: per-channel powers; wideband: totals.
struct PowerBudget {
    double p1 = 0.0;
    double p2 = 0.0;

    [[nodiscard]] double of(int k) const { return k == 1 ? p1 : p2; }

    void validate() const {
        detail::check_non_negative(p1, "P1");
        detail::check_non_negative(p2, "P2");
    }
};

namespace detail {

inline double squared_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return s;
}

/// a^H b
inline Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s{0.0, 0.0};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

}  // namespace detail

/// Angle in [0, pi/2] between the lines spanned by two complex vectors:
/// arccos(|a^H b| / (|a| |b|)).
inline double alignment_angle(std::span<const Complex> a, std::span<const Complex> b) {
    if (a.size() != b.size()) throw ParameterError("alignment_angle: length mismatch");
    const double na = detail::squared_norm(a);
    const double nb = detail::squared_norm(b);
    if (!(na > 0.0) || !(nb > 0.0)) throw DegenerateInputError("alignment_angle: zero vector");
    const double c = std::abs(detail::inner(a, b)) / std::sqrt(na * nb);
    return std::acos(std::clamp(c, 0.0, 1.0));
}

/// MISO channel of one (sub-)channel: h_jk is the vector from the Nt antennas
/// of BTS k to mobile j.
struct MisoChannel {
    CVector h11;
    CVector h21;
    CVector h12;
    CVector h22;

    [[nodiscard]] std::size_t nt() const { return h11.size(); }

    [[nodiscard]] const CVector& vec(int j, int k) const {
        if (k == 1) return j == 1 ? h11 : h21;
        return j == 1 ? h12 : h22;
    }

    [[nodiscard]] NarrowbandGains gains() const {
        return {detail::squared_norm(h11), detail::squared_norm(h21),
                detail::squared_norm(h12), detail::squared_norm(h22)};
    }

    /// Angle between the two channels leaving BTS k.
    [[nodiscard]] double alpha(int k) const {
        return k == 1 ? alignment_angle(h11, h21) : alignment_angle(h12, h22);
    }

    void validate() const {
        const std::size_t n = h11.size();
        if (n < 2) throw ParameterError("MisoChannel: Nt must be at least 2");
        if (h21.size() != n || h12.size() != n || h22.size() != n)
            throw ParameterError("MisoChannel: vectors must share one length");
        for (const CVector* v : {&h11, &h21, &h12, &h22})
            for (const auto& z : *v)
                if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                    throw ParameterError("MisoChannel: non-finite entry");
    }
};

enum class ChannelMode { scalar, miso };

inline const char* to_string(ChannelMode m) { return m == ChannelMode::scalar ? "scalar" : "miso"; }

/// Generation parameters carried alongside a channel.
struct ChannelMeta {
    std::array<double, 4> mean_gains{1.0, 1.0, 1.0, 1.0};  // g11, g21, g12, g22
    double rho = 0.0;
    std::uint64_t seed = 0;
};

/// L parallel subcarriers, either scalar gains or MISO vectors.
struct WidebandChannel {
    ChannelMode mode = ChannelMode::scalar;
    std::size_t nt = 1;
    std::vector<NarrowbandGains> scalar;
    std::vector<MisoChannel> miso;
    ChannelMeta meta;

    [[nodiscard]] std::size_t size() const { return mode == ChannelMode::scalar ? scalar.size() : miso.size(); }

    /// Power gains of subcarrier l in either mode.
    [[nodiscard]] NarrowbandGains gains(std::size_t l) const {
        return mode == ChannelMode::scalar ? scalar.at(l) : miso.at(l).gains();
    }

    void validate() const {
        if (size() == 0) throw ParameterError("WidebandChannel: L must be at least 1");
        if (!(meta.rho >= 0.0 && meta.rho < 1.0)) throw ParameterError("WidebandChannel: rho must be in [0,1)");
        if (mode == ChannelMode::scalar) {
            if (!miso.empty()) throw ParameterError("WidebandChannel: scalar mode carries MISO entries");
            for (const auto& g : scalar) g.validate();
        } else {
            if (!scalar.empty()) throw ParameterError("WidebandChannel: MISO mode carries scalar entries");
            for (const auto& h : miso) {
                h.validate();
                if (h.nt() != nt) throw ParameterError("WidebandChannel: inconsistent Nt");
            }
        }
    }
};

namespace detail {

inline void check_generation_params(std::size_t L, std::span<const double> mean_gains, double rho) {
    if (L < 1) throw ParameterError("L must be at least 1");
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("rho must be in [0,1)");
    if (mean_gains.size() != 4) throw ParameterError("mean_gains must have 4 entries");
    for (double m : mean_gains) check_non_negative(m, "mean gain");
}

}  // namespace detail

/// First-order Gauss-Markov complex sequence c(0..L-1): c(0) ~ CN(0, variance),
/// c(l) = rho c(l-1) + sqrt(1 - rho^2) w(l), w ~ CN(0, variance).
inline CVector gauss_markov_sequence(std::size_t L, double variance, double rho, std::uint64_t stream_seed) {
    detail::GaussianStream rng(stream_seed);
    CVector c(L);
    if (L == 0) return c;
    const double innov = std::sqrt(1.0 - rho * rho);
    c[0] = rng.complex_normal(variance);
    for (std::size_t l = 1; l < L; ++l) c[l] = rho * c[l - 1] + innov * rng.complex_normal(variance);
    return c;
}

/// Complex amplitude sequence of one scalar link (0: g11, 1: g21, 2: g12, 3: g22).
inline CVector link_amplitudes(std::size_t L, double mean_gain, double rho, std::uint64_t seed, int link,
                               int antenna = 0) {
    return gauss_markov_sequence(L, mean_gain, rho, detail::stream_seed(seed, 16u * link + antenna));
}

/// Scalar Rayleigh channel over L subcarriers; every link fades independently
/// and is correlated across subcarriers with lag-1 coefficient rho.
inline WidebandChannel generate_wideband_scalar(std::size_t L, std::array<double, 4> mean_gains, double rho,
                                                std::uint64_t seed) {
    detail::check_generation_params(L, mean_gains, rho);
    WidebandChannel ch;
    ch.mode = ChannelMode::scalar;
    ch.nt = 1;
    ch.meta = {mean_gains, rho, seed};
    ch.scalar.resize(L);
    std::array<CVector, 4> amp;
    for (int link = 0; link < 4; ++link) amp[link] = link_amplitudes(L, mean_gains[link], rho, seed, link);
    for (std::size_t l = 0; l < L; ++l)
        ch.scalar[l] = {std::norm(amp[0][l]), std::norm(amp[1][l]), std::norm(amp[2][l]), std::norm(amp[3][l])};
    return ch;
}

/// MISO Rayleigh channel: every antenna entry of every link is its own
/// Gauss-Markov sequence with variance mean_gains[link], so E[g_jk] = Nt * mean.
inline WidebandChannel generate_wideband_miso(std::size_t L, std::size_t Nt, std::array<double, 4> mean_gains,
                                              double rho, std::uint64_t seed) {
    detail::check_generation_params(L, mean_gains, rho);
    if (Nt < 2) throw ParameterError("Nt must be at least 2");
    if (Nt > 16) throw ParameterError("Nt must be at most 16");
    WidebandChannel ch;
    ch.mode = ChannelMode::miso;
    ch.nt = Nt;
    ch.meta = {mean_gains, rho, seed};
    ch.miso.assign(L, MisoChannel{CVector(Nt), CVector(Nt), CVector(Nt), CVector(Nt)});
    for (int link = 0; link < 4; ++link) {
        for (std::size_t a = 0; a < Nt; ++a) {
            const CVector seq = link_amplitudes(L, mean_gains[link], rho, seed, link, static_cast<int>(a));
            for (std::size_t l = 0; l < L; ++l) {
                auto& h = ch.miso[l];
                CVector& v = link == 0 ? h.h11 : link == 1 ? h.h21 : link == 2 ? h.h12 : h.h22;
                v[a] = seq[l];
            }
        }
    }
    return ch;
}

/// Single scalar channel draw (L = 1).
inline NarrowbandGains random_gains(std::array<double, 4> mean_gains, std::uint64_t seed) {
    return generate_wideband_scalar(1, mean_gains, 0.0, seed).scalar.front();
}

}  // namespace nccoop

#endif
