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

#include <catch2/catch_amalgamated.hpp>

#include <nccoop/baselines.hpp>
#include <nccoop/beamforming.hpp>

#include <cmath>
#include <random>

using namespace nccoop;
using Catch::Approx;

namespace {

MisoChannel draw(std::uint64_t seed, std::size_t nt = 2) {
    return generate_wideband_miso(1, nt, {0.5, 0.5, 0.5, 0.5}, 0.0, seed).miso.front();
}

double gain(const CVector& h, const CVector& v) { return std::norm(detail::inner(h, v)); }

// Rates computed directly from the beam vectors.
RatePair explicit_rates(const MisoChannel& ch, const BeamConfig& c) {
    const CVector v11 = beamformer_from_angle(ch.h11, ch.h21, c.beta11);
    const CVector v21 = beamformer_from_angle(ch.h21, ch.h11, c.beta21);
    const CVector v12 = beamformer_from_angle(ch.h12, ch.h22, c.beta12);
    const CVector v22 = beamformer_from_angle(ch.h22, ch.h12, c.beta22);
    const auto& p = c.power;
    const double s1 = gain(ch.h11, v11) * p.p11 + gain(ch.h12, v12) * p.p12;
    const double i1 = gain(ch.h11, v21) * p.p21 + gain(ch.h12, v22) * p.p22;
    const double s2 = gain(ch.h21, v21) * p.p21 + gain(ch.h22, v22) * p.p22;
    const double i2 = gain(ch.h21, v11) * p.p11 + gain(ch.h22, v12) * p.p12;
    return {std::log2(1.0 + s1 / (1.0 + i1)), std::log2(1.0 + s2 / (1.0 + i2))};
}

}  // namespace

TEST_CASE("beamformer geometry", "[beamforming]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, half_pi);
    for (int t = 0; t < 1000; ++t) {
        const std::size_t nt = 2 + t % 3;
        const MisoChannel ch = draw(100 + t, nt);
        const double beta = u(rng);
        const CVector v = beamformer_from_angle(ch.h11, ch.h21, beta);
        const auto g = ch.gains();
        const double a = ch.alpha(1);
        CHECK(detail::squared_norm(v) == Approx(1.0).margin(1e-10));
        CHECK(gain(ch.h21, v) == Approx(g.g21 * detail::cos2(beta)).margin(1e-10 * (1.0 + g.g21)));
        CHECK(gain(ch.h11, v) == Approx(g.g11 * detail::cos2(beta - a)).margin(1e-10 * (1.0 + g.g11)));
    }
}

TEST_CASE("maximum-ratio and zero-forcing beams", "[beamforming]") {
    const MisoChannel ch = draw(3, 3);
    const auto g = ch.gains();
    const double a = ch.alpha(1);
    CHECK(gain(ch.h11, beamformer_from_angle(ch.h11, ch.h21, a)) == Approx(g.g11).epsilon(1e-10));
    const CVector zf = beamformer_from_angle(ch.h11, ch.h21, half_pi);
    CHECK(gain(ch.h21, zf) == Approx(0.0).margin(1e-12));
    CHECK(gain(ch.h11, zf) == Approx(g.g11 * std::sin(a) * std::sin(a)).epsilon(1e-10));
}

TEST_CASE("beamformer edge cases", "[beamforming]") {
    const CVector h{{1.0, 0.0}, {0.0, 1.0}};
    const CVector parallel{{2.0, 0.0}, {0.0, 2.0}};
    const CVector v = beamformer_from_angle(h, parallel, half_pi);
    CHECK(detail::squared_norm(v) == Approx(1.0).margin(1e-12));
    CHECK(gain(parallel, v) == Approx(0.0).margin(1e-12));
    CHECK_THROWS_AS(beamformer_from_angle(h, CVector{{0, 0}, {0, 0}}, 0.3), DegenerateInputError);
    CHECK_THROWS_AS(beamformer_from_angle(h, CVector{{1, 0}}, 0.3), ParameterError);
    BeamConfig bad;
    bad.beta11 = 2.0;
    CHECK_THROWS_AS(rate_pair_bf(draw(1), bad), ParameterError);
}

TEST_CASE("angle-domain rates match the beam vectors", "[beamforming]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        const MisoChannel ch = draw(500 + t, 2 + t % 2);
        const std::array<double, 4> beta{u(rng) * half_pi, u(rng) * half_pi, u(rng) * half_pi, u(rng) * half_pi};
        const PowerAllocation p{10 * u(rng), 10 * u(rng), 10 * u(rng), 10 * u(rng)};
        const BeamConfig c = make_beam_config(ch, beta, p);
        const RatePair r = rate_pair_bf(ch, c), e = explicit_rates(ch, c);
        CHECK(r.r1 == Approx(e.r1).margin(1e-10));
        CHECK(r.r2 == Approx(e.r2).margin(1e-10));
    }
}

TEST_CASE("weighted sum rate optimization", "[beamforming]") {
    SECTION("mu = 0 sends everything to mobile 1 with maximum ratio") {
        const MisoChannel ch = draw(21);
        const auto g = ch.gains();
        const auto r = max_weighted_sum_rate_bf(ch, {4, 6}, 0.0);
        CHECK(r.rate == Approx(std::log2(1.0 + g.g11 * 4 + g.g12 * 6)).epsilon(1e-6));
    }
    SECTION("orthogonal cross channels remove interference") {
        MisoChannel ch{{{1, 0}, {0, 0}}, {{0, 0}, {0.8, 0}}, {{0.5, 0}, {0, 0}}, {{0, 0}, {1.2, 0}}};
        const auto g = ch.gains();
        const PowerBudget b{3, 2};
        const auto r = max_weighted_sum_rate_bf(ch, b, 1.0);
        double best = 0.0;
        for (int i = 0; i <= 400; ++i)
            for (int j = 0; j <= 400; ++j) {
                const double t1 = i / 400.0, t2 = j / 400.0;
                best = std::max(best, std::log2(1 + g.g11 * t1 * b.p1 + g.g12 * t2 * b.p2) +
                                          std::log2(1 + g.g21 * (1 - t1) * b.p1 + g.g22 * (1 - t2) * b.p2));
            }
        CHECK(r.rate >= best - 1e-9);
        CHECK(r.rate <= best + 1e-3);
    }
    SECTION("iterative agrees with exhaustive search") {
        for (std::uint64_t s = 0; s < 8; ++s) {
            const MisoChannel ch = draw(900 + s);
            const auto it = max_weighted_sum_rate_bf(ch, {3, 3}, 1.0, BfMethod::iterative);
            const auto ex = max_weighted_sum_rate_bf(ch, {3, 3}, 1.0, BfMethod::exhaustive);
            CHECK(it.rate >= ex.rate - 1e-2);
            CHECK_FALSE(ex.global_optimum_guaranteed);
        }
    }
    SECTION("full power and monotone in the budgets") {
        const MisoChannel ch = draw(31);
        double prev = 0.0;
        for (double p : {0.1, 1.0, 10.0, 100.0}) {
            const auto r = max_weighted_sum_rate_bf(ch, {p, p}, 1.0);
            CHECK(r.config.power.bts_total(1) == Approx(p).epsilon(1e-12));
            CHECK(r.config.power.bts_total(2) == Approx(p).epsilon(1e-12));
            CHECK(r.rate >= prev);
            prev = r.rate;
        }
    }
    SECTION("beats zero-forcing and noncooperative null-space beams") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const MisoChannel ch = draw(40 + s);
            const PowerBudget b{10, 10};
            const auto r = max_weighted_sum_rate_bf(ch, b, 1.0);
            const RatePair zf = zf_rate_pair(ch, b);
            CHECK(r.rate >= zf.r1 + zf.r2 - 1e-9);
            CHECK(r.rate >= noncoop_nullspace_bf(ch, b, 1.0).rate - 1e-6);
        }
    }
    SECTION("optimal configurations use full power") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const MisoChannel ch = draw(300 + s);
            const auto r = max_weighted_sum_rate_bf(ch, {5, 5}, 0.7);
            for (int k = 1; k <= 2; ++k) {
                BeamConfig c = r.config;
                if (k == 1) {
                    c.power.p11 *= 0.99;
                    c.power.p21 *= 0.99;
                } else {
                    c.power.p12 *= 0.99;
                    c.power.p22 *= 0.99;
                }
                CHECK(rate_pair_bf(ch, c).weighted(0.7) <= r.rate + 1e-12);
            }
        }
    }
    SECTION("two degrees of freedom at high SNR") {
        double lo = 0.0, hi = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s) {
            const MisoChannel ch = draw(70 + s);
            lo += max_weighted_sum_rate_bf(ch, {1e2, 1e2}, 1.0).rate;
            hi += max_weighted_sum_rate_bf(ch, {1e4, 1e4}, 1.0).rate;
        }
        const double slope = (hi - lo) / 5.0 / 2.0;
        CHECK(slope == Approx(2.0 * std::log2(10.0)).epsilon(0.15));
    }
}

TEST_CASE("beamforming frontier", "[beamforming]") {
    const MisoChannel ch = draw(5);
    const std::vector<double> mus{0.0, 0.25, 0.5, 1.0, 2.0, 4.0};
    const auto f = frontier_bf(ch, {5, 5}, mus);
    REQUIRE(f.size() == mus.size());
    for (const auto& a : f)
        for (const auto& b : f) CHECK(a.rates.weighted(a.mu) >= b.rates.weighted(a.mu) - 1e-3);
    CHECK_THROWS_AS(frontier_bf(ch, {5, 5}, {}), ParameterError);
}

TEST_CASE("wideband beamforming dual", "[beamforming]") {
    const auto ch = generate_wideband_miso(4, 2, {0.5, 0.5, 0.5, 0.5}, 0.9, 13);
    const PowerBudget b{40, 40};
    SECTION("cooperative beams") {
        const auto a = wideband_bf_dual_solve(ch, b, 1.0);
        CHECK(a.feasible(b));
        CHECK(sum_rate_bf(ch, a, 1.0) == Approx(a.value).margin(1e-9));
        CHECK(a.value >= equal_power_coop_bf(ch, b, 1.0).value * (1.0 - 1e-2));
    }
    SECTION("forced zero forcing") {
        BfDualConfig cfg;
        cfg.force_zero_forcing = true;
        const auto a = wideband_bf_dual_solve(ch, b, 1.0, cfg);
        CHECK(a.feasible(b));
        for (const auto& beta : a.beta)
            for (double x : beta) CHECK(x == half_pi);
        CHECK(sum_rate_bf(ch, a, 1.0) == Approx(a.value).margin(1e-9));
    }
    CHECK_THROWS_AS(wideband_bf_dual_solve(generate_wideband_scalar(2, {1, 1, 1, 1}, 0.5, 1), b, 1.0), ParameterError);
}
