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

#include <cmath>

using namespace nccoop;
using Catch::Approx;

TEST_CASE("noncooperative frontier", "[baselines]") {
    const NarrowbandGains g{1.5, 0.6, 0.4, 2.0};
    const PowerBudget b{10, 8};
    SECTION("end points") {
        const auto a = noncoop_frontier_point(g, b, 0.0);
        CHECK(a.p1 == 0.0);
        CHECK(a.rates.r2 == Approx(std::log2(1.0 + 2.0 * 8)).epsilon(1e-14));
        const auto z = noncoop_frontier_point(g, b, std::log2(1.0 + 1.5 * 10));
        CHECK(z.p1 == Approx(10.0).epsilon(1e-12));
        CHECK(z.rates.r2 == Approx(0.0).margin(1e-12));
    }
    SECTION("matches a grid search") {
        for (double r1 : {0.5, 1.5, 2.5, 3.5}) {
            const auto a = noncoop_frontier_point(g, b, r1);
            CHECK(a.rates.r1 == Approx(r1).margin(1e-12));
            double best = 0.0;
            for (int i = 0; i <= 400; ++i)
                for (int j = 0; j <= 400; ++j) {
                    const RatePair r = noncoop_rates(g, b.p1 * i / 400, b.p2 * j / 400);
                    if (r.r1 >= r1) best = std::max(best, r.r2);
                }
            CHECK(a.rates.r2 >= best - 1e-9);
            CHECK(a.rates.r2 <= best + 2e-2);
        }
    }
    SECTION("sampled frontier is monotone") {
        const auto f = noncoop_frontier(g, b, 21);
        for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i].rates.r2 <= f[i - 1].rates.r2 + 1e-12);
        CHECK_THROWS_AS(noncoop_frontier(g, b, 1), ParameterError);
    }
    CHECK_THROWS_AS(noncoop_frontier_point(g, b, 5.0), ParameterError);
    CHECK_THROWS_AS(noncoop_frontier_point(g, b, -0.5), ParameterError);
}

TEST_CASE("noncooperative power control", "[baselines]") {
    for (double mu : {0.5, 1.0, 2.0}) {
        for (const NarrowbandGains& g : {NarrowbandGains{1.5, 0.6, 0.4, 2.0}, NarrowbandGains{1, 1, 1, 1},
                                         NarrowbandGains{3, 0.05, 0.02, 0.7}}) {
            const PowerBudget b{10, 10};
            const auto r = noncoop_power_control(g, b, mu);
            double best = 0.0;
            for (int i = 0; i <= 300; ++i)
                for (int j = 0; j <= 300; ++j)
                    best = std::max(best, noncoop_rates(g, b.p1 * i / 300, b.p2 * j / 300).weighted(mu));
            CHECK(r.value >= best - 1e-9);
            CHECK(r.value == Approx(noncoop_rates(g, r.p1, r.p2).weighted(mu)).margin(1e-12));
            CHECK(r.p1 <= b.p1);
            CHECK(r.p2 <= b.p2);
            CHECK(max_weighted_sum_rate(g, b, mu).rate >= r.value - 1e-9);
        }
    }
    SECTION("no cross gains means full power") {
        const auto r = noncoop_power_control(NarrowbandGains{1.2, 0.0, 0.0, 0.7}, {5, 4}, 2.0);
        CHECK(r.p1 == 5.0);
        CHECK(r.p2 == 4.0);
        CHECK(r.value == Approx(std::log2(1 + 1.2 * 5) + 2.0 * std::log2(1 + 0.7 * 4)).epsilon(1e-14));
    }
    SECTION("strong cross gains silence one BTS") {
        const auto r = noncoop_power_control(NarrowbandGains{1, 2, 2, 1}, {5, 5}, 1.0);
        CHECK(std::min(r.p1, r.p2) < 0.05 * 5);
    }
    const NarrowbandGains g{1, 1, 1, 1};
    CHECK(noncoop_power_control(g, {1, 1}, 1.0, NoncoopMode::sumrate).value ==
          Approx(noncoop_power_control(g, {1, 1}, 1.0).value));
    CHECK(noncoop_power_control(g, {1, 1}, 0.5, NoncoopMode::frontier).rates.r1 == Approx(0.5));
}

TEST_CASE("wideband baselines are dominated by the dual solution", "[baselines]") {
    const auto ch = generate_wideband_scalar(16, {1, 1, 1, 1}, 0.9, 3);
    const PowerBudget b{160, 160};
    const auto dual = dual_solve(ch, b, 1.0);
    const auto nc = noncoop_wideband(ch, b, 1.0);
    const auto ncd = noncoop_wideband_dual(ch, b, 1.0);
    const auto eq = equal_power_coop(ch, b, 1.0);
    CHECK(nc.feasible(b, 1e-12));
    CHECK(eq.feasible(b, 1e-12));
    CHECK(ncd.feasible(b));
    for (auto s : ncd.scheme) CHECK(s == WidebandScheme::noncoop);
    const double tol = 1e-3 * dual.value;
    CHECK(dual.value >= nc.value - tol);
    CHECK(dual.value >= ncd.value - tol);
    CHECK(dual.value >= eq.value - tol);
    CHECK(ncd.value >= nc.value - tol);
    CHECK(sum_rate(ch, nc, 1.0) == Approx(nc.value).margin(1e-9));
    CHECK(sum_rate(ch, eq, 1.0) == Approx(eq.value).margin(1e-9));
}

TEST_CASE("coherent baseline", "[baselines]") {
    SECTION("without cross links it is joint water filling") {
        WidebandChannel ch;
        ch.scalar = {{2.0, 0.0, 0.0, 0.5}, {0.3, 0.0, 0.0, 1.2}};
        const PowerBudget b{1.0, 2.0};
        const auto c = coherent_upper_baseline(ch, b, 1.0);
        const auto w = detail::water_fill({1 / 2.0, 1 / 0.5, 1 / 0.3, 1 / 1.2}, 3.0);
        CHECK(c.value == Approx(w.value).epsilon(1e-9));
        CHECK(c.label == "approximate coherent baseline");
    }
    SECTION("single subcarrier with full-rank channel") {
        WidebandChannel ch;
        ch.scalar = {{1.0, 0.0, 0.0, 1.0}};
        CHECK(coherent_upper_baseline(ch, {5, 5}, 1.0).value == Approx(2 * std::log2(6.0)).epsilon(1e-9));
    }
    SECTION("above the noncoherent schemes at high SNR") {
        const auto ch = generate_wideband_scalar(8, {1, 1, 1, 1}, 0.5, 9);
        const PowerBudget b{800, 800};
        CHECK(coherent_upper_baseline(ch, b, 1.0).value >= dual_solve(ch, b, 1.0).value);
        const auto miso = generate_wideband_miso(4, 2, {0.5, 0.5, 0.5, 0.5}, 0.5, 9);
        CHECK(coherent_upper_baseline(miso, b, 1.0).value >= equal_power_coop_bf(miso, b, 1.0).value);
    }
    SECTION("zero budgets") {
        WidebandChannel ch;
        ch.scalar = {{1, 1, 1, 1}};
        CHECK(coherent_upper_baseline(ch, {0, 0}, 1.0).value == 0.0);
    }
}

TEST_CASE("null-space beamforming baselines", "[baselines]") {
    SECTION("wideband water filling over the null-space gains") {
        const auto ch = generate_wideband_miso(6, 2, {0.5, 0.5, 0.5, 0.5}, 0.7, 4);
        const PowerBudget b{30, 20};
        const auto a = noncoop_nullspace_bf(ch, b, 1.0);
        CHECK(a.total(1) == Approx(b.p1).epsilon(1e-9));
        CHECK(a.total(2) == Approx(b.p2).epsilon(1e-9));
        CHECK(sum_rate_bf(ch, a, 1.0) == Approx(a.value).margin(1e-9));
        double zf = 0.0;
        for (const auto& h : ch.miso) {
            const RatePair r = zf_rate_pair(h, {b.p1 / 6, b.p2 / 6});
            zf += r.r1 + r.r2;
        }
        CHECK(a.value >= zf - 1e-9);
    }
    SECTION("zero-forcing special cases") {
        const MisoChannel orth{{{1, 0}, {0, 0}}, {{0, 0}, {0.8, 0}}, {{0.5, 0}, {0, 0}}, {{0, 0}, {1.2, 0}}};
        const RatePair o = zf_rate_pair(orth, {3, 2});
        CHECK(o.r1 == Approx(std::log2(1 + 1.0 * 3)).epsilon(1e-14));
        CHECK(o.r2 == Approx(std::log2(1 + 1.44 * 2)).epsilon(1e-14));
        const MisoChannel par{{{1, 0}, {1, 0}}, {{2, 0}, {2, 0}}, {{0.5, 0}, {0, 0.5}}, {{0, 1.5}, {-1.5, 0}}};
        const RatePair z = zf_rate_pair(par, {3, 2});
        CHECK(z.r1 == Approx(0.0).margin(1e-12));
        CHECK(z.r2 == Approx(0.0).margin(1e-12));
        for (std::uint64_t s = 0; s < 20; ++s) {
            const MisoChannel ch = generate_wideband_miso(1, 3, {0.5, 0.5, 0.5, 0.5}, 0.0, 200 + s).miso[0];
            const RatePair r = zf_rate_pair(ch, {4, 6});
            const RatePair e = rate_pair_bf(ch, make_beam_config(ch, {half_pi, half_pi, half_pi, half_pi}, {4, 0, 0, 6}));
            CHECK(r.r1 == Approx(e.r1).margin(1e-12));
            CHECK(r.r2 == Approx(e.r2).margin(1e-12));
        }
        WidebandChannel ch;
        ch.mode = ChannelMode::miso;
        ch.nt = 2;
        ch.miso = {par, par};
        CHECK(noncoop_nullspace_bf(ch, {3, 2}, 1.0).value == Approx(0.0).margin(1e-12));
    }
    SECTION("narrowband null-space search matches a grid") {
        const MisoChannel ch = generate_wideband_miso(1, 2, {0.5, 0.5, 0.5, 0.5}, 0.0, 77).miso[0];
        const PowerBudget b{3, 3};
        const auto g = ch.gains();
        const double a1 = ch.alpha(1), a2 = ch.alpha(2);
        double best = 0.0;
        const int n = 40;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j)
                for (int k = 0; k <= n; ++k)
                    for (int m = 0; m <= n; ++m) {
                        const double b11 = half_pi * i / n, b22 = half_pi * j / n, p11 = b.p1 * k / n, p22 = b.p2 * m / n;
                        const double r1 = std::log2(1 + g.g11 * detail::cos2(b11 - a1) * p11 / (1 + g.g12 * detail::cos2(b22) * p22));
                        const double r2 = std::log2(1 + g.g22 * detail::cos2(b22 - a2) * p22 / (1 + g.g21 * detail::cos2(b11) * p11));
                        best = std::max(best, r1 + r2);
                    }
        const double r = noncoop_nullspace_bf(ch, b, 1.0).rate;
        CHECK(r >= best - 1e-9);
        CHECK(r <= best + 1e-2);
    }
    SECTION("narrowband null-space search covers zero forcing") {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const MisoChannel ch = generate_wideband_miso(1, 2, {0.5, 0.5, 0.5, 0.5}, 0.0, 60 + s).miso[0];
            const PowerBudget b{10, 10};
            const auto r = noncoop_nullspace_bf(ch, b, 1.0);
            const RatePair zf = zf_rate_pair(ch, b);
            CHECK(r.rate >= zf.r1 + zf.r2 - 1e-9);
            CHECK(r.config.power.p21 == 0.0);
            CHECK(r.config.power.p12 == 0.0);
            CHECK(rate_pair_bf(ch, r.config).weighted(1.0) == Approx(r.rate).margin(1e-9));
        }
        const MisoChannel ch = generate_wideband_miso(1, 2, {0.5, 0.5, 0.5, 0.5}, 0.0, 1).miso[0];
        CHECK(noncoop_nullspace_bf_frontier(ch, {1, 1}, {0.5, 2.0}).size() == 2);
    }
}
