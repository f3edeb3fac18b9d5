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

// Acceptance checks: one PASS/FAIL line per criterion.

#include <nccoop/baselines.hpp>
#include <nccoop/beamforming.hpp>
#include <nccoop/experiment.hpp>
#include <nccoop/narrowband.hpp>
#include <nccoop/oracle.hpp>
#include <nccoop/wideband.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace nccoop;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
    std::printf("%s criterion %d: %s (%s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double db(double p) { return 10.0 * std::log10(p); }
double from_db(double x) { return std::pow(10.0, x / 10.0); }

// SNR (dB) at which a baseline whose mean rate is `curve(dB)` reaches `level`,
// scanning upward from `start` in `step` dB and interpolating linearly.
double snr_reaching(const std::function<double(double)>& curve, double level, double start, double step = 0.5,
                    double stop = 40.0) {
    double x0 = start, y0 = curve(start);
    if (y0 >= level) return start;
    for (double x1 = start + step; x1 <= stop + 1e-9; x1 += step) {
        const double y1 = curve(x1);
        if (y1 >= level) return x0 + (level - y0) / (y1 - y0) * (x1 - x0);
        x0 = x1;
        y0 = y1;
    }
    return std::numeric_limits<double>::infinity();
}

double slope_per_decade(const std::vector<double>& p, const std::vector<double>& r) {
    const std::size_t n = p.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log10(p[i]);
        sx += x;
        sy += r[i];
        sxx += x * x;
        sxy += x * r[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

constexpr double bits_per_decade_1dof = 3.321928094887362;  // log2(10): 1 bit per 3.01 dB
constexpr double mid_snr_db = 10.0;
constexpr std::size_t wideband_L = 128;
constexpr int wideband_trials = 20;

// Criteria 1 and 2 share the frontier points.
void frontier_criteria() {
    const auto t0 = std::chrono::steady_clock::now();
    const PowerBudget b{5, 5};
    constexpr std::size_t n_grid = 60;
    double worst = 0.0;
    bool ok = true;
    std::size_t regime_fail = 0, points = 0;
    for (std::uint64_t s = 0; s < 50; ++s) {
        const NarrowbandGains g = random_gains({1, 1, 1, 1}, 10000 + s);
        const double r1max = max_single_rate(g, b, 1);
        for (int i = 0; i <= 10; ++i) {
            const double t = r1max * i / 10.0;
            const FrontierPoint f = frontier_point(g, b, t);
            const oracle::GridPoint o = oracle::grid_frontier(g, b, t, n_grid);
            const double d = std::abs(f.rates.r2 - o.value);
            worst = std::max(worst, d);
            if (!(d <= 0.02) || f.rates.r2 < o.value - 1e-9) ok = false;
            ++points;
            if (!regime_check(g, b, f.alloc, 1e-6).satisfied) ++regime_fail;
        }
    }
    const double secs = seconds_since(t0);
    report(1, ok && secs < 120.0, "frontier_point vs lattice oracle on 50 instances x 11 targets",
           fmt("max |dR2| = %.4g bits, limit 0.02; %.1f s, limit 120 s", worst, secs));
    report(2, regime_fail == 0, "every frontier point passes the frontier regime check",
           fmt("%zu of %zu points fail at tol 1e-6", regime_fail, points));
}

void corner_criterion() {
    const PowerBudget b{5, 5};
    constexpr std::size_t n_grid = 80;
    std::size_t non_corner = 0, below = 0;
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
        const NarrowbandGains g = random_gains({1, 1, 1, 1}, 20000 + s);
        const auto r = max_weighted_sum_rate(g, b, 1.0);
        if (!is_corner(r.candidate_id)) ++non_corner;
        const double grid = oracle::grid_sum_rate(g, b, 1.0, n_grid).value;
        // Lattice bound: the true optimum exceeds the lattice optimum by at
        // most (step) x (largest partial derivative of R1 + R2).
        const double step = std::max(b.p1, b.p2) / (n_grid - 1);
        const double gmax = std::max({g.g11, g.g21, g.g12, g.g22});
        const double bound = 4.0 * gmax * step / std::numbers::ln2;
        worst = std::max(worst, grid - r.rate);
        if (r.rate < grid - bound) ++below;
    }
    report(3, non_corner == 0 && below == 0, "mu = 1 maximizer is a corner and not beaten by the lattice",
           fmt("%zu non-corner winners, %zu below lattice - bound, max(lattice - rate) = %.3g", non_corner, below, worst));
}

void stationary_criterion() {
    const PowerBudget b{5, 5};
    std::size_t interior = 0;
    double worst = 0.0;
    for (double mu : {0.5, 3.0}) {
        for (std::uint64_t s = 0; s < 2000; ++s) {
            const NarrowbandGains g = random_gains({1, 1, 1, 1}, 30000 + s);
            const auto r = max_weighted_sum_rate(g, b, mu);
            if (is_corner(r.candidate_id)) continue;
            ++interior;
            const int id = r.candidate_id;
            const PowerAllocation& p = r.alloc;
            const double x = id == stationary_p11 ? p.p11 : id == stationary_p12 ? p.p12 : id == stationary_p22 ? p.p22 : p.p21;
            auto f = [&](const std::vector<double>& v) { return weighted_rate(g, stationary_family(b, id, v[0]), mu); };
            const auto grad = oracle::finite_diff_stationarity(f, {x}, 1e-5);
            worst = std::max(worst, std::abs(grad[0]));
        }
    }
    report(4, interior > 0 && worst < 1e-3, "interior winners for mu in {0.5, 3} are stationary",
           fmt("%zu interior winners, max |df/dx| = %.3g, limit 1e-3", interior, worst));
}

void duality_criterion() {
    bool ok = true;
    std::string detail;
    for (double x : {0.0, mid_snr_db, 20.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const double P = from_db(x);
        const PowerBudget b{wideband_L * P, wideband_L * P};
        double gap = 0.0;
        std::size_t violations = 0, iterates = 0;
        for (int s = 0; s < wideband_trials; ++s) {
            const auto ch = generate_wideband_scalar(wideband_L, {1, 1, 1, 1}, 0.95, 40000 + s);
            const auto a = dual_solve(ch, b, 1.0);
            gap += a.relative_gap() / wideband_trials;
            for (const auto& it : a.iterates) {
                ++iterates;
                if (it.dual_value < a.value) ++violations;
            }
        }
        const double secs = seconds_since(t0);
        if (!(gap < 0.01) || violations > 0 || secs >= 300.0) ok = false;
        detail += fmt("%s%.0f dB: mean gap %.2e, %zu/%zu iterates below primal, %.1f s", detail.empty() ? "" : "; ", x,
                      gap, violations, iterates, secs);
    }
    report(5, ok, "wideband dual: relative gap < 1%, weak duality at every iterate, < 5 min per SNR", detail);
}

void waterfill_criterion() {
    std::size_t two_active = 0;
    double ub_err = 0.0, kkt_err = 0.0;
    for (double x : {0.0, 10.0, 20.0, 30.0}) {
        const double P = from_db(x);
        for (int s = 0; s < wideband_trials; ++s) {
            const auto ch = generate_wideband_scalar(wideband_L, {1, 1, 1, 1}, 0.95, 50000 + s);
            const PowerBudget b{wideband_L * P, wideband_L * P};
            const auto a = highsnr_waterfill(ch, b);
            double coop = 0.0, ub = 0.0;
            for (std::size_t l = 0; l < ch.size(); ++l) {
                const auto g = ch.gains(l);
                const double p1 = a.p1[l], p2 = a.p2[l];
                if (p1 > 0.0 && p2 > 0.0) ++two_active;
                const auto r = subcarrier_rate_options(g, p1, p2, 1.0);
                coop += std::max(r.r1c, r.r2c);
                const double m1 = std::max(g.g11, g.g21), m2 = std::max(g.g12, g.g22);
                ub += std::log2(1.0 + m1 * p1 + m2 * p2);
                // marginal rate per unit power on active subcarriers
                if (p1 > 0.0) kkt_err = std::max(kkt_err, std::abs(m1 / ((1.0 + m1 * p1) * std::numbers::ln2) - a.lambda1) / a.lambda1);
                if (p2 > 0.0) kkt_err = std::max(kkt_err, std::abs(m2 / ((1.0 + m2 * p2) * std::numbers::ln2) - a.lambda2) / a.lambda2);
            }
            ub_err = std::max(ub_err, std::abs(coop - ub));
        }
    }
    report(6, two_active == 0 && ub_err <= 1e-9 && kkt_err <= 1e-6,
           "high-SNR water-filling: one BTS per subcarrier, bound attained, KKT balance",
           fmt("%zu subcarriers with two active BTSs; |sum max(R1c,R2c) - sum Rub| = %.2e; max relative KKT error %.2e",
               two_active, ub_err, kkt_err));
}

// Mean per-subcarrier rate over the trial channels.
double mean_rate(const std::vector<WidebandChannel>& chans, double x,
                 const std::function<double(const WidebandChannel&, const PowerBudget&)>& scheme) {
    const double P = from_db(x);
    double sum = 0.0;
    for (const auto& ch : chans) {
        const double L = static_cast<double>(ch.size());
        sum += scheme(ch, {L * P, L * P}) / L;
    }
    return sum / static_cast<double>(chans.size());
}

void wideband_comparison_criterion() {
    std::vector<double> coop_gains;
    std::string detail;
    double eq_gap = 0.0, nc_gap0 = 0.0;
    for (double cross_db : {0.0, -3.0, -6.0}) {
        const double c = from_db(cross_db);
        std::vector<WidebandChannel> chans;
        for (int s = 0; s < wideband_trials; ++s)
            chans.push_back(generate_wideband_scalar(wideband_L, {1, c, c, 1}, 0.95, 60000 + s));
        const double level = mean_rate(chans, mid_snr_db, [](const auto& ch, const auto& b) { return dual_solve(ch, b, 1.0).value; });
        const double x_nc = snr_reaching(
            [&](double x) { return mean_rate(chans, x, [](const auto& ch, const auto& b) { return noncoop_wideband(ch, b, 1.0).value; }); },
            level, mid_snr_db);
        const double gap = x_nc - mid_snr_db;
        coop_gains.push_back(gap);
        if (cross_db == 0.0) {
            const double x_eq = snr_reaching(
                [&](double x) { return mean_rate(chans, x, [](const auto& ch, const auto& b) { return equal_power_coop(ch, b, 1.0).value; }); },
                level, mid_snr_db, 0.25);
            eq_gap = x_eq - mid_snr_db;
            nc_gap0 = gap;
        }
        detail += fmt("%scross %+.0f dB: dual %.3f b/sc at 10 dB, coop gain %.2f dB", detail.empty() ? "" : "; ", cross_db,
                      level, gap);
    }
    const bool shrinking = coop_gains[0] > coop_gains[1] && coop_gains[1] > coop_gains[2];
    const bool ok = std::abs(nc_gap0 - 5.0) <= 1.0 && std::abs(eq_gap - 1.0) <= 0.5 && shrinking;
    report(7, ok, "scaled wideband comparison: ~5 dB over noncooperative, ~1 dB over equal power, gain shrinks with weaker cross links",
           fmt("equal-power gap %.2f dB; ", eq_gap) + detail);
}

void dof_criterion() {
    const std::vector<double> P{1e2, 1e3, 1e4};
    constexpr int n = 30;
    std::vector<double> coop(3), coh(3), bf(3);
    for (std::size_t i = 0; i < P.size(); ++i) {
        for (int s = 0; s < n; ++s) {
            const NarrowbandGains g = random_gains({1, 1, 1, 1}, 70000 + s);
            coop[i] += max_weighted_sum_rate(g, {P[i], P[i]}, 1.0).rate / n;
            WidebandChannel ch;
            ch.scalar = {g};
            coh[i] += coherent_upper_baseline(ch, {P[i], P[i]}, 1.0).value / n;
            const MisoChannel h = generate_wideband_miso(1, 2, {0.5, 0.5, 0.5, 0.5}, 0.0, 70000 + s).miso.front();
            bf[i] += max_weighted_sum_rate_bf(h, {P[i], P[i]}, 1.0).rate / n;
        }
    }
    const double s1 = slope_per_decade(P, coop), s2 = slope_per_decade(P, coh), s3 = slope_per_decade(P, bf);
    const auto within = [](double s, double target) { return std::abs(s - target) <= 0.15 * target; };
    report(8, within(s1, bits_per_decade_1dof) && within(s2, 2 * bits_per_decade_1dof) && within(s3, 2 * bits_per_decade_1dof),
           "high-SNR slopes: one degree of freedom single-antenna, two for coherent and Nt = 2",
           fmt("bits per 3.01 dB: single-antenna %.3f, coherent %.3f, Nt=2 beamforming %.3f; targets 1, 2, 2 +/- 15%%",
               s1 / bits_per_decade_1dof, s2 / bits_per_decade_1dof, s3 / bits_per_decade_1dof));
}

void beamforming_identity_criterion() {
    std::mt19937_64 rng(80000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double rate_err = 0.0, special_err = 0.0;
    auto gain = [](const CVector& h, const CVector& v) { return std::norm(nccoop::detail::inner(h, v)); };
    for (int t = 0; t < 1000; ++t) {
        const std::size_t nt = 2 + t % 3;
        const MisoChannel ch = generate_wideband_miso(1, nt, {0.5, 0.5, 0.5, 0.5}, 0.0, 80000 + t).miso.front();
        const std::array<double, 4> beta{u(rng) * half_pi, u(rng) * half_pi, u(rng) * half_pi, u(rng) * half_pi};
        const PowerAllocation p{10 * u(rng), 10 * u(rng), 10 * u(rng), 10 * u(rng)};
        const BeamConfig c = make_beam_config(ch, beta, p);
        const CVector v11 = beamformer_from_angle(ch.h11, ch.h21, c.beta11);
        const CVector v21 = beamformer_from_angle(ch.h21, ch.h11, c.beta21);
        const CVector v12 = beamformer_from_angle(ch.h12, ch.h22, c.beta12);
        const CVector v22 = beamformer_from_angle(ch.h22, ch.h12, c.beta22);
        const double s1 = gain(ch.h11, v11) * p.p11 + gain(ch.h12, v12) * p.p12;
        const double i1 = gain(ch.h11, v21) * p.p21 + gain(ch.h12, v22) * p.p22;
        const double s2 = gain(ch.h21, v21) * p.p21 + gain(ch.h22, v22) * p.p22;
        const double i2 = gain(ch.h21, v11) * p.p11 + gain(ch.h22, v12) * p.p12;
        const RatePair r = rate_pair_bf(ch, c);
        rate_err = std::max({rate_err, std::abs(r.r1 - std::log2(1.0 + s1 / (1.0 + i1))),
                             std::abs(r.r2 - std::log2(1.0 + s2 / (1.0 + i2)))});
        // maximum-ratio and zero-forcing beams
        const auto g = ch.gains();
        const double a1 = ch.alpha(1);
        const CVector mrt = beamformer_from_angle(ch.h11, ch.h21, a1);
        const CVector zf = beamformer_from_angle(ch.h11, ch.h21, half_pi);
        special_err = std::max({special_err, std::abs(gain(ch.h11, mrt) - g.g11) / g.g11, gain(ch.h21, zf) / g.g21,
                                std::abs(gain(ch.h11, zf) - g.g11 * std::sin(a1) * std::sin(a1)) / g.g11});
    }
    report(9, rate_err < 1e-9 && special_err < 1e-10, "beamforming rate formula matches explicit beam vectors; MRT and ZF exact",
           fmt("max rate error %.2e on 1000 draws (limit 1e-9); max relative MRT/ZF error %.2e", rate_err, special_err));
}

void beamforming_comparison_criterion() {
    std::vector<WidebandChannel> chans;
    for (int s = 0; s < wideband_trials; ++s)
        chans.push_back(generate_wideband_miso(wideband_L, 2, {0.5, 0.5, 0.5, 0.5}, 0.95, 90000 + s));
    const double level =
        mean_rate(chans, mid_snr_db, [](const auto& ch, const auto& b) { return wideband_bf_dual_solve(ch, b, 1.0).value; });
    const double x_ns = snr_reaching(
        [&](double x) { return mean_rate(chans, x, [](const auto& ch, const auto& b) { return noncoop_nullspace_bf(ch, b, 1.0).value; }); },
        level, mid_snr_db);
    const double x_eq = snr_reaching(
        [&](double x) { return mean_rate(chans, x, [](const auto& ch, const auto& b) { return equal_power_coop_bf(ch, b, 1.0).value; }); },
        level, mid_snr_db, 0.25);
    const double g_ns = x_ns - mid_snr_db, g_eq = x_eq - mid_snr_db;
    report(10, std::abs(g_ns - 4.0) <= 1.0 && std::abs(g_eq - 1.0) <= 0.5,
           "scaled wideband beamforming: ~4 dB over null-space noncooperative, ~1 dB over equal power",
           fmt("optimized %.3f b/sc at 10 dB; gain over null-space %.2f dB, over equal power %.2f dB", level, g_ns, g_eq));
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void determinism_criterion() {
    const fs::path dir = fs::temp_directory_path() / "nccoop_acceptance_determinism";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path cfg = dir / "sweep.json";
    std::ofstream(cfg) << R"({
  "experiment": "wideband-sweep",
  "name": "sweep",
  "channel": { "L": 32, "rho": 0.95, "seed": 12345, "n_trials": 1 },
  "schemes": ["dual", "equal-power", "noncoop", "noncoop-dual", "coherent", "highsnr-waterfill"],
  "snr_db": [0, 10, 20]
})";
    std::ofstream(dir / "bf.json") << R"({
  "experiment": "beamforming-frontier",
  "name": "bf",
  "channel": { "mode": "miso", "Nt": 2, "seed": 3, "n_trials": 2 },
  "schemes": ["coop-bf", "noncoop-bf", "zf"]
})";
    bool ok = true;
    std::string how;
    const char* cli = std::getenv("NCCOOP_CLI");
    for (const char* name : {"sweep", "bf"}) {
        const fs::path c = dir / (std::string(name) + ".json");
        std::vector<std::string> outs;
        for (int run = 0; run < 3; ++run) {
            const fs::path out = dir / ("run" + std::to_string(run));
            if (cli) {
                const std::string cmd = std::string(cli) + " run " + c.string() + " -o " + out.string() + " -j " +
                                        std::to_string(1 + run) + " >/dev/null 2>&1";
                if (std::system(cmd.c_str()) != 0) ok = false;
            } else {
                experiment::run_and_write(experiment::load_config(c), out, 1 + run);
            }
            outs.push_back(slurp(out / (std::string(name) + ".csv")));
        }
        if (outs[0].empty() || outs[0] != outs[1] || outs[0] != outs[2]) ok = false;
    }
    how = cli ? "command line" : "library runner";
    report(11, ok, "reruns of the same config give byte-identical CSV",
           "two configs, three runs each with 1, 2 and 3 workers, via the " + how);
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
    if (want(1) || want(2)) frontier_criteria();
    if (want(3)) corner_criterion();
    if (want(4)) stationary_criterion();
    if (want(5)) duality_criterion();
    if (want(6)) waterfill_criterion();
    if (want(7)) wideband_comparison_criterion();
    if (want(8)) dof_criterion();
    if (want(9)) beamforming_identity_criterion();
    if (want(10)) beamforming_comparison_criterion();
    if (want(11)) determinism_criterion();
    return failures == 0 ? 0 : 1;
}
