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

#ifndef NCCOOP_EXPERIMENT_HPP
#define NCCOOP_EXPERIMENT_HPP

#include <nccoop/baselines.hpp>
#include <nccoop/beamforming.hpp>
#include <nccoop/channel.hpp>
#include <nccoop/error.hpp>
#include <nccoop/io.hpp>
#include <nccoop/narrowband.hpp>
#include <nccoop/version.hpp>
#include <nccoop/wideband.hpp>

#include <json.hpp>
#include <rapidjson/error/en.h>
#include <rapidjson/reader.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace nccoop::experiment {

using Json = nlohmann::json;

/// Invalid configuration, anchored to a JSON pointer and a source line.
class ConfigError : public ParameterError {
public:
    ConfigError(std::string pointer, int line, const std::string& what)
        : ParameterError(what), pointer_(std::move(pointer)), line_(line) {}
    [[nodiscard]] const std::string& pointer() const { return pointer_; }
    [[nodiscard]] int line() const { return line_; }

private:
    std::string pointer_;
    int line_;
};

namespace detail {

/// Source line of every value in a JSON text, keyed by JSON pointer. Also
/// rejects duplicate keys, which the DOM parser would silently merge.
class LineMap {
public:
    LineMap(const std::string& text, const std::string& source) {
        for (std::size_t i = 0; i < text.size(); ++i)
            if (text[i] == '\n') breaks_.push_back(i);
        rapidjson::StringStream ss(text.c_str());
        Handler h(*this, ss);
        rapidjson::Reader reader;
        const auto r = reader.Parse<rapidjson::kParseFullPrecisionFlag | rapidjson::kParseStopWhenDoneFlag>(ss, h);
        if (r.IsError()) {
            if (!duplicate_.empty())
                throw ConfigError(duplicate_, duplicate_line_,
                                  source + ":" + std::to_string(duplicate_line_) + ": " + duplicate_ + ": duplicate key");
            const int line = line_of(r.Offset());
            throw ConfigError("", line, source + ":" + std::to_string(line) + ": syntax error: " +
                                            rapidjson::GetParseError_En(r.Code()));
        }
        for (std::size_t i = ss.Tell(); i < text.size(); ++i)
            if (!std::isspace(static_cast<unsigned char>(text[i])))
                throw ConfigError("", line_of(i), source + ":" + std::to_string(line_of(i)) +
                                                      ": syntax error: unexpected content after the document");
    }

    [[nodiscard]] int line(const std::string& pointer) const {
        auto it = lines_.find(pointer);
        return it == lines_.end() ? 0 : it->second;
    }

private:
    struct Frame {
        std::string pointer;
        bool array = false;
        std::size_t index = 0;
        std::string key;
        std::set<std::string> keys;
    };

    struct Handler : rapidjson::BaseReaderHandler<rapidjson::UTF8<>, Handler> {
        Handler(LineMap& map, rapidjson::StringStream& stream) : m(map), ss(stream) {}
        LineMap& m;
        rapidjson::StringStream& ss;
        std::vector<Frame> stack;

        std::string next_pointer() {
            if (stack.empty()) return "";
            Frame& f = stack.back();
            if (f.array) return f.pointer + "/" + std::to_string(f.index++);
            return f.pointer + "/" + escape(f.key);
        }
        bool value() {
            m.lines_[next_pointer()] = m.line_of(ss.Tell() == 0 ? 0 : ss.Tell() - 1);
            return true;
        }
        bool Default() { return value(); }
        bool StartObject() { return open(false); }
        bool StartArray() { return open(true); }
        bool open(bool array) {
            const std::string p = next_pointer();
            m.lines_[p] = m.line_of(ss.Tell() == 0 ? 0 : ss.Tell() - 1);
            stack.push_back({p, array, 0, {}, {}});
            return true;
        }
        bool EndObject(rapidjson::SizeType) { return close(); }
        bool EndArray(rapidjson::SizeType) { return close(); }
        bool close() {
            stack.pop_back();
            return true;
        }
        bool Key(const char* s, rapidjson::SizeType n, bool) {
            Frame& f = stack.back();
            f.key.assign(s, n);
            if (!f.keys.insert(f.key).second) {
                m.duplicate_ = f.pointer + "/" + escape(f.key);
                m.duplicate_line_ = m.line_of(ss.Tell() == 0 ? 0 : ss.Tell() - 1);
                return false;
            }
            return true;
        }
        static std::string escape(const std::string& k) {
            std::string out;
            for (char c : k) {
                if (c == '~')
                    out += "~0";
                else if (c == '/')
                    out += "~1";
                else
                    out += c;
            }
            return out;
        }
    };

    [[nodiscard]] int line_of(std::size_t offset) const {
        return static_cast<int>(std::upper_bound(breaks_.begin(), breaks_.end(), offset) - breaks_.begin()) + 1;
    }

    std::vector<std::size_t> breaks_;
    std::map<std::string, int> lines_;
    std::string duplicate_;
    int duplicate_line_ = 0;
};

}  // namespace detail

enum class Kind { frontier, sumrate_sweep, wideband_sweep, beamforming_frontier, beamforming_wideband_sweep };

inline const char* to_string(Kind k) {
    switch (k) {
        case Kind::frontier: return "frontier";
        case Kind::sumrate_sweep: return "sumrate-sweep";
        case Kind::wideband_sweep: return "wideband-sweep";
        case Kind::beamforming_frontier: return "beamforming-frontier";
        case Kind::beamforming_wideband_sweep: return "beamforming-wideband-sweep";
    }
    return "?";
}

/// Scheme names accepted by each experiment kind.
inline std::vector<std::string> schemes_for(Kind k) {
    switch (k) {
        case Kind::frontier:
        case Kind::sumrate_sweep: return {"coop", "noncoop"};
        case Kind::wideband_sweep:
            return {"dual", "equal-power", "noncoop", "noncoop-dual", "coherent", "highsnr-waterfill"};
        case Kind::beamforming_frontier: return {"coop-bf", "noncoop-bf", "zf"};
        case Kind::beamforming_wideband_sweep: return {"bf-dual", "bf-zf-dual", "bf-equal-power", "nullspace", "coherent"};
    }
    return {};
}

struct ChannelSpec {
    ChannelMode mode = ChannelMode::scalar;
    std::size_t L = 1;
    std::size_t nt = 2;
    std::array<double, 4> mean_gains{1.0, 1.0, 1.0, 1.0};
    double rho = 0.0;
    std::uint64_t seed = 1;
    std::size_t n_trials = 20;
    std::optional<NarrowbandGains> gains;  // fixed narrowband instance
};

struct SolverSpec {
    std::size_t frontier_points = 51;
    DualSolveConfig dual;
    BfMethod bf_method = BfMethod::iterative;
    BfSearchConfig bf_search;
    BfDualConfig bf_dual;
};

struct ExperimentConfig {
    Kind kind = Kind::frontier;
    std::string name;
    ChannelSpec channel;
    std::vector<std::string> schemes;
    double mu = 1.0;
    std::vector<double> mu_list;
    std::vector<double> power;   // per-BTS power P per sweep point (per subcarrier in wideband kinds)
    std::vector<double> x_axis;  // reported sweep value: 10 log10(P)
    PowerBudget budget{5.0, 5.0};
    SolverSpec solver;
    std::string output_dir;  // empty: use the default directory
    std::size_t workers = 1;
    Json document;           // parsed configuration
    std::string hash;        // FNV-1a of the canonical document

    [[nodiscard]] std::uint64_t trial_seed(std::size_t trial) const { return channel.seed + trial; }
};

namespace detail {

inline std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 15];
    return out;
}

class ConfigReader {
public:
    ConfigReader(const LineMap& lines, std::string source) : lines_(lines), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        const int line = lines_.line(ptr);
        std::string where = source_;
        if (line > 0) where += ":" + std::to_string(line);
        throw ConfigError(ptr, line, where + ": " + (ptr.empty() ? "/" : ptr) + ": " + msg);
    }

    void allow_keys(const Json& obj, const std::string& ptr, std::initializer_list<const char*> keys) const {
        if (!obj.is_object()) fail(ptr, "object expected");
        for (const auto& [k, v] : obj.items()) {
            (void)v;
            if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
                fail(ptr + "/" + k, "unknown field '" + k + "'");
        }
    }

    [[nodiscard]] double number(const Json& j, const std::string& ptr) const {
        if (!j.is_number()) fail(ptr, "number expected");
        const double v = j.get<double>();
        if (!std::isfinite(v)) fail(ptr, "finite number expected");
        return v;
    }

    [[nodiscard]] std::uint64_t unsigned_int(const Json& j, const std::string& ptr) const {
        if (!j.is_number_unsigned()) fail(ptr, "non-negative integer expected");
        return j.get<std::uint64_t>();
    }

    [[nodiscard]] std::size_t count(const Json& j, const std::string& ptr, std::size_t lo, std::size_t hi) const {
        const std::uint64_t v = unsigned_int(j, ptr);
        if (v < lo || v > hi)
            fail(ptr, "must be in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<std::size_t>(v);
    }

    [[nodiscard]] std::string string(const Json& j, const std::string& ptr) const {
        if (!j.is_string()) fail(ptr, "string expected");
        return j.get<std::string>();
    }

    [[nodiscard]] std::vector<double> numbers(const Json& j, const std::string& ptr) const {
        if (!j.is_array()) fail(ptr, "array of numbers expected");
        std::vector<double> v;
        for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], ptr + "/" + std::to_string(i)));
        return v;
    }

    [[nodiscard]] std::array<double, 4> gains4(const Json& j, const std::string& ptr) const {
        const auto v = numbers(j, ptr);
        if (v.size() != 4) fail(ptr, "four values (g11, g21, g12, g22) expected");
        for (std::size_t i = 0; i < 4; ++i)
            if (v[i] < 0.0) fail(ptr + "/" + std::to_string(i), "gain must be non-negative");
        return {v[0], v[1], v[2], v[3]};
    }

private:
    const LineMap& lines_;
    std::string source_;
};

inline bool is_narrowband(Kind k) {
    return k == Kind::frontier || k == Kind::sumrate_sweep || k == Kind::beamforming_frontier;
}

inline bool is_miso(Kind k) { return k == Kind::beamforming_frontier || k == Kind::beamforming_wideband_sweep; }

inline bool is_sweep(Kind k) {
    return k == Kind::sumrate_sweep || k == Kind::wideband_sweep || k == Kind::beamforming_wideband_sweep;
}

}  // namespace detail

/// Parses and validates a configuration document. `source` names the
/// document in diagnostics.
inline ExperimentConfig parse_config(const std::string& text, const std::string& source = "config") {
    const detail::LineMap lines(text, source);
    const detail::ConfigReader r(lines, source);
    ExperimentConfig c;
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ConfigError("", 0, source + ": syntax error: " + e.what());
    }
    r.allow_keys(doc, "", {"experiment", "name", "channel", "schemes", "mu", "mu_list", "power", "snr_db", "budget",
                           "solver", "output", "workers"});
    if (!doc.contains("experiment")) r.fail("", "missing field 'experiment'");
    const std::string kind = r.string(doc["experiment"], "/experiment");
    bool found = false;
    for (Kind k : {Kind::frontier, Kind::sumrate_sweep, Kind::wideband_sweep, Kind::beamforming_frontier,
                   Kind::beamforming_wideband_sweep})
        if (kind == to_string(k)) {
            c.kind = k;
            found = true;
        }
    if (!found)
        r.fail("/experiment", "unknown experiment '" + kind +
                                  "' (expected frontier, sumrate-sweep, wideband-sweep, beamforming-frontier or "
                                  "beamforming-wideband-sweep)");
    c.name = doc.contains("name") ? r.string(doc["name"], "/name") : std::string(to_string(c.kind));
    if (c.name.empty() || c.name.find_first_of("/\\") != std::string::npos || c.name[0] == '.')
        r.fail("/name", "must be a plain file name");

    // channel
    ChannelSpec& ch = c.channel;
    ch.mode = detail::is_miso(c.kind) ? ChannelMode::miso : ChannelMode::scalar;
    bool means_given = false;
    if (doc.contains("channel")) {
        const Json& j = doc["channel"];
        r.allow_keys(j, "/channel", {"mode", "L", "Nt", "mean_gains", "rho", "seed", "n_trials", "gains"});
        if (j.contains("mode")) {
            const std::string m = r.string(j["mode"], "/channel/mode");
            if (m != "scalar" && m != "miso") r.fail("/channel/mode", "expected \"scalar\" or \"miso\"");
            if ((m == "miso") != detail::is_miso(c.kind))
                r.fail("/channel/mode", std::string("experiment '") + to_string(c.kind) + "' requires mode " +
                                            (detail::is_miso(c.kind) ? "\"miso\"" : "\"scalar\""));
        }
        if (j.contains("L")) ch.L = r.count(j["L"], "/channel/L", 1, 1u << 16);
        if (detail::is_narrowband(c.kind) && ch.L != 1) r.fail("/channel/L", "narrowband experiments use L = 1");
        if (j.contains("Nt")) {
            if (!detail::is_miso(c.kind)) r.fail("/channel/Nt", "only MISO experiments take Nt");
            ch.nt = r.count(j["Nt"], "/channel/Nt", 2, 16);
        }
        if (j.contains("mean_gains")) {
            ch.mean_gains = r.gains4(j["mean_gains"], "/channel/mean_gains");
            means_given = true;
        }
        if (j.contains("rho")) {
            ch.rho = r.number(j["rho"], "/channel/rho");
            if (!(ch.rho >= 0.0 && ch.rho < 1.0)) r.fail("/channel/rho", "must be in [0,1)");
        }
        if (j.contains("seed")) ch.seed = r.unsigned_int(j["seed"], "/channel/seed");
        if (j.contains("n_trials")) ch.n_trials = r.count(j["n_trials"], "/channel/n_trials", 1, 1000000);
        if (j.contains("gains")) {
            if (c.kind != Kind::frontier && c.kind != Kind::sumrate_sweep)
                r.fail("/channel/gains", "fixed gains are only accepted by scalar narrowband experiments");
            const auto g = r.gains4(j["gains"], "/channel/gains");
            ch.gains = NarrowbandGains{g[0], g[1], g[2], g[3]};
            if (j.contains("n_trials") && ch.n_trials != 1)
                r.fail("/channel/n_trials", "must be 1 when fixed gains are given");
            ch.n_trials = 1;
        }
    }
    if (!means_given && ch.mode == ChannelMode::miso) ch.mean_gains.fill(1.0 / static_cast<double>(ch.nt));

    // schemes
    if (!doc.contains("schemes")) r.fail("", "missing field 'schemes'");
    const Json& sj = doc["schemes"];
    if (!sj.is_array() || sj.empty()) r.fail("/schemes", "non-empty array of scheme names expected");
    const auto known = schemes_for(c.kind);
    for (std::size_t i = 0; i < sj.size(); ++i) {
        const std::string ptr = "/schemes/" + std::to_string(i);
        const std::string s = r.string(sj[i], ptr);
        if (std::find(known.begin(), known.end(), s) == known.end()) {
            std::string list;
            for (const auto& k : known) list += (list.empty() ? "" : ", ") + k;
            r.fail(ptr, "unknown scheme '" + s + "' for experiment '" + to_string(c.kind) + "' (expected one of " + list + ")");
        }
        if (std::find(c.schemes.begin(), c.schemes.end(), s) != c.schemes.end()) r.fail(ptr, "duplicate scheme '" + s + "'");
        c.schemes.push_back(s);
    }

    if (doc.contains("mu")) {
        c.mu = r.number(doc["mu"], "/mu");
        if (c.mu < 0.0) r.fail("/mu", "must be non-negative");
    }
    const bool uses_mu_list = c.kind == Kind::beamforming_frontier;
    if (doc.contains("mu_list")) {
        if (!uses_mu_list) r.fail("/mu_list", "only beamforming-frontier experiments take mu_list");
        c.mu_list = r.numbers(doc["mu_list"], "/mu_list");
        if (c.mu_list.empty()) r.fail("/mu_list", "must not be empty");
        for (std::size_t i = 0; i < c.mu_list.size(); ++i)
            if (c.mu_list[i] < 0.0) r.fail("/mu_list/" + std::to_string(i), "must be non-negative");
    } else if (uses_mu_list) {
        c.mu_list = {0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 10.0};
    }
    if (c.kind == Kind::wideband_sweep && c.mu != 1.0 &&
        std::find(c.schemes.begin(), c.schemes.end(), "highsnr-waterfill") != c.schemes.end())
        r.fail("/mu", "highsnr-waterfill requires mu = 1");

    // power axis
    if (doc.contains("power") && doc.contains("snr_db")) r.fail("/snr_db", "give either 'power' or 'snr_db', not both");
    if (detail::is_sweep(c.kind)) {
        if (doc.contains("power")) {
            c.power = r.numbers(doc["power"], "/power");
            for (std::size_t i = 0; i < c.power.size(); ++i) {
                if (!(c.power[i] > 0.0)) r.fail("/power/" + std::to_string(i), "must be positive");
                c.x_axis.push_back(10.0 * std::log10(c.power[i]));
            }
        } else if (doc.contains("snr_db")) {
            c.x_axis = r.numbers(doc["snr_db"], "/snr_db");
            for (double x : c.x_axis) c.power.push_back(std::pow(10.0, x / 10.0));
        } else {
            r.fail("", "missing field 'power' or 'snr_db'");
        }
        if (c.power.empty()) r.fail(doc.contains("power") ? "/power" : "/snr_db", "must not be empty");
        if (doc.contains("budget")) r.fail("/budget", "sweep experiments take 'power' or 'snr_db' instead");
    } else {
        if (doc.contains("power") || doc.contains("snr_db"))
            r.fail(doc.contains("power") ? "/power" : "/snr_db", "frontier experiments take 'budget' instead");
        if (c.kind == Kind::beamforming_frontier) c.budget = {3.0, 3.0};
        if (doc.contains("budget")) {
            const auto b = r.numbers(doc["budget"], "/budget");
            if (b.size() != 2) r.fail("/budget", "two budgets [P1, P2] expected");
            for (std::size_t i = 0; i < 2; ++i)
                if (b[i] < 0.0) r.fail("/budget/" + std::to_string(i), "must be non-negative");
            c.budget = {b[0], b[1]};
        }
    }

    // solver
    if (doc.contains("solver")) {
        const Json& j = doc["solver"];
        r.allow_keys(j, "/solver", {"frontier_points", "eps_lambda", "power_tol", "fill_steps", "bf_method",
                                    "bf_n_angle", "bf_n_power", "bf_grid_step", "bf_grid_below", "bf_grid_above"});
        SolverSpec& s = c.solver;
        if (j.contains("frontier_points")) s.frontier_points = r.count(j["frontier_points"], "/solver/frontier_points", 2, 100000);
        auto positive = [&](const char* key) {
            const std::string ptr = std::string("/solver/") + key;
            const double v = r.number(j[key], ptr);
            if (!(v > 0.0)) r.fail(ptr, "must be positive");
            return v;
        };
        if (j.contains("eps_lambda")) s.dual.dual.eps_lambda = s.bf_dual.dual.eps_lambda = positive("eps_lambda");
        if (j.contains("power_tol")) s.dual.dual.power_tol = s.bf_dual.dual.power_tol = positive("power_tol");
        if (j.contains("fill_steps"))
            s.dual.dual.fill_steps = s.bf_dual.dual.fill_steps =
                static_cast<int>(r.count(j["fill_steps"], "/solver/fill_steps", 0, 100000));
        if (j.contains("bf_method")) {
            const std::string m = r.string(j["bf_method"], "/solver/bf_method");
            if (m == "iterative")
                s.bf_method = BfMethod::iterative;
            else if (m == "exhaustive")
                s.bf_method = BfMethod::exhaustive;
            else
                r.fail("/solver/bf_method", "expected \"iterative\" or \"exhaustive\"");
        }
        if (j.contains("bf_n_angle")) s.bf_search.n_angle = r.count(j["bf_n_angle"], "/solver/bf_n_angle", 3, 100000);
        if (j.contains("bf_n_power")) s.bf_search.n_power = r.count(j["bf_n_power"], "/solver/bf_n_power", 3, 100000);
        if (j.contains("bf_grid_step")) {
            s.bf_dual.grid_step = r.number(j["bf_grid_step"], "/solver/bf_grid_step");
            if (!(s.bf_dual.grid_step > 1.0)) r.fail("/solver/bf_grid_step", "must exceed 1");
        }
        if (j.contains("bf_grid_below"))
            s.bf_dual.grid_below = static_cast<int>(r.count(j["bf_grid_below"], "/solver/bf_grid_below", 0, 64));
        if (j.contains("bf_grid_above"))
            s.bf_dual.grid_above = static_cast<int>(r.count(j["bf_grid_above"], "/solver/bf_grid_above", 0, 64));
    }

    if (doc.contains("output")) {
        const Json& j = doc["output"];
        r.allow_keys(j, "/output", {"dir"});
        if (j.contains("dir")) c.output_dir = r.string(j["dir"], "/output/dir");
    }
    if (doc.contains("workers")) c.workers = r.count(doc["workers"], "/workers", 1, 256);

    c.document = doc;
    c.hash = detail::fnv1a_hex(doc.dump());
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", 0, path.string() + ": cannot open file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

/// One long-format result row.
struct Row {
    std::string scheme;
    double x = 0.0;  // SNR in dB, mu, or R1 target depending on the experiment
    std::string metric;
    double value = 0.0;
};

namespace detail {

inline WidebandChannel trial_channel(const ExperimentConfig& c, std::uint64_t seed) {
    const ChannelSpec& s = c.channel;
    if (s.mode == ChannelMode::miso) return generate_wideband_miso(s.L, s.nt, s.mean_gains, s.rho, seed);
    return generate_wideband_scalar(s.L, s.mean_gains, s.rho, seed);
}

inline std::vector<Row> frontier_rows(const ExperimentConfig& c, const NarrowbandGains& g) {
    std::vector<Row> rows;
    const PowerBudget& b = c.budget;
    const std::size_t n = c.solver.frontier_points;
    const double r1max = max_single_rate(g, b, 1);
    const double nc_max = std::log2(1.0 + g.g11 * b.p1);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = r1max * static_cast<double>(i) / static_cast<double>(n - 1);
        for (const auto& s : c.schemes) {
            RatePair rates;
            PowerAllocation p;
            if (s == "coop") {
                const FrontierPoint f = frontier_point(g, b, t);
                rates = f.rates;
                p = f.alloc;
            } else {
                if (t > nc_max) continue;
                const NoncoopResult f = noncoop_frontier_point(g, b, t);
                rates = f.rates;
                p = {f.p1, 0.0, 0.0, f.p2};
            }
            for (auto [m, v] : {std::pair{"R1", rates.r1}, {"R2", rates.r2}, {"P11", p.p11}, {"P21", p.p21},
                                {"P12", p.p12}, {"P22", p.p22}})
                rows.push_back({s, t, m, v});
        }
    }
    return rows;
}

inline std::vector<Row> run_trial(const ExperimentConfig& c, std::size_t trial) {
    const std::uint64_t seed = c.trial_seed(trial);
    std::vector<Row> rows;
    switch (c.kind) {
        case Kind::frontier: {
            const NarrowbandGains g = c.channel.gains ? *c.channel.gains : random_gains(c.channel.mean_gains, seed);
            return frontier_rows(c, g);
        }
        case Kind::sumrate_sweep: {
            const NarrowbandGains g = c.channel.gains ? *c.channel.gains : random_gains(c.channel.mean_gains, seed);
            for (std::size_t i = 0; i < c.power.size(); ++i) {
                const PowerBudget b{c.power[i], c.power[i]};
                for (const auto& s : c.schemes) {
                    const double v = s == "coop" ? max_weighted_sum_rate(g, b, c.mu).rate : noncoop_power_control(g, b, c.mu).value;
                    rows.push_back({s, c.x_axis[i], "weighted_sum_rate", v});
                }
            }
            return rows;
        }
        case Kind::wideband_sweep: {
            const WidebandChannel ch = trial_channel(c, seed);
            const double L = static_cast<double>(ch.size());
            for (std::size_t i = 0; i < c.power.size(); ++i) {
                const PowerBudget b{L * c.power[i], L * c.power[i]};
                for (const auto& s : c.schemes) {
                    double v = 0.0;
                    if (s == "dual") {
                        const WidebandAllocation a = dual_solve(ch, b, c.mu, c.solver.dual);
                        rows.push_back({s, c.x_axis[i], "relative_duality_gap", a.relative_gap()});
                        v = a.value;
                    } else if (s == "equal-power") {
                        v = equal_power_coop(ch, b, c.mu).value;
                    } else if (s == "noncoop") {
                        v = noncoop_wideband(ch, b, c.mu).value;
                    } else if (s == "noncoop-dual") {
                        v = noncoop_wideband_dual(ch, b, c.mu, c.solver.dual).value;
                    } else if (s == "coherent") {
                        v = coherent_upper_baseline(ch, b, c.mu).value;
                    } else {
                        const WidebandAllocation a = highsnr_waterfill(ch, b, c.mu);
                        rows.push_back({s, c.x_axis[i], "upper_bound_per_subcarrier", *a.upper_bound / L});
                        v = a.value;
                    }
                    rows.push_back({s, c.x_axis[i], "rate_per_subcarrier", v / L});
                }
            }
            return rows;
        }
        case Kind::beamforming_frontier: {
            const MisoChannel h = trial_channel(c, seed).miso.front();
            for (const auto& s : c.schemes) {
                for (double mu : c.mu_list) {
                    RatePair r;
                    if (s == "coop-bf")
                        r = max_weighted_sum_rate_bf(h, c.budget, mu, c.solver.bf_method, c.solver.bf_search).rates;
                    else if (s == "noncoop-bf")
                        r = noncoop_nullspace_bf(h, c.budget, mu, c.solver.bf_search).rates;
                    else
                        r = zf_rate_pair(h, c.budget);
                    rows.push_back({s, mu, "R1", r.r1});
                    rows.push_back({s, mu, "R2", r.r2});
                }
            }
            return rows;
        }
        case Kind::beamforming_wideband_sweep: {
            const WidebandChannel ch = trial_channel(c, seed);
            const double L = static_cast<double>(ch.size());
            for (std::size_t i = 0; i < c.power.size(); ++i) {
                const PowerBudget b{L * c.power[i], L * c.power[i]};
                for (const auto& s : c.schemes) {
                    double v = 0.0;
                    if (s == "bf-dual" || s == "bf-zf-dual") {
                        BfDualConfig cfg = c.solver.bf_dual;
                        cfg.force_zero_forcing = s == "bf-zf-dual";
                        v = wideband_bf_dual_solve(ch, b, c.mu, cfg).value;
                    } else if (s == "bf-equal-power") {
                        v = equal_power_coop_bf(ch, b, c.mu, c.solver.bf_search).value;
                    } else if (s == "nullspace") {
                        v = noncoop_nullspace_bf(ch, b, c.mu).value;
                    } else {
                        v = coherent_upper_baseline(ch, b, c.mu).value;
                    }
                    rows.push_back({s, c.x_axis[i], "rate_per_subcarrier", v / L});
                }
            }
            return rows;
        }
    }
    return rows;
}

}  // namespace detail

struct Aggregate {
    std::string scheme;
    double x = 0.0;
    std::string metric;
    std::size_t n = 0;
    double mean = 0.0;
    double stderr_ = 0.0;
};

struct TrialFailure {
    std::size_t trial = 0;
    std::string message;
};

struct ExperimentResult {
    std::vector<std::vector<Row>> trials;  // completed trials in order, up to the first failure
    std::optional<TrialFailure> failure;
    std::vector<Aggregate> summary;
};

/// Mean and standard error per (scheme, x, metric), in first-appearance order.
inline std::vector<Aggregate> aggregate(const std::vector<std::vector<Row>>& trials) {
    std::vector<Aggregate> out;
    std::map<std::tuple<std::string, double, std::string>, std::size_t> index;
    std::vector<std::vector<double>> values;
    for (const auto& rows : trials)
        for (const auto& r : rows) {
            const auto key = std::make_tuple(r.scheme, r.x, r.metric);
            auto it = index.find(key);
            if (it == index.end()) {
                it = index.emplace(key, out.size()).first;
                out.push_back({r.scheme, r.x, r.metric});
                values.emplace_back();
            }
            values[it->second].push_back(r.value);
        }
    for (std::size_t i = 0; i < out.size(); ++i) {
        const auto& v = values[i];
        const double n = static_cast<double>(v.size());
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        out[i].n = v.size();
        out[i].mean = mean;
        out[i].stderr_ = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    }
    return out;
}

/// Runs every trial on up to `workers` threads; results are kept in trial order.
inline ExperimentResult run_experiment(const ExperimentConfig& c, std::size_t workers = 0) {
    if (workers == 0) workers = c.workers;
    const std::size_t n = c.channel.n_trials;
    std::vector<std::vector<Row>> rows(n);
    std::vector<std::optional<std::string>> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t t = next++; t < n; t = next++) {
            try {
                rows[t] = detail::run_trial(c, t);
            } catch (const std::exception& e) {
                errors[t] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < std::min(workers, n); ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();

    ExperimentResult r;
    for (std::size_t t = 0; t < n; ++t) {
        if (errors[t]) {
            r.failure = TrialFailure{t, *errors[t]};
            break;
        }
        r.trials.push_back(std::move(rows[t]));
    }
    r.summary = aggregate(r.trials);
    return r;
}

inline std::string results_csv(const ExperimentConfig& c, const ExperimentResult& r) {
    std::string out;
    io::csv_row(out, {"experiment", "scheme", "snr_or_mu", "trial", "metric", "value"});
    for (std::size_t t = 0; t < r.trials.size(); ++t)
        for (const auto& row : r.trials[t])
            io::csv_row(out, {c.name, row.scheme, io::format_double(row.x), std::to_string(t), row.metric,
                              io::format_double(row.value)});
    return out;
}

inline Json summary_json(const ExperimentConfig& c, const ExperimentResult& r, const std::string& csv_name) {
    Json seeds = Json::array();
    for (std::size_t t = 0; t < c.channel.n_trials; ++t) seeds.push_back(c.trial_seed(t));
    Json rows = Json::array();
    for (const auto& a : r.summary)
        rows.push_back({{"scheme", a.scheme}, {"snr_or_mu", a.x}, {"metric", a.metric}, {"n", a.n}, {"mean", a.mean},
                        {"stderr", a.stderr_}});
    Json j{{"experiment", to_string(c.kind)},
           {"name", c.name},
           {"config_hash", c.hash},
           {"seed", c.channel.seed},
           {"trial_seeds", std::move(seeds)},
           {"trials_completed", r.trials.size()},
           {"version", version},
           {"csv", csv_name},
           {"status", r.failure ? "error" : "ok"},
           {"summary", std::move(rows)},
           {"config", c.document}};
    if (r.failure) j["error"] = {{"trial", r.failure->trial}, {"message", r.failure->message}};
    return j;
}

struct RunOutput {
    std::filesystem::path csv;
    std::filesystem::path json;
    ExperimentResult result;
};

/// Runs the experiment and writes <dir>/<name>.csv and <dir>/<name>.json.
inline RunOutput run_and_write(const ExperimentConfig& c, const std::filesystem::path& dir, std::size_t workers = 0) {
    RunOutput o;
    o.result = run_experiment(c, workers);
    std::filesystem::create_directories(dir);
    o.csv = dir / (c.name + ".csv");
    o.json = dir / (c.name + ".json");
    {
        std::ofstream f(o.csv, std::ios::binary);
        f << results_csv(c, o.result);
        if (!f) throw std::runtime_error("cannot write " + o.csv.string());
    }
    {
        std::ofstream f(o.json, std::ios::binary);
        f << summary_json(c, o.result, o.csv.filename().string()).dump(2) << '\n';
        if (!f) throw std::runtime_error("cannot write " + o.json.string());
    }
    return o;
}

}  // namespace nccoop::experiment

#endif
