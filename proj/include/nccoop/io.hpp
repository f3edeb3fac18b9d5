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

#ifndef NCCOOP_IO_HPP
#define NCCOOP_IO_HPP

#include <nccoop/channel.hpp>
#include <nccoop/error.hpp>
#include <nccoop/narrowband.hpp>
#include <nccoop/wideband.hpp>

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace nccoop::io {

using Json = nlohmann::json;

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

/// Quotes a CSV field when it holds a comma, quote or line break.
inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

inline void csv_row(std::string& out, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += csv_field(fields[i]);
    }
    out += "\r\n";
}


inline std::string frontier_csv(const std::vector<FrontierPoint>& pts) {
    std::string out;
    csv_row(out, {"R1", "R2", "P11", "P21", "P12", "P22", "regime"});
    for (const auto& p : pts)
        csv_row(out, {format_double(p.rates.r1), format_double(p.rates.r2), format_double(p.alloc.p11),
                      format_double(p.alloc.p21), format_double(p.alloc.p12), format_double(p.alloc.p22),
                      to_string(p.regime)});
    return out;
}

inline Json to_json(const FrontierPoint& p) {
    return {{"R1", p.rates.r1},     {"R2", p.rates.r2},     {"P11", p.alloc.p11}, {"P21", p.alloc.p21},
            {"P12", p.alloc.p12}, {"P22", p.alloc.p22}, {"regime", to_string(p.regime)}};
}

inline Json frontier_json(const std::vector<FrontierPoint>& pts) {
    Json a = Json::array();
    for (const auto& p : pts) a.push_back(to_json(p));
    return a;
}

inline Json to_json(const WeightedSumRateResult& r) {
    return {{"rate", r.rate},           {"R1", r.rates.r1},         {"R2", r.rates.r2},
            {"P11", r.alloc.p11},       {"P21", r.alloc.p21},       {"P12", r.alloc.p12},
            {"P22", r.alloc.p22},       {"candidate", r.candidate_id}};
}


inline std::string allocation_csv(const WidebandChannel& ch, const WidebandAllocation& a) {
    if (a.size() != ch.size()) throw ParameterError("allocation_csv: allocation size does not match the channel");
    const bool beams = a.split.size() == a.size() && a.beta.size() == a.size();
    std::vector<std::string> head{"l", "g11", "g21", "g12", "g22", "P1", "P2", "scheme", "rate_contribution"};
    if (beams)
        for (const char* h : {"P11", "P21", "P12", "P22", "beta11", "beta21", "beta12", "beta22", "alpha1", "alpha2"})
            head.emplace_back(h);
    std::string out;
    csv_row(out, head);
    for (std::size_t l = 0; l < a.size(); ++l) {
        const NarrowbandGains g = ch.gains(l);
        std::vector<std::string> row{std::to_string(l),     format_double(g.g11),   format_double(g.g21),
                                     format_double(g.g12),  format_double(g.g22),   format_double(a.p1[l]),
                                     format_double(a.p2[l]), to_string(a.scheme[l]), format_double(a.rate[l])};
        if (beams) {
            const auto& s = a.split[l];
            for (double v : {s.p11, s.p21, s.p12, s.p22}) row.push_back(format_double(v));
            for (double v : a.beta[l]) row.push_back(format_double(v));
            const bool miso = ch.mode == ChannelMode::miso;
            row.push_back(miso ? format_double(ch.miso[l].alpha(1)) : "");
            row.push_back(miso ? format_double(ch.miso[l].alpha(2)) : "");
        }
        csv_row(out, row);
    }
    return out;
}

inline Json allocation_json(const WidebandAllocation& a) {
    Json sub = Json::array();
    for (std::size_t l = 0; l < a.size(); ++l) {
        Json s{{"l", l}, {"P1", a.p1[l]}, {"P2", a.p2[l]}, {"scheme", to_string(a.scheme[l])}, {"rate_contribution", a.rate[l]}};
        if (l < a.split.size()) {
            const auto& p = a.split[l];
            s["split"] = {p.p11, p.p21, p.p12, p.p22};
        }
        if (l < a.beta.size()) s["beta"] = a.beta[l];
        sub.push_back(std::move(s));
    }
    Json it = Json::array();
    for (const auto& i : a.iterates)
        it.push_back({{"lambda1", i.lambda1}, {"lambda2", i.lambda2}, {"dual_value", i.dual_value},
                      {"total1", i.total1}, {"total2", i.total2}});
    Json j{{"value", a.value},
           {"lambda1", a.lambda1},
           {"lambda2", a.lambda2},
           {"dual_value", a.dual_value},
           {"duality_gap", a.duality_gap},
           {"weak_duality", a.weak_duality},
           {"total_power", {a.total(1), a.total(2)}},
           {"subcarriers", std::move(sub)},
           {"iterates", std::move(it)}};
    if (a.upper_bound) j["upper_bound"] = *a.upper_bound;
    return j;
}


inline Json to_json(const WidebandChannel& ch) {
    Json subs = Json::array();
    auto vec = [](const CVector& v) {
        Json a = Json::array();
        for (const auto& z : v) a.push_back({z.real(), z.imag()});
        return a;
    };
    for (std::size_t l = 0; l < ch.size(); ++l) {
        if (ch.mode == ChannelMode::scalar) {
            const auto& g = ch.scalar[l];
            subs.push_back({g.g11, g.g21, g.g12, g.g22});
        } else {
            const auto& h = ch.miso[l];
            subs.push_back({{"h11", vec(h.h11)}, {"h21", vec(h.h21)}, {"h12", vec(h.h12)}, {"h22", vec(h.h22)}});
        }
    }
    Json j{{"L", ch.size()},
           {"mode", to_string(ch.mode)},
           {"subcarriers", std::move(subs)},
           {"meta", {{"mean_gains", ch.meta.mean_gains}, {"rho", ch.meta.rho}, {"seed", ch.meta.seed}}}};
    if (ch.mode == ChannelMode::miso) j["Nt"] = ch.nt;
    return j;
}

namespace detail {

inline const Json& field(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) throw ParameterError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
    if (!j.is_number()) throw ParameterError(where + ": number expected");
    return j.get<double>();
}

inline CVector complex_vector(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParameterError(where + ": array of [re, im] pairs expected");
    CVector v;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const Json& z = j[i];
        const std::string w = where + "/" + std::to_string(i);
        if (!z.is_array() || z.size() != 2) throw ParameterError(w + ": [re, im] pair expected");
        v.emplace_back(number(z[0], w + "/0"), number(z[1], w + "/1"));
    }
    return v;
}

}  // namespace detail

inline WidebandChannel channel_from_json(const Json& j) {
    using detail::field;
    using detail::number;
    WidebandChannel ch;
    const Json& mode = field(j, "mode", "/");
    if (mode == "scalar")
        ch.mode = ChannelMode::scalar;
    else if (mode == "miso")
        ch.mode = ChannelMode::miso;
    else
        throw ParameterError("/mode: expected \"scalar\" or \"miso\"");
    const Json& subs = field(j, "subcarriers", "/");
    if (!subs.is_array()) throw ParameterError("/subcarriers: array expected");
    for (std::size_t l = 0; l < subs.size(); ++l) {
        const std::string w = "/subcarriers/" + std::to_string(l);
        const Json& s = subs[l];
        if (ch.mode == ChannelMode::scalar) {
            if (!s.is_array() || s.size() != 4) throw ParameterError(w + ": four gains expected");
            ch.scalar.push_back({number(s[0], w), number(s[1], w), number(s[2], w), number(s[3], w)});
        } else {
            ch.miso.push_back({detail::complex_vector(field(s, "h11", w), w + "/h11"),
                               detail::complex_vector(field(s, "h21", w), w + "/h21"),
                               detail::complex_vector(field(s, "h12", w), w + "/h12"),
                               detail::complex_vector(field(s, "h22", w), w + "/h22")});
        }
    }
    const Json& L = field(j, "L", "/");
    if (!L.is_number_unsigned() || L.get<std::size_t>() != ch.size())
        throw ParameterError("/L: must equal the number of subcarriers");
    if (ch.mode == ChannelMode::miso) {
        const Json& nt = field(j, "Nt", "/");
        if (!nt.is_number_unsigned()) throw ParameterError("/Nt: positive integer expected");
        ch.nt = nt.get<std::size_t>();
    }
    if (j.contains("meta")) {
        const Json& m = j.at("meta");
        if (m.contains("mean_gains")) {
            const Json& mg = m.at("mean_gains");
            if (!mg.is_array() || mg.size() != 4) throw ParameterError("/meta/mean_gains: four numbers expected");
            for (std::size_t i = 0; i < 4; ++i) ch.meta.mean_gains[i] = number(mg[i], "/meta/mean_gains");
        }
        if (m.contains("rho")) ch.meta.rho = number(m.at("rho"), "/meta/rho");
        if (m.contains("seed")) {
            if (!m.at("seed").is_number_unsigned()) throw ParameterError("/meta/seed: unsigned integer expected");
            ch.meta.seed = m.at("seed").get<std::uint64_t>();
        }
    }
    ch.validate();
    return ch;
}

}  // namespace nccoop::io

#endif
