#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "erl/certify.hpp"
#include "erl/rates.hpp"

namespace erl {

using json = nlohmann::json;

inline json fit_json(const LogLogFit& f) {
    return json{{"value", f.slope},
                {"stderr", f.slope_stderr},
                {"band_lo", f.slope - 2.0 * f.slope_stderr},
                {"band_hi", f.slope + 2.0 * f.slope_stderr},
                {"r_squared", f.r_squared},
                {"points", f.points}};
}

/// Certificate report as JSON: experiment id, parameters, one entry per check
/// with value/threshold/pass, and the stored series.
inline json report_json(const CertificateReport& rep, const std::string& experiment,
                        const json& params) {
    if (rep.t.empty()) throw std::invalid_argument("refusing to emit a report with empty series");
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"value", c.value},
                          {"threshold", c.threshold},
                          {"pass", c.pass},
                          {"note", c.note}});
    json j{{"experiment", experiment},
           {"params", params},
           {"checks", checks},
           {"series",
            {{"t", rep.t},
             {"relE", rep.rel_energy},
             {"D", rep.d_series},
             {"gronwall_bound", rep.bound}}},
           {"slopes", nullptr},
           {"verdict", rep.verdict()}};
    if (rep.r5) {
        json r5{{"eps", rep.r5->eps}};
        std::vector<double> b1, b2, b3;
        for (const auto& t : rep.r5->terms) {
            b1.push_back(t.convective);
            b2.push_back(t.time_derivative);
            b3.push_back(t.continuity);
        }
        r5["convective"] = b1;
        r5["time_derivative"] = b2;
        r5["continuity"] = b3;
        j["r5"] = r5;
    }
    return j;
}

/// Rate-study report: fitted slopes with confidence bands plus the eps table.
inline json rate_report_json(const std::string& experiment, const json& params,
                             const std::vector<std::string>& names,
                             const std::vector<LogLogFit>& fits,
                             const std::vector<double>& eps,
                             const std::vector<std::vector<double>>& tables,
                             const std::vector<std::string>& table_names, bool pass) {
    if (eps.empty()) throw std::invalid_argument("refusing to emit a report with empty eps table");
    json slopes;
    for (std::size_t i = 0; i < names.size(); ++i) slopes[names[i]] = fit_json(fits[i]);
    json series{{"t", eps}};
    for (std::size_t i = 0; i < tables.size(); ++i) series[table_names[i]] = tables[i];
    return json{{"experiment", experiment}, {"params", params},
                {"checks", json::array()},  {"series", series},
                {"slopes", slopes},         {"verdict", pass ? "PASS" : "FAIL"}};
}

/// Structural validation of a report against the documented schema. Returns
/// false and fills `why` on the first violation.
inline bool validate_report_schema(const json& j, std::string* why = nullptr) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (const char* key : {"experiment", "params", "checks", "series", "slopes", "verdict"})
        if (!j.contains(key)) return fail(std::string("missing field: ") + key);
    if (!j["experiment"].is_string()) return fail("experiment must be a string");
    if (!j["params"].is_object()) return fail("params must be an object");
    if (!j["checks"].is_array()) return fail("checks must be an array");
    for (const auto& c : j["checks"]) {
        for (const char* key : {"name", "value", "threshold", "pass"})
            if (!c.contains(key)) return fail(std::string("check missing field: ") + key);
        if (!c["name"].is_string() || !c["pass"].is_boolean()) return fail("check field types");
        if (!c["value"].is_number() || !c["threshold"].is_number()) return fail("check field types");
    }
    if (!j["series"].is_object() || j["series"].empty()) return fail("series must be a nonempty object");
    for (const auto& [k, v] : j["series"].items()) {
        if (!v.is_array() || v.empty()) return fail("series " + k + " must be a nonempty array");
        for (const auto& x : v)
            if (!x.is_number()) return fail("series " + k + " must hold numbers");
    }
    if (!j["slopes"].is_null() && !j["slopes"].is_object()) return fail("slopes must be object/null");
    if (!j["verdict"].is_string() ||
        (j["verdict"] != "PASS" && j["verdict"] != "FAIL"))
        return fail("verdict must be PASS or FAIL");
    return true;
}

inline void write_json(const std::string& path, const json& j) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << j.dump(2) << "\n";
}

/// One column per series, for external plotting.
inline void write_series_csv(const std::string& path, const json& series) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    std::vector<std::string> names;
    std::size_t rows = 0;
    for (const auto& [k, v] : series.items()) {
        names.push_back(k);
        rows = std::max(rows, v.size());
    }
    for (std::size_t i = 0; i < names.size(); ++i) f << (i ? "," : "") << names[i];
    f << "\n";
    f.precision(17);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t i = 0; i < names.size(); ++i) {
            f << (i ? "," : "");
            const auto& col = series[names[i]];
            if (r < col.size()) f << col[r].get<double>();
        }
        f << "\n";
    }
}

/// Merges report JSONs into one CSV summary row per report.
inline std::string merge_reports_csv(const std::vector<json>& reports) {
    std::ostringstream out;
    out << "experiment,verdict,checks_total,checks_passed,first_failed\n";
    for (const auto& j : reports) {
        int total = 0, passed = 0;
        std::string first_failed;
        for (const auto& c : j["checks"]) {
            ++total;
            if (c["pass"].get<bool>())
                ++passed;
            else if (first_failed.empty())
                first_failed = c["name"].get<std::string>();
        }
        out << j["experiment"].get<std::string>() << "," << j["verdict"].get<std::string>() << ","
            << total << "," << passed << "," << first_failed << "\n";
    }
    return out.str();
}

}  // namespace erl
