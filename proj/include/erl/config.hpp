#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "erl/errors.hpp"
#include "erl/fv_solver.hpp"
#include "erl/grid.hpp"
#include "erl/pressure.hpp"

namespace erl {

/// Line-based key = value configuration with [section] headers. Unknown keys
/// are rejected rather than silently defaulted.
class ConfigMap {
  public:
    static ConfigMap parse(const std::string& text) {
        ConfigMap cfg;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
                section = trim(s.substr(1, s.size() - 2));
                cfg.sections_.push_back(section);
                continue;
            }
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
            std::string full = section + "." + key;
            if (cfg.values_.count(full))
                throw ConfigError("duplicate key [" + section + "] " + key);
            cfg.values_[full] = value;
            cfg.order_.push_back(full);
        }
        return cfg;
    }

    static ConfigMap parse_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw ConfigError("cannot open config file " + path);
        std::string text((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
        return parse(text);
    }

    bool has(const std::string& section, const std::string& key) const {
        return values_.count(section + "." + key) > 0;
    }

    std::string get(const std::string& section, const std::string& key) const {
        auto it = values_.find(section + "." + key);
        if (it == values_.end())
            throw ConfigError("missing required key [" + section + "] " + key);
        accessed_.insert(section + "." + key);
        return it->second;
    }

    std::string get_or(const std::string& section, const std::string& key,
                       const std::string& fallback) const {
        if (!has(section, key)) return fallback;
        return get(section, key);
    }

    double get_double(const std::string& section, const std::string& key) const {
        return to_double(section, key, get(section, key));
    }

    double get_double_or(const std::string& section, const std::string& key, double fallback) const {
        if (!has(section, key)) return fallback;
        return get_double(section, key);
    }

    int get_int(const std::string& section, const std::string& key) const {
        double d = get_double(section, key);
        int i = static_cast<int>(std::llround(d));
        if (std::abs(d - i) > 1e-9)
            throw ConfigError("key [" + section + "] " + key + " must be an integer");
        return i;
    }

    int get_int_or(const std::string& section, const std::string& key, int fallback) const {
        if (!has(section, key)) return fallback;
        return get_int(section, key);
    }

    std::vector<double> get_list(const std::string& section, const std::string& key) const {
        std::istringstream in(get(section, key));
        std::vector<double> out;
        std::string tok;
        while (in >> tok) out.push_back(to_double(section, key, tok));
        if (out.empty()) throw ConfigError("key [" + section + "] " + key + " must list numbers");
        return out;
    }

    /// Every present key must have been consumed; misspellings are fatal.
    void reject_unknown() const {
        for (const auto& full : order_)
            if (!accessed_.count(full)) {
                auto dot = full.find('.');
                throw ConfigError("unknown key [" + full.substr(0, dot) + "] " +
                                  full.substr(dot + 1));
            }
    }

    /// Canonical re-emission: sections in first-seen order, keys in file order.
    std::string emit() const {
        std::ostringstream out;
        std::vector<std::string> seen;
        for (const auto& sec : sections_) {
            if (std::find(seen.begin(), seen.end(), sec) != seen.end()) continue;
            seen.push_back(sec);
            out << "[" << sec << "]\n";
            for (const auto& full : order_) {
                auto dot = full.find('.');
                if (full.substr(0, dot) != sec) continue;
                out << full.substr(dot + 1) << " = " << values_.at(full) << "\n";
            }
            out << "\n";
        }
        return out.str();
    }

  private:
    static std::string trim(const std::string& s) {
        auto b = s.find_first_not_of(" \t\r\n");
        auto e = s.find_last_not_of(" \t\r\n");
        return b == std::string::npos ? "" : s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& section, const std::string& key,
                            const std::string& v) {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument("trailing");
            return d;
        } catch (const std::exception&) {
            throw ConfigError("key [" + section + "] " + key + " is not a number: " + v);
        }
    }

    std::map<std::string, std::string> values_;
    std::vector<std::string> order_;
    std::vector<std::string> sections_;
    mutable std::set<std::string> accessed_;
};

/// Fully validated experiment description shared by the CLI subcommands.
struct ExperimentConfig {
    std::string id = "experiment";

    TorusGrid grid;
    PressureLaw law;
    SchemeConfig scheme;

    // initial data: Riemann jump or a named analytic profile
    std::optional<RiemannData> riemann;
    std::string initial_id;  // used when no [riemann] section is present

    // mollifier / Besov parameters
    double alpha = 0.6;
    double p = 8.0;
    std::vector<double> eps_list;
    double delta = 0.05;
    double eta_max = 0.0;

    // certificate parameters
    double window_half = 0.0;
    double eps_d = 0.0;
    double tol_initial = 1e-8;
    double d_total_max = 1e3;
    double s_start = -1.0;
    int time_samples = 65;
    int besov_time_samples = 33;
    double slack = -1.0;
    std::vector<double> r5_eps;
    int k_max = 4;

    // extension parameters
    double far_radius = 0.0;
    double blend_width = 0.0;
    double target_time = 0.0;

    std::string output_dir = ".";

    static ExperimentConfig from(const ConfigMap& cfg) {
        ExperimentConfig e;
        e.id = cfg.get_or("experiment", "id", "experiment");

        int dim = cfg.get_int_or("grid", "dim", 1);
        if (dim < 1 || dim > 3) throw ConfigError("key [grid] dim must lie in {1,2,3}");
        std::array<int, 3> cells{1, 1, 1};
        std::array<double, 3> half{1.0, 1.0, 1.0};
        {
            auto cl = cfg.get_list("grid", "cells");
            if (static_cast<int>(cl.size()) != dim)
                throw ConfigError("key [grid] cells must list one entry per axis");
            for (int a = 0; a < dim; ++a) {
                cells[a] = static_cast<int>(cl[a]);
                if (cells[a] < 2) throw ConfigError("key [grid] cells entries must be >= 2");
            }
            auto hl = cfg.get_list("grid", "half_period");
            if (static_cast<int>(hl.size()) != dim)
                throw ConfigError("key [grid] half_period must list one entry per axis");
            for (int a = 0; a < dim; ++a) {
                half[a] = hl[a];
                if (half[a] <= 0.0) throw ConfigError("key [grid] half_period entries must be > 0");
            }
        }
        e.grid = TorusGrid(dim, cells, half);

        double a = cfg.get_double_or("law", "a", 1.0);
        double gamma = cfg.get_double_or("law", "gamma", 2.0);
        if (a <= 0.0) throw ConfigError("key [law] a must be > 0");
        if (gamma <= 1.0) throw ConfigError("key [law] gamma must be > 1");
        e.law = PressureLaw(a, gamma);

        std::string flux = cfg.get_or("scheme", "flux", "llf");
        if (flux == "llf" || flux == "local-lax-friedrichs")
            e.scheme.flux = FluxKind::local_lax_friedrichs;
        else if (flux == "hll")
            e.scheme.flux = FluxKind::hll;
        else
            throw ConfigError("key [scheme] flux must be llf or hll");
        e.scheme.cfl = cfg.get_double_or("scheme", "cfl", 0.45);
        if (!(e.scheme.cfl > 0.0 && e.scheme.cfl < 1.0))
            throw ConfigError("key [scheme] cfl must lie in (0,1)");
        e.scheme.end_time = cfg.get_double_or("scheme", "end_time", 0.2);
        if (e.scheme.end_time <= 0.0) throw ConfigError("key [scheme] end_time must be > 0");
        e.scheme.snapshot_stride = cfg.get_int_or("scheme", "snapshot_stride", 1);
        if (e.scheme.snapshot_stride < 1)
            throw ConfigError("key [scheme] snapshot_stride must be >= 1");

        if (cfg.has("riemann", "rho_l")) {
            double rl = cfg.get_double("riemann", "rho_l");
            double ul = cfg.get_double("riemann", "u_l");
            double rr = cfg.get_double("riemann", "rho_r");
            double ur = cfg.get_double("riemann", "u_r");
            if (rl <= 0.0 || rr <= 0.0)
                throw ConfigError("key [riemann] rho_l/rho_r must be > 0");
            e.riemann = RiemannData(rl, ul, rr, ur);
        } else {
            e.initial_id = cfg.get_or("initial", "id", "constant");
        }

        e.alpha = cfg.get_double_or("mollifier", "alpha", 0.6);
        if (!(e.alpha > 0.0 && e.alpha < 1.0))
            throw ConfigError("key [mollifier] alpha must lie in (0,1)");
        e.p = cfg.get_double_or("mollifier", "p", 8.0);
        if (e.p < 1.0) throw ConfigError("key [mollifier] p must be >= 1");
        if (cfg.has("mollifier", "eps_list")) e.eps_list = cfg.get_list("mollifier", "eps_list");
        for (double v : e.eps_list)
            if (v <= 0.0) throw ConfigError("key [mollifier] eps_list entries must be > 0");
        e.delta = cfg.get_double_or("mollifier", "delta", 0.05);
        if (e.delta < 0.0) throw ConfigError("key [mollifier] delta must be >= 0");
        e.eta_max = cfg.get_double_or("mollifier", "eta_max", 0.0);

        e.window_half = cfg.get_double_or("certify", "window_half", 0.0);
        e.eps_d = cfg.get_double_or("certify", "eps_d", 0.0);
        e.tol_initial = cfg.get_double_or("certify", "tol_initial", 1e-8);
        e.d_total_max = cfg.get_double_or("certify", "d_total_max", 1e3);
        e.s_start = cfg.get_double_or("certify", "s_start", -1.0);
        e.time_samples = cfg.get_int_or("certify", "time_samples", 65);
        if (e.time_samples < 2) throw ConfigError("key [certify] time_samples must be >= 2");
        e.besov_time_samples = cfg.get_int_or("certify", "besov_time_samples", 33);
        e.slack = cfg.get_double_or("certify", "slack", -1.0);
        if (cfg.has("certify", "r5_eps")) e.r5_eps = cfg.get_list("certify", "r5_eps");
        e.k_max = cfg.get_int_or("certify", "k_max", 4);
        if (e.k_max < 1) throw ConfigError("key [certify] k_max must be >= 1");

        e.far_radius = cfg.get_double_or("extend", "far_radius", 0.0);
        e.blend_width = cfg.get_double_or("extend", "blend_width", 0.0);
        e.target_time = cfg.get_double_or("extend", "target_time", 0.0);

        e.output_dir = cfg.get_or("output", "dir", ".");

        cfg.reject_unknown();
        return e;
    }

    static ExperimentConfig from_file(const std::string& path) {
        return from(ConfigMap::parse_file(path));
    }
};

}  // namespace erl
