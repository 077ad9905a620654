// erl - relative-energy laboratory for the isentropic Euler system.
//
// Subcommands: solve, riemann, besov-rate, commutator-rate, relenergy,
// certify, mvs-certify, extend, report. Exit status: 0 on success/PASS,
// 1 on a FAIL verdict, 2 on usage or configuration errors.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erl/experiments.hpp"

namespace fs = std::filesystem;

namespace {

int emit_and_exit(const erl::json& report, const std::string& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    std::string base = (fs::path(out_dir) / name).string();
    erl::write_json(base + ".json", report);
    erl::write_series_csv(base + ".csv", report.at("series"));
    std::cout << name << ": " << report.at("verdict").get<std::string>() << " -> " << base
              << ".json\n";
    return report.at("verdict") == "PASS" ? 0 : 1;
}

int cmd_solve(const erl::ExperimentConfig& cfg) {
    erl::Trajectory traj = erl::run_solve(cfg);
    fs::create_directories(cfg.output_dir);
    int written = 0;
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "snapshot_%05zu.erl", i);
        erl::write_snapshot((fs::path(cfg.output_dir) / name).string(), cfg.grid, cfg.law,
                            traj.states[i]);
        ++written;
    }
    erl::EnergySeries es = erl::energy_monitor(traj);
    std::cout << cfg.id << ": " << written << " snapshots, E(0) = " << es.energy.front()
              << ", E(T) = " << es.energy.back()
              << (es.admissible ? " (admissible)" : " (NOT admissible)") << "\n";
    return es.admissible ? 0 : 1;
}

int cmd_riemann(const erl::ExperimentConfig& cfg) {
    if (!cfg.riemann) throw erl::ConfigError("missing required key [riemann] rho_l");
    erl::WaveStructure ws = erl::solve_riemann(cfg.law, *cfg.riemann);
    std::vector<double> stamps;
    int n = cfg.time_samples;
    for (int i = 0; i < n; ++i) stamps.push_back(cfg.scheme.end_time * i / (n - 1));
    erl::ReferencePair ref = erl::reference_from_riemann(cfg.grid, cfg.law, ws, stamps, cfg.alpha,
                                                         cfg.p, cfg.delta);
    fs::create_directories(cfg.output_dir);
    erl::Trajectory traj = ref.as_trajectory();
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        char name[64];
        std::snprintf(name, sizeof(name), "exact_%05zu.erl", i);
        erl::write_snapshot((fs::path(cfg.output_dir) / name).string(), cfg.grid, cfg.law,
                            traj.states[i]);
    }
    std::cout << cfg.id << ": middle state rho* = " << ws.rho_star << ", u* = " << ws.u_star
              << ", waves = ["
              << (ws.w1.kind == erl::WaveKind::rarefaction
                      ? "rarefaction"
                      : (ws.w1.kind == erl::WaveKind::shock ? "shock" : "none"))
              << ", "
              << (ws.w2.kind == erl::WaveKind::rarefaction
                      ? "rarefaction"
                      : (ws.w2.kind == erl::WaveKind::shock ? "shock" : "none"))
              << "]\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out) {
    std::vector<erl::json> reports;
    for (const auto& path : inputs) {
        std::ifstream f(path);
        if (!f) throw std::runtime_error("cannot open " + path);
        erl::json j = erl::json::parse(f);
        std::string why;
        if (!erl::validate_report_schema(j, &why))
            throw std::runtime_error(path + ": invalid report (" + why + ")");
        reports.push_back(std::move(j));
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open " + out + " for writing");
    f << erl::merge_reports_csv(reports);
    std::cout << "merged " << reports.size() << " reports -> " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative-energy laboratory for the isentropic Euler system"};
    app.require_subcommand(1);

    std::string config_path, out_override;
    std::vector<std::string> report_inputs;
    std::string report_out = "summary.csv";

    auto add_config_cmd = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_override, "override [output] dir");
        return sub;
    };

    CLI::App* c_solve = add_config_cmd("solve", "run the finite-volume solver, write snapshots");
    CLI::App* c_riemann = add_config_cmd("riemann", "exact Riemann solution sampled to the grid");
    CLI::App* c_besov = add_config_cmd("besov-rate", "mollification rate study");
    CLI::App* c_comm = add_config_cmd("commutator-rate", "commutator rate study");
    CLI::App* c_rele = add_config_cmd("relenergy", "relative-energy series and block table");
    CLI::App* c_cert = add_config_cmd("certify", "weak-vs-reference uniqueness certificate");
    CLI::App* c_mvs = add_config_cmd("mvs-certify", "measure-valued uniqueness certificate");
    CLI::App* c_ext = add_config_cmd("extend", "torus embedding of far-field data");

    CLI::App* c_rep = app.add_subcommand("report", "merge report JSONs into one CSV summary");
    c_rep->add_option("inputs", report_inputs, "report JSON files")->required();
    c_rep->add_option("--out", report_out, "summary CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (c_rep->parsed()) return cmd_report(report_inputs, report_out);

        erl::ExperimentConfig cfg = erl::ExperimentConfig::from_file(config_path);
        if (!out_override.empty()) cfg.output_dir = out_override;

        if (c_solve->parsed()) return cmd_solve(cfg);
        if (c_riemann->parsed()) return cmd_riemann(cfg);
        if (c_besov->parsed())
            return emit_and_exit(erl::run_besov_rate(cfg), cfg.output_dir, cfg.id + "_besov_rate");
        if (c_comm->parsed())
            return emit_and_exit(erl::run_commutator_rate(cfg), cfg.output_dir,
                                 cfg.id + "_commutator_rate");
        if (c_rele->parsed())
            return emit_and_exit(erl::run_relenergy(cfg), cfg.output_dir, cfg.id + "_relenergy");
        if (c_cert->parsed())
            return emit_and_exit(erl::run_certify(cfg), cfg.output_dir, cfg.id + "_certify");
        if (c_mvs->parsed())
            return emit_and_exit(erl::run_mvs_certify(cfg), cfg.output_dir, cfg.id + "_mvs");
        if (c_ext->parsed())
            return emit_and_exit(erl::run_extend(cfg), cfg.output_dir, cfg.id + "_extend");
    } catch (const erl::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
