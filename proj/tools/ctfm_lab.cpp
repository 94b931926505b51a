// ctfm-lab: command-line runner for the CTFM / dual-demodulator simulator.
//
//   ctfm-lab phase-table --config paper_phase.cfg --out out/
//   ctfm-lab simulate    --config paper.cfg --out out/ [--mode ddctfm|ctfm|ideal]
//   ctfm-lab compare     --config paper.cfg --out out/
//
// Exit codes: 0 success, 2 configuration or usage error, 3 analysis error, 1 other.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "ctfm/ctfm.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAnalysis = 3;

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
}

int phase_table_cmd(const std::string& config_path, const std::filesystem::path& out_dir) {
    const auto cfg = ctfm::load_config(config_path);
    const auto report = ctfm::phase_table(cfg.schedule(), cfg.echoes.front().delay);
    std::filesystem::create_directories(out_dir);
    const auto table = ctfm::to_table_text(report);
    write_text(out_dir / "phase_table.csv", table);
    write_text(out_dir / "discontinuities.csv", ctfm::to_discontinuity_text(report));
    std::cout << table;
    return 0;
}

int simulate_cmd(const std::string& config_path, const std::filesystem::path& out_dir, const std::string& mode) {
    const auto cfg = ctfm::load_config(config_path);
    const auto bundle = ctfm::run(cfg, ctfm::parse_mode(mode), out_dir);
    std::cout << ctfm::report_text(bundle.spectrum_report, ctfm::parse_mode(mode));
    for (const auto& p : bundle.manifest) std::cout << "wrote " << p.string() << '\n';
    return 0;
}

int compare_cmd(const std::string& config_path, const std::filesystem::path& out_dir) {
    const auto cfg = ctfm::load_config(config_path);
    const auto rows = ctfm::compare_modes(cfg);
    std::filesystem::create_directories(out_dir);
    const auto csv = ctfm::comparison_csv(rows);
    write_text(out_dir / "compare.csv", csv);
    std::cout << csv;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CTFM / DD-CTFM sonar receiver simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string mode = "ddctfm";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment config file")->required();
        sub->add_option("--out", out_dir, "Output directory")->required();
    };
    auto* phase = app.add_subcommand("phase-table", "Phase ledger at the first sweep boundary");
    auto* sim = app.add_subcommand("simulate", "Full pipeline with CSV artifacts");
    auto* cmp = app.add_subcommand("compare", "ctfm vs ddctfm vs ideal side by side");
    add_common(phase);
    add_common(sim);
    add_common(cmp);
    sim->add_option("--mode", mode, "ddctfm, ctfm or ideal")
        ->check(CLI::IsMember({"ddctfm", "ctfm", "ideal"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (phase->parsed()) return phase_table_cmd(config_path, out_dir);
        if (sim->parsed()) return simulate_cmd(config_path, out_dir, mode);
        if (cmp->parsed()) return compare_cmd(config_path, out_dir);
    } catch (const ctfm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ctfm::UnsupportedRangeError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ctfm::Error& e) {
        std::cerr << "analysis error: " << e.what() << '\n';
        return kExitAnalysis;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
