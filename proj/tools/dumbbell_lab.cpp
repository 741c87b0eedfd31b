// Command-line driver for the dumbbell spectral laboratory.
//
// Subcommands run the verification pipeline piecewise or in full; outputs are
// deterministic CSV files plus a summary document. Exit codes: 0 all checks
// pass, 1 a check failed, 2 configuration or model-assumption failure.
#include "dumbbell/report.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <exception>

int main(int argc, char** argv)
{
    CLI::App app{"dumbbell spectral laboratory"};
    std::string config_path, tier = "default", out_dir, task;
    double eps_override = 0.0;
    bool serial = false;

    app.add_option("task", task,
                   "cross-section | spectra | frequency | profiles | blowup | identities | "
                   "full-report")
        ->required();
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--tier", tier, "tiny | default | fine")
        ->check(CLI::IsMember({"tiny", "default", "fine"}));
    app.add_option("--eps", eps_override, "override the eps ladder with a single value");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--serial", serial, "force deterministic serial execution (always on)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.count("--tier") && !config_path.empty()) {
            std::fprintf(stderr, "configuration error: pass either --config or --tier\n");
            return 2;
        }
        dumbbell::ExperimentConfig cfg =
            config_path.empty() ? dumbbell::ExperimentConfig::tier_preset(tier)
                                : dumbbell::ExperimentConfig::from_json_file(config_path);
        if (eps_override > 0.0) cfg.eps_ladder = {eps_override};
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.serial = true;
        cfg.validate();

        dumbbell::LabSession lab(cfg);
        const int code = dumbbell::run_task(task, lab, cfg.out_dir);
        if (code == 0) std::printf("all checks passed; outputs in %s\n", cfg.out_dir.c_str());
        else std::printf("check failure; see %s/summary.txt\n", cfg.out_dir.c_str());
        return code;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "configuration error: %s\n", e.what());
        return 2;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "assumption or solver failure: %s\n", e.what());
        return 2;
    }
}
