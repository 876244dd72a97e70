#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fnlslab/config.hpp"
#include "fnlslab/reductions.hpp"
#include "fnlslab/runner.hpp"
#include "fnlslab/version.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> sets;
    int jobs = 0; // 0: take FNLS_LAB_JOBS, else 1
    std::string output;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool config_required) {
    auto* config = cmd->add_option("--config", opt.config_path, "experiment config (JSON)");
    if (config_required) config->required();
    cmd->add_option("--set", opt.sets, "dotted-path override key=value (repeatable)");
    cmd->add_option("--jobs", opt.jobs, "worker threads (default: $FNLS_LAB_JOBS or 1)");
    cmd->add_option("--output", opt.output, "output directory (overrides config output_dir)");
    cmd->add_option("--seed", opt.seed, "override the top-level config seed")
        ->each([&opt](const std::string&) { opt.seed_given = true; });
}

int resolve_jobs(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("FNLS_LAB_JOBS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

fnls::ExperimentConfig load(const CommonOptions& opt) {
    std::vector<std::string> overrides;
    if (opt.seed_given) overrides.push_back("seed=" + std::to_string(opt.seed));
    overrides.insert(overrides.end(), opt.sets.begin(), opt.sets.end());
    return fnls::load_config(opt.config_path, overrides);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fnlslab: pseudo-spectral laboratory for the fractional NLS on the torus"};
    app.set_version_flag("--version",
                         std::string(fnls::version) + " (" + fnls::git_sha + ")");
    app.require_subcommand(1);

    CommonOptions simulate_opt, verify_opt, probe_opt, sweep_opt, report_opt;
    CLI::App* simulate = app.add_subcommand("simulate", "integrate and persist a trajectory");
    CLI::App* verify = app.add_subcommand("verify", "run the identity/lemma suite");
    CLI::App* probe = app.add_subcommand("probe", "measure an estimate constant");
    CLI::App* sweep = app.add_subcommand("sweep", "almost-conservation N-sweep");
    CLI::App* report = app.add_subcommand("report", "render a run directory");
    add_common(simulate, simulate_opt, true);
    add_common(verify, verify_opt, true);
    add_common(probe, probe_opt, true);
    add_common(sweep, sweep_opt, true);
    add_common(report, report_opt, false);

    // Sugar for the most common sweep knobs; equivalent to --set overrides.
    std::string sweep_variant;
    double sweep_alpha = 0.0, sweep_s = 0.0;
    bool sweep_alpha_given = false, sweep_s_given = false;
    sweep->add_option("--variant", sweep_variant, "line | torus (same as --set sweep.variant=...)");
    sweep->add_option("--alpha", sweep_alpha, "dispersion exponent (same as --set equation.alpha=...)")
        ->each([&](const std::string&) { sweep_alpha_given = true; });
    sweep->add_option("--s", sweep_s, "I-operator regularity (same as --set sweep.s=...)")
        ->each([&](const std::string&) { sweep_s_given = true; });

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(simulate)) {
            fnls::global_jobs.store(resolve_jobs(simulate_opt.jobs));
            const fnls::ExperimentConfig cfg = load(simulate_opt);
            const fnls::RunResult result = fnls::simulate_to_directory(cfg, simulate_opt.output);
            std::cout << result.directory << "\n";
            if (!result.completed) {
                std::cerr << "trajectory aborted; partial artifacts kept (FAILED marker)\n";
                return 1;
            }
            return 0;
        }
        if (app.got_subcommand(verify)) {
            fnls::global_jobs.store(resolve_jobs(verify_opt.jobs));
            const fnls::ExperimentConfig cfg = load(verify_opt);
            const fnls::VerifySummary summary = fnls::run_verify_suite(cfg);
            std::cout << summary.to_text();
            const std::string dir = verify_opt.output.empty() ? cfg.output_dir : verify_opt.output;
            std::filesystem::create_directories(dir);
            const std::filesystem::path path =
                std::filesystem::path(dir) / (cfg.name + ".verify.json");
            std::ofstream out(path, std::ios::binary);
            out << summary.to_json() << "\n";
            std::cout << "wrote " << path.string() << "\n";
            return summary.all_pass ? 0 : 1;
        }
        if (app.got_subcommand(probe)) {
            fnls::global_jobs.store(resolve_jobs(probe_opt.jobs));
            const fnls::ExperimentConfig cfg = load(probe_opt);
            const fnls::BoundReport rep = fnls::run_probe_to_directory(cfg, probe_opt.output);
            std::cout << rep.to_text();
            return 0;
        }
        if (app.got_subcommand(sweep)) {
            fnls::global_jobs.store(resolve_jobs(sweep_opt.jobs));
            if (!sweep_variant.empty()) sweep_opt.sets.push_back("sweep.variant=" + sweep_variant);
            if (sweep_alpha_given)
                sweep_opt.sets.push_back("equation.alpha=" + std::to_string(sweep_alpha));
            if (sweep_s_given) sweep_opt.sets.push_back("sweep.s=" + std::to_string(sweep_s));
            const fnls::ExperimentConfig cfg = load(sweep_opt);
            const fnls::ScalingReport rep = fnls::run_sweep(cfg, sweep_opt.output);
            std::cout << rep.to_text();
            return rep.monotone && rep.slope_within_margin ? 0 : 1;
        }
        if (app.got_subcommand(report)) {
            if (report_opt.output.empty())
                throw fnls::ConfigError("report: pass the run directory via --output");
            std::cout << fnls::render_report(report_opt.output);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
