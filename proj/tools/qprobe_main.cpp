#include <CLI11.hpp>

#include <iostream>

#include "qprobe/errors.hpp"
#include "qprobe/experiment.hpp"
#include "qprobe/figures.hpp"
#include "qprobe/selftest.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

void print_report(const qprobe::RunReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& f : report.files) std::cout << "wrote " << f.string() << '\n';
}

void print_checks(const std::vector<qprobe::CheckResult>& checks) {
    for (const auto& c : checks)
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.description << " (" << c.detail << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qubit probe in a non-Markovian bath: dynamics and quantum Fisher information"};
    app.require_subcommand(1);

    qprobe::RunOptions options;
    std::vector<std::string> overrides;
    std::string out_dir = options.out_dir.string();
    app.add_option("--out", out_dir, "Output directory")->capture_default_str();
    app.add_option("--workers", options.workers, "Worker threads for sweep cells and stencil runs")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    app.add_flag("--emit-plotscript", options.emit_plotscript, "Write a matplotlib script next to the CSVs");
    app.add_option("--override", overrides, "key=value applied on top of the configuration")->allow_extra_args(false);

    std::string config_path, figure_id;
    auto* run = app.add_subcommand("run", "Run a configuration file");
    run->add_option("config", config_path, "JSON configuration")->required();
    auto* sweep = app.add_subcommand("sweep", "Run a configuration's sweep axes");
    sweep->add_option("config", config_path, "JSON configuration")->required();
    auto* reproduce = app.add_subcommand("reproduce", "Reproduce a figure from its built-in parameters");
    reproduce->add_option("figure", figure_id, "Figure id")->required();
    auto* selftest = app.add_subcommand("selftest", "Check every engine against the independent oracles");
    for (auto* sub : {run, sweep, reproduce, selftest}) sub->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigError;
    }
    options.out_dir = out_dir;

    try {
        if (*run || *sweep) {
            const auto config = qprobe::load_config(config_path, overrides);
            options.command = *run ? "run" : "sweep";
            print_report(*run ? qprobe::run_experiment(config, options) : qprobe::run_sweep(config, options));
            return 0;
        }
        if (*reproduce) {
            const auto report = qprobe::reproduce_figure(figure_id, options, overrides);
            print_report(report.run);
            print_checks(report.checks);
            return 0;
        }
        const auto checks = qprobe::run_selftest(options.workers);
        print_checks(checks);
        for (const auto& c : checks)
            if (!c.passed) return kNumericError;
        return 0;
    } catch (const qprobe::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericError;
    }
}
