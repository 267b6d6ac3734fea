// cavsplit: simulate, ladder, fit and peaks commands.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "cavsplit/cavsplit.hpp"
#include "cavsplit/io/commands.hpp"

namespace {

using namespace cavsplit;
using namespace cavsplit::io;

void print_notices(const std::vector<std::string>& notices) {
    for (const auto& n : notices) std::cerr << "notice: " << n << '\n';
}

RunConfig read_config(const std::string& path) {
    RunConfig cfg = load_config(path);
    print_notices(cfg.notices);
    return cfg;
}

int cmd_simulate(const std::string& config, const std::string& out) {
    const RunConfig cfg = read_config(config);
    const Analysis a = run_simulate(cfg, out);
    print_notices(a.notices);
    std::cout << "peaks: " << a.peaks().size() << ", split modes: " << a.crossing.split_mode_count()
              << ", g*sqrt(N): " << a.splitting.g_sqrt_n_hz / 1e6 << " MHz"
              << (a.splitting.superstrong ? " (superstrong)" : "") << '\n';
    return exit_ok;
}

int cmd_ladder(const std::string& config, const std::string& out) {
    const RunConfig cfg = read_config(config);
    const LadderOutput result = run_ladder(cfg, out);
    for (const auto& p : result.points) {
        if (!p.analysis) {
            std::cerr << "error: a0_La = " << p.a0_La << ": " << p.error << '\n';
            continue;
        }
        std::cout << "a0_La " << p.a0_La << ": peaks " << p.analysis->peaks().size() << ", split modes "
                  << p.analysis->crossing.split_mode_count() << '\n';
    }
    return result.exit_code;
}

int cmd_fit(const std::string& config, const std::string& data, const std::string& out) {
    const RunConfig cfg = read_config(config);
    const FitOutput result = run_fit(cfg, data, out);
    print_notices(result.notices);
    for (std::size_t i = 0; i < fit_param_count; ++i) {
        if (!result.problem.free[i]) continue;
        std::cout << fit_param_names[i] << " = " << result.result.best_fit[i] << '\n';
    }
    std::cout << "residual " << result.result.residual << ", iterations " << result.result.iterations
              << (result.result.converged ? ", converged" : ", NOT converged") << '\n';
    if (!result.result.converged) std::cerr << "error: fit did not converge; best-so-far written\n";
    return result.exit_code;
}

int cmd_peaks(const std::string& in, double threshold) {
    const IngestResult data = ingest_spectrum(in);
    print_notices(data.notices);
    std::cout << peaks_to_json(find_peaks(data.spectrum, threshold)).dump(2) << '\n';
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmission spectra of a cavity filled with Doppler-broadened two-level atoms"};
    app.set_version_flag("--version", std::string("cavsplit ") + CAVSPLIT_VERSION);
    app.require_subcommand(1);

    std::string config, out, data, in;
    double threshold = 1e-3;

    auto* simulate = app.add_subcommand("simulate", "sweep one configuration; writes spectrum.csv, peaks.json, plot.svg");
    simulate->add_option("--config", config, "configuration file")->required();
    simulate->add_option("--out", out, "output directory")->required();

    auto* ladder = app.add_subcommand("ladder", "run a list of a0_La values or temperatures; writes ladder.json, crossing.svg");
    ladder->add_option("--config", config, "configuration file")->required();
    ladder->add_option("--out", out, "output directory")->required();

    auto* fit = app.add_subcommand("fit", "fit model parameters to a measured spectrum; writes fit.json");
    fit->add_option("--config", config, "configuration file")->required();
    fit->add_option("--data", data, "two-column spectrum CSV")->required();
    fit->add_option("--out", out, "output directory")->required();

    auto* peaks = app.add_subcommand("peaks", "detect peaks in a spectrum CSV and print them as JSON");
    peaks->add_option("--in", in, "two-column spectrum CSV")->required();
    peaks->add_option("--threshold", threshold, "detection threshold, normalized")->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config, out);
        if (ladder->parsed()) return cmd_ladder(config, out);
        if (fit->parsed()) return cmd_fit(config, data, out);
        if (peaks->parsed()) return cmd_peaks(in, threshold);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const InvalidParameter& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_usage;
}
