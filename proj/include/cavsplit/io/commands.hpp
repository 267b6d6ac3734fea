#pragma once

// simulate / ladder / fit pipelines behind the command-line tool.

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "cavsplit/error.hpp"
#include "cavsplit/fit.hpp"
#include "cavsplit/io/config.hpp"
#include "cavsplit/io/csv.hpp"
#include "cavsplit/io/report.hpp"
#include "cavsplit/io/svg.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit::io {

namespace fs = std::filesystem;

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_runtime = 2 };

inline void save_json(const json& doc, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

inline void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

inline Analysis simulate(const RunConfig& cfg) {
    return analyze(cfg.scenario, cfg.sweep.window(cfg.scenario.cavity), cfg.sweep.threshold);
}

/// spectrum.csv, peaks.json and (optionally) plot.svg in `out_dir`.
inline Analysis run_simulate(const RunConfig& cfg, const fs::path& out_dir) {
    ensure_directory(out_dir);
    Analysis a = simulate(cfg);
    save_spectrum_csv(a.spectrum, out_dir / cfg.output.spectrum_file);
    json report = to_json(PeakReport::from(a));
    report["crossing"] = to_json(a.crossing);
    save_json(report, out_dir / cfg.output.peaks_file);
    if (cfg.output.svg) {
        char title[96];
        std::snprintf(title, sizeof title, "a0La = %.4g", cfg.scenario.medium.a0_La);
        spectrum_plot(a.spectrum, a.peaks(), title).save(out_dir / cfg.output.plot_file);
    }
    return a;
}

struct LadderPoint {
    double a0_La = 0.0;
    std::optional<double> temperature_k;
    std::optional<Analysis> analysis;
    std::string error;
};

struct LadderOutput {
    std::vector<LadderPoint> points;
    int exit_code = exit_ok;
};

inline json ladder_point_json(const LadderPoint& p, std::size_t index) {
    json j = {{"index", index}, {"a0_La", p.a0_La}};
    if (p.temperature_k) j["temperature_k"] = *p.temperature_k;
    if (!p.analysis) {
        j["error"] = p.error;
        return j;
    }
    const Analysis& a = *p.analysis;
    const PeakReport r = PeakReport::from(a);
    j["doppler_width_hz"] = r.params.medium.doppler_width > 0 ? to_hz(r.params.medium.doppler_width) : 0.0;
    j["peak_count"] = r.peaks.size();
    j["split_modes"] = r.split_modes;
    j["split_mode_count"] = r.split_modes.size();
    j["g_sqrt_n_hz"] = r.splitting.g_sqrt_n_hz;
    j["split"] = r.splitting.split;
    j["superstrong"] = r.splitting.superstrong;
    j["g_sqrt_n_estimate_hz"] = r.g_sqrt_n_estimate_hz;
    j["peaks"] = peaks_to_json(r.peaks);
    j["crossing"] = to_json(a.crossing);
    return j;
}

inline SvgPlot crossing_plot(const std::vector<LadderPoint>& points) {
    SvgPlot plot("avoided-crossing map", "mode index m", "branch position (GHz)");
    std::size_t k = 0;
    for (const auto& p : points) {
        const auto& color = palette()[k++ % palette().size()];
        if (!p.analysis) continue;
        std::vector<double> x, y, size;
        for (const auto& peak : p.analysis->peaks()) {
            if (!peak.mode_index) continue;
            // offset each ladder point slightly so overlapping markers stay visible
            x.push_back(*peak.mode_index + 0.08 * (static_cast<double>(k) - 0.5 * points.size()));
            y.push_back(peak.position_hz * 1e-9);
            size.push_back(1.5 + 5.0 * std::sqrt(peak.height));
        }
        plot.points(std::move(x), std::move(y), color, std::move(size));
    }
    return plot;
}

/// ladder.json and crossing.svg. A failing point is reported in ladder.json
/// and turns the exit code to exit_runtime; the other points are still written.
inline LadderOutput run_ladder(const RunConfig& cfg, const fs::path& out_dir) {
    if (cfg.ladder.a0_La.empty() && cfg.ladder.temperatures_k.empty())
        throw ParseError("ladder needs [ladder] a0_La or temperatures");
    ensure_directory(out_dir);

    LadderOutput out;
    const SweepWindow window = cfg.sweep.window(cfg.scenario.cavity);
    const bool by_temperature = !cfg.ladder.temperatures_k.empty();
    const std::size_t count = by_temperature ? cfg.ladder.temperatures_k.size() : cfg.ladder.a0_La.size();
    for (std::size_t i = 0; i < count; ++i) {
        LadderPoint p;
        try {
            Scenario s = cfg.scenario;
            if (by_temperature) {
                p.temperature_k = cfg.ladder.temperatures_k[i];
                s = scenario_at_temperature(cfg, *p.temperature_k);
            } else {
                s.medium.a0_La = cfg.ladder.a0_La[i];
            }
            p.a0_La = s.medium.a0_La;
            p.analysis = analyze(s, window, cfg.sweep.threshold);
        } catch (const Error& e) {
            p.error = e.what();
            out.exit_code = exit_runtime;
        }
        out.points.push_back(std::move(p));
    }

    json doc = {{"schema_version", schema_version}, {"points", json::array()}};
    for (std::size_t i = 0; i < out.points.size(); ++i) doc["points"].push_back(ladder_point_json(out.points[i], i));
    save_json(doc, out_dir / cfg.output.ladder_file);
    if (cfg.output.svg) crossing_plot(out.points).save(out_dir / cfg.output.crossing_file);
    return out;
}

struct FitOutput {
    FitProblem problem;
    FitResult result;
    std::vector<std::string> notices;
    int exit_code = exit_ok;
};

/// fit.json with the result and the residual curve. Exit code is exit_ok
/// only for a converged fit; the best-so-far values are written either way.
inline FitOutput run_fit(const RunConfig& cfg, const fs::path& data_path, const fs::path& out_dir) {
    IngestResult data = ingest_spectrum(data_path);
    ensure_directory(out_dir);

    FitOutput out;
    out.notices = std::move(data.notices);
    out.problem = make_fit_problem(cfg, std::move(data.spectrum));
    out.result = fit_parameters(out.problem);
    out.exit_code = out.result.converged ? exit_ok : exit_runtime;

    const auto model = model_curve(out.result.best_fit, out.problem);
    const auto& obs = out.problem.observed;
    json curve = {{"detuning_hz", obs.grid()}, {"observed", obs.values}, {"model", model}};
    std::vector<double> diff(model.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = model[i] - obs.values[i];
    curve["residual"] = diff;

    json free = json::array();
    json bounds = json::object();
    json guess = json::object();
    for (std::size_t i = 0; i < fit_param_count; ++i) {
        const std::string name(fit_param_names[i]);
        guess[name] = out.problem.initial_guess[i];
        if (!out.problem.free[i]) continue;
        free.push_back(name);
        bounds[name] = {out.problem.bounds[i].lo, out.problem.bounds[i].hi};
    }
    json doc = {{"schema_version", schema_version},
                {"data", data_path.string()},
                {"free", free},
                {"bounds", bounds},
                {"initial_guess", guess},
                {"result", to_json(out.result)},
                {"residual_curve", curve}};
    save_json(doc, out_dir / cfg.output.fit_file);
    return out;
}

} // namespace cavsplit::io
