#pragma once

// JSON documents: peaks.json, ladder.json, fit.json. Every document carries
// `schema_version`; frequencies are in Hz.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp> // nlohmann/json, vendored

#include "cavsplit/cavity.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/fit.hpp"
#include "cavsplit/medium.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit::io {

using nlohmann::json;

inline constexpr int schema_version = 1;

inline json to_json(const Scenario& s) {
    const auto& m = s.medium;
    const auto& c = s.cavity;
    return {
        {"medium",
         {{"lambda_m", m.lambda_a},
          {"gamma_hz", to_hz(m.gamma_a)},
          {"doppler_width_hz", to_hz(m.doppler_width)},
          {"a0_La", m.a0_La},
          {"La_m", m.La},
          {"mode", std::string(to_string(m.mode))},
          {"weak_response_valid", m.weak_response_valid()}}},
        {"cavity",
         {{"Lc_m", c.Lc},
          {"R1", c.R1},
          {"R2", c.R2},
          {"excess_loss", c.excess_loss},
          {"fsr_hz", fsr(c)},
          {"finesse", finesse(c)},
          {"linewidth_hz", linewidth(c)}}},
    };
}

inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    const auto& m = j.at("medium");
    s.medium.lambda_a = m.at("lambda_m").get<double>();
    s.medium.gamma_a = to_angular(m.at("gamma_hz").get<double>());
    s.medium.doppler_width = to_angular(m.at("doppler_width_hz").get<double>());
    s.medium.a0_La = m.at("a0_La").get<double>();
    s.medium.La = m.at("La_m").get<double>();
    s.medium.mode = parse_response_mode(m.at("mode").get<std::string>());
    const auto& c = j.at("cavity");
    s.cavity.Lc = c.at("Lc_m").get<double>();
    s.cavity.R1 = c.at("R1").get<double>();
    s.cavity.R2 = c.at("R2").get<double>();
    s.cavity.excess_loss = c.at("excess_loss").get<double>();
    return s;
}

inline json to_json(const Peak& p) {
    return {{"position_hz", p.position_hz},
            {"height", p.height},
            {"fwhm_hz", p.fwhm_hz},
            {"mode_index", p.mode_index ? json(*p.mode_index) : json(nullptr)},
            {"branch", std::string(to_string(p.branch))},
            {"ambiguous", p.ambiguous}};
}

inline Peak peak_from_json(const json& j) {
    Peak p;
    p.position_hz = j.at("position_hz").get<double>();
    p.height = j.at("height").get<double>();
    p.fwhm_hz = j.at("fwhm_hz").get<double>();
    if (!j.at("mode_index").is_null()) p.mode_index = j.at("mode_index").get<int>();
    p.branch = parse_branch(j.at("branch").get<std::string>());
    p.ambiguous = j.value("ambiguous", false);
    return p;
}

inline json peaks_to_json(const std::vector<Peak>& peaks) {
    json arr = json::array();
    for (const auto& p : peaks) arr.push_back(to_json(p));
    return arr;
}

/// Contents of peaks.json.
struct PeakReport {
    int schema_version = io::schema_version;
    Scenario params;
    std::vector<Peak> peaks;
    Splitting splitting;
    double g_sqrt_n_estimate_hz = 0.0; // far-wing closed form
    std::vector<int> split_modes;

    static PeakReport from(const Analysis& a) {
        PeakReport r;
        r.params = a.spectrum.params.value_or(Scenario{});
        r.peaks = a.peaks();
        r.splitting = a.splitting;
        r.g_sqrt_n_estimate_hz = to_hz(collective_coupling_estimate(
            r.params.medium.a0_La, r.params.medium.effective_width(), r.params.cavity.Lc));
        r.split_modes = a.crossing.split_modes();
        return r;
    }
};

inline json to_json(const PeakReport& r) {
    return {{"schema_version", r.schema_version},
            {"params", to_json(r.params)},
            {"peaks", peaks_to_json(r.peaks)},
            {"peak_count", r.peaks.size()},
            {"split_modes", r.split_modes},
            {"split_mode_count", r.split_modes.size()},
            {"g_sqrt_n_hz", r.splitting.g_sqrt_n_hz},
            {"split", r.splitting.split},
            {"superstrong", r.splitting.superstrong},
            {"g_sqrt_n_estimate_hz", r.g_sqrt_n_estimate_hz}};
}

inline PeakReport peak_report_from_json(const json& j) {
    const int version = j.at("schema_version").get<int>();
    if (version != schema_version)
        throw ParseError("unsupported peaks schema_version " + std::to_string(version));
    PeakReport r;
    r.schema_version = version;
    r.params = scenario_from_json(j.at("params"));
    for (const auto& p : j.at("peaks")) r.peaks.push_back(peak_from_json(p));
    r.split_modes = j.at("split_modes").get<std::vector<int>>();
    r.splitting.g_sqrt_n_hz = j.at("g_sqrt_n_hz").get<double>();
    r.splitting.split = j.at("split").get<bool>();
    r.splitting.superstrong = j.at("superstrong").get<bool>();
    r.g_sqrt_n_estimate_hz = j.at("g_sqrt_n_estimate_hz").get<double>();
    return r;
}

inline json to_json(const CrossingMap& map) {
    json modes = json::array();
    for (const auto& [m, b] : map.modes) {
        auto points = [](const std::vector<BranchPoint>& v) {
            json arr = json::array();
            for (const auto& p : v) arr.push_back({{"position_hz", p.position_hz}, {"height", p.height}});
            return arr;
        };
        json roots = json::array();
        for (const auto& r : b.roots)
            roots.push_back({{"position_hz", r.position_hz},
                             {"transmission", r.transmission},
                             {"amplitude", r.amplitude},
                             {"buried", r.buried}});
        modes.push_back({{"m", m},
                         {"split", b.split()},
                         {"lower", points(b.lower)},
                         {"upper", points(b.upper)},
                         {"roots", roots}});
    }
    return {{"modes", modes}, {"unassigned_peaks", map.unassigned}, {"ambiguous_peaks", map.ambiguous}};
}

inline json to_json(const FitResult& r) {
    json best = json::object();
    for (std::size_t i = 0; i < fit_param_count; ++i) best[std::string(fit_param_names[i])] = r.best_fit[i];
    return {{"best_fit", best},
            {"residual", r.residual},
            {"iterations", r.iterations},
            {"evaluations", r.evaluations},
            {"converged", r.converged},
            {"at_bound", r.at_bound}};
}

} // namespace cavsplit::io
