#pragma once

// Two-column spectrum files. Written as `detuning_hz,transmission`; read back
// with the frequency unit taken from the header (…_hz or …_mhz).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cavsplit/error.hpp"
#include "cavsplit/io/config.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit::io {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("format_double: conversion failed");
    return std::string(buf, ptr);
}

inline void write_spectrum_csv(const Spectrum& spectrum, std::ostream& out) {
    out << "detuning_hz,transmission\n";
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        out << format_double(spectrum.frequency(i)) << ',' << format_double(spectrum.values[i]) << '\n';
}

inline void save_spectrum_csv(const Spectrum& spectrum, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    write_spectrum_csv(spectrum, out);
}

struct IngestOptions {
    double reference = 1.0;        // maximum after rescaling arbitrary-unit data
    std::size_t min_samples = 10;
};

struct IngestResult {
    Spectrum spectrum;
    std::vector<std::string> notices;
};

/// Parses a two-column CSV. A second column named `transmission` is taken as
/// already normalized; any other name is rescaled so that its maximum equals
/// `options.reference`. Non-uniform grids are resampled linearly.
inline IngestResult parse_spectrum_csv(std::istream& in, const std::string& source,
                                       const IngestOptions& options = {}) {
    IngestResult result;
    std::string line;
    std::size_t line_no = 0;

    double freq_scale = 0.0;
    bool normalized = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto cols = detail::split_list(t);
        if (cols.size() != 2) throw ParseError("header must have exactly two columns", source, line_no);
        std::string freq = cols[0];
        std::transform(freq.begin(), freq.end(), freq.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (freq.ends_with("_mhz")) freq_scale = 1e6;
        else if (freq.ends_with("_ghz")) freq_scale = 1e9;
        else if (freq.ends_with("_hz")) freq_scale = 1.0;
        else throw ParseError("frequency column '" + cols[0] + "' must declare its unit (_hz, _mhz or _ghz)", source, line_no);
        normalized = cols[1] == "transmission";
        break;
    }
    if (freq_scale == 0.0) throw ParseError("missing header line", source);

    std::vector<std::pair<double, double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        const auto t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
            throw ParseError("expected two comma-separated values", source, line_no);
        double f = 0.0;
        double v = 0.0;
        try {
            f = detail::parse_number(t.substr(0, comma), "frequency");
            v = detail::parse_number(t.substr(comma + 1), "value");
        } catch (const ParseError& e) {
            throw ParseError(e.what(), source, line_no);
        }
        rows.emplace_back(f * freq_scale, v);
    }
    if (rows.size() < options.min_samples)
        throw ParseError("spectrum has " + std::to_string(rows.size()) + " samples; at least " +
                             std::to_string(options.min_samples) + " are required",
                         source);

    if (rows.front().first > rows.back().first) std::reverse(rows.begin(), rows.end());
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (!(rows[i].first > rows[i - 1].first))
            throw ParseError("frequencies must be strictly monotonic", source);

    const std::size_t n = rows.size();
    const double start = rows.front().first;
    const double step = (rows.back().first - start) / static_cast<double>(n - 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        worst = std::max(worst, std::abs(rows[i].first - (start + static_cast<double>(i) * step)));

    Spectrum& s = result.spectrum;
    s.start_hz = start;
    s.step_hz = step;
    s.values.resize(n);
    if (worst <= 1e-6 * step) {
        for (std::size_t i = 0; i < n; ++i) s.values[i] = rows[i].second;
    } else {
        result.notices.push_back(source + ": non-uniform frequency grid resampled to " + std::to_string(n) +
                                 " uniform points");
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = s.frequency(i);
            while (j + 2 < n && rows[j + 1].first < x) ++j;
            const auto& [x0, y0] = rows[j];
            const auto& [x1, y1] = rows[j + 1];
            const double w = std::clamp((x - x0) / (x1 - x0), 0.0, 1.0);
            s.values[i] = y0 + w * (y1 - y0);
        }
    }

    if (!normalized) {
        const double peak = *std::max_element(s.values.begin(), s.values.end());
        if (!(peak > 0.0)) throw ParseError("intensity column has no positive values", source);
        for (auto& v : s.values) v *= options.reference / peak;
    }
    return result;
}

inline IngestResult ingest_spectrum(const std::filesystem::path& path, const IngestOptions& options = {}) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open spectrum file", path.string());
    return parse_spectrum_csv(in, path.string(), options);
}

} // namespace cavsplit::io
