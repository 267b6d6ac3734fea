#pragma once

// Run configuration: INI sections [medium] [cavity] [sweep] [ladder] [fit]
// [output]. Frequencies are given in Hz, temperatures with an explicit unit.
// Unknown sections or keys are rejected.

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "cavsplit/cavity.hpp"
#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/fit.hpp"
#include "cavsplit/medium.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit::io {

struct DensitySettings {
    VaporModel vapor;
    OpticalDepthModel optical_depth;
    double mass_u = phys::rb87_mass_u;
};

struct SweepSettings {
    double half_width_fsr = 3.3;
    std::optional<double> start_hz;
    std::optional<double> stop_hz;
    double step_hz = 1e6;
    double threshold = 1e-3;

    SweepWindow window(const CavityParams& cavity) const {
        if (start_hz && stop_hz) return {*start_hz, *stop_hz, step_hz};
        return symmetric_window(cavity, half_width_fsr, step_hz);
    }
};

struct LadderSettings {
    std::vector<double> a0_La;
    std::vector<double> temperatures_k;
};

struct FitSettings {
    std::array<bool, fit_param_count> free{true, false, false, false};
    std::array<Bounds, fit_param_count> bounds{Bounds{1.0, 500.0}, Bounds{50e6, 1000e6}, Bounds{0.0, 0.5},
                                               Bounds{-100e6, 100e6}};
    std::array<std::optional<double>, fit_param_count> guess{};
    bool multistart = false;
    SimplexOptions simplex{};
};

struct OutputSettings {
    std::string spectrum_file = "spectrum.csv";
    std::string peaks_file = "peaks.json";
    std::string plot_file = "plot.svg";
    std::string ladder_file = "ladder.json";
    std::string crossing_file = "crossing.svg";
    std::string fit_file = "fit.json";
    bool svg = true;
};

struct RunConfig {
    Scenario scenario;
    DensitySettings density;
    std::optional<double> temperature_k; // cell temperature, when given
    SweepSettings sweep;
    LadderSettings ladder;
    FitSettings fit;
    OutputSettings output;
    std::vector<std::string> notices;
};

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

inline double parse_number(std::string_view text, const std::string& key) {
    const std::string t = trim(text);
    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ParseError("key '" + key + "': expected a number, got '" + t + "'");
    return value;
}

inline bool parse_bool(std::string_view text, const std::string& key) {
    const std::string t = trim(text);
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    throw ParseError("key '" + key + "': expected true/false, got '" + t + "'");
}

inline std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        auto t = trim(item);
        if (!t.empty()) out.push_back(std::move(t));
    }
    return out;
}

inline double to_kelvin(double value, std::string_view unit, const std::string& key) {
    if (unit == "K" || unit == "k") return value;
    if (unit == "C" || unit == "c" || unit == "degC") return value + phys::zero_celsius;
    throw ParseError("key '" + key + "': temperature unit must be C or K, got '" + std::string(unit) + "'");
}

// Section view that tracks which keys were consumed.
class Section {
public:
    Section(std::string name, const boost::property_tree::ptree* tree) : name_(std::move(name)), tree_(tree) {}

    std::optional<std::string> raw(const std::string& key) {
        allowed_.insert(key);
        if (!tree_) return std::nullopt;
        auto child = tree_->get_child_optional(boost::property_tree::ptree::path_type(key, '\0'));
        if (!child) return std::nullopt;
        return child->get_value<std::string>();
    }

    std::optional<double> number(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        return parse_number(*r, qualified(key));
    }

    std::optional<bool> boolean(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        return parse_bool(*r, qualified(key));
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        auto r = raw(key);
        if (!r) return std::nullopt;
        std::vector<double> out;
        for (const auto& item : split_list(*r)) out.push_back(parse_number(item, qualified(key)));
        if (out.empty()) throw ParseError("key '" + qualified(key) + "': empty list");
        return out;
    }

    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& [key, child] : *tree_) {
            if (!allowed_.count(key)) throw ParseError("unknown key '" + qualified(key) + "'");
        }
    }

private:
    std::string name_;
    const boost::property_tree::ptree* tree_;
    std::set<std::string> allowed_;
};

template <typename T>
T checked(const std::string& key, T value, bool ok, const std::string& rule) {
    if (!ok) throw ParseError("key '" + key + "': " + rule);
    return value;
}

} // namespace detail

inline RunConfig parse_config(std::string_view text, const std::string& source = "<config>") {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ParseError(e.message(), source, e.line());
    }

    static const std::set<std::string> sections{"medium", "cavity", "sweep", "ladder", "fit", "output"};
    for (const auto& [name, child] : tree) {
        if (!sections.count(name)) {
            if (child.empty()) throw ParseError("unknown key '" + name + "' outside any section", source);
            throw ParseError("unknown section '[" + name + "]'", source);
        }
    }
    auto section = [&](const std::string& name) {
        auto child = tree.get_child_optional(name);
        return detail::Section(name, child ? &*child : nullptr);
    };

    RunConfig cfg;
    try {
        // [medium]
        auto med = section("medium");
        auto& m = cfg.scenario.medium;
        if (auto v = med.number("lambda_m")) m.lambda_a = detail::checked(med.qualified("lambda_m"), *v, *v > 0, "must be > 0");
        if (auto v = med.number("gamma_hz")) m.gamma_a = to_angular(detail::checked(med.qualified("gamma_hz"), *v, *v > 0, "must be > 0"));
        else cfg.notices.push_back("medium.gamma_hz not set; using 6 MHz");
        if (auto v = med.raw("mode")) {
            try {
                m.mode = parse_response_mode(detail::trim(*v));
            } catch (const InvalidParameter& e) {
                throw ParseError("key 'medium.mode': " + std::string(e.what()));
            }
        } else {
            cfg.notices.push_back("medium.mode not set; using approx_doppler");
        }
        if (auto v = med.number("La_m")) m.La = detail::checked(med.qualified("La_m"), *v, *v > 0, "must be > 0");
        else cfg.notices.push_back("medium.La_m not set; using 0.05 m");
        if (auto v = med.number("mass_u")) cfg.density.mass_u = detail::checked(med.qualified("mass_u"), *v, *v > 0, "must be > 0");
        if (auto v = med.number("abundance"))
            cfg.density.vapor.abundance = detail::checked(med.qualified("abundance"), *v, *v > 0 && *v <= 1, "must lie in (0, 1]");
        if (auto v = med.number("population_factor"))
            cfg.density.vapor.population_factor = detail::checked(med.qualified("population_factor"), *v, *v > 0, "must be > 0");
        if (auto v = med.number("sigma_eff_m2"))
            cfg.density.optical_depth.sigma_eff = detail::checked(med.qualified("sigma_eff_m2"), *v, *v > 0, "must be > 0");
        if (auto v = med.raw("a0_convention")) {
            const auto t = detail::trim(*v);
            if (t == "calibrated") cfg.density.optical_depth.convention = OpticalDepthConvention::calibrated;
            else if (t == "analytic") cfg.density.optical_depth.convention = OpticalDepthConvention::analytic;
            else throw ParseError("key 'medium.a0_convention': expected calibrated or analytic, got '" + t + "'");
        }

        const auto temperature = med.number("temperature");
        const auto temperature_unit = med.raw("temperature_unit");
        if (temperature) {
            if (!temperature_unit) throw ParseError("key 'medium.temperature_unit' is required with medium.temperature");
            cfg.temperature_k = detail::to_kelvin(*temperature, detail::trim(*temperature_unit), med.qualified("temperature_unit"));
            if (!(*cfg.temperature_k >= 0.0)) throw ParseError("key 'medium.temperature': below absolute zero");
        } else if (temperature_unit) {
            throw ParseError("key 'medium.temperature_unit' given without medium.temperature");
        }

        if (auto v = med.number("doppler_width_hz")) {
            m.doppler_width = to_angular(detail::checked(med.qualified("doppler_width_hz"), *v, *v >= 0, "must be >= 0"));
        } else if (cfg.temperature_k) {
            m.doppler_width = doppler_width(*cfg.temperature_k, cfg.density.mass_u * phys::atomic_mass_unit, m.lambda_a);
            cfg.notices.push_back("medium.doppler_width_hz derived from temperature: " +
                                  std::to_string(to_hz(m.doppler_width) / 1e6) + " MHz");
        } else {
            cfg.notices.push_back("medium.doppler_width_hz not set; using 343 MHz");
        }

        const auto a0 = med.number("a0_La");
        const auto column = med.number("column_density_m2");
        if (a0 && column) throw ParseError("keys 'medium.a0_La' and 'medium.column_density_m2' are mutually exclusive");
        if (a0) {
            m.a0_La = detail::checked(med.qualified("a0_La"), *a0, *a0 >= 0, "must be >= 0");
        } else if (column) {
            detail::checked(med.qualified("column_density_m2"), *column, *column >= 0, "must be >= 0");
            m.a0_La = a0La_from_column_density(*column, m, cfg.density.optical_depth);
        } else if (cfg.temperature_k) {
            try {
                m.a0_La = a0La_from_column_density(
                    column_density_from_temperature(*cfg.temperature_k, m.La, cfg.density.vapor), m,
                    cfg.density.optical_depth);
            } catch (const OutOfRange& e) {
                throw ParseError("key 'medium.temperature': " + std::string(e.what()));
            }
            cfg.notices.push_back("medium.a0_La derived from temperature: " + std::to_string(m.a0_La));
        } else {
            cfg.notices.push_back("medium.a0_La not set; using 0 (empty cavity)");
        }
        med.reject_unknown();

        // [cavity]
        auto cav = section("cavity");
        auto& c = cfg.scenario.cavity;
        if (auto v = cav.number("Lc_m")) c.Lc = detail::checked(cav.qualified("Lc_m"), *v, *v > 0, "must be > 0");
        else cfg.notices.push_back("cavity.Lc_m not set; using 0.177 m");
        if (auto v = cav.number("R1")) c.R1 = detail::checked(cav.qualified("R1"), *v, *v > 0 && *v < 1, "must lie in (0, 1)");
        if (auto v = cav.number("R2")) c.R2 = detail::checked(cav.qualified("R2"), *v, *v > 0 && *v < 1, "must lie in (0, 1)");
        const auto loss = cav.number("excess_loss");
        const auto target = cav.number("finesse");
        if (loss && target) throw ParseError("keys 'cavity.excess_loss' and 'cavity.finesse' are mutually exclusive");
        if (loss) {
            c.excess_loss = detail::checked(cav.qualified("excess_loss"), *loss, *loss >= 0 && *loss < 1, "must lie in [0, 1)");
        } else {
            const double f = target.value_or(20.0);
            if (!target) cfg.notices.push_back("cavity.finesse not set; calibrating excess loss for F = 20");
            try {
                c.excess_loss = calibrate_excess_loss(f, c.R1, c.R2);
            } catch (const Error& e) {
                throw ParseError("key 'cavity.finesse': " + std::string(e.what()));
            }
        }
        cav.reject_unknown();

        // [sweep]
        auto sw = section("sweep");
        if (auto v = sw.number("half_width_fsr"))
            cfg.sweep.half_width_fsr = detail::checked(sw.qualified("half_width_fsr"), *v, *v > 0, "must be > 0");
        cfg.sweep.start_hz = sw.number("start_hz");
        cfg.sweep.stop_hz = sw.number("stop_hz");
        if (cfg.sweep.start_hz.has_value() != cfg.sweep.stop_hz.has_value())
            throw ParseError("keys 'sweep.start_hz' and 'sweep.stop_hz' must be given together");
        if (cfg.sweep.start_hz && !(*cfg.sweep.stop_hz > *cfg.sweep.start_hz))
            throw ParseError("key 'sweep.stop_hz': must exceed sweep.start_hz");
        if (auto v = sw.number("step_hz")) cfg.sweep.step_hz = detail::checked(sw.qualified("step_hz"), *v, *v > 0, "must be > 0");
        if (auto v = sw.number("threshold"))
            cfg.sweep.threshold = detail::checked(sw.qualified("threshold"), *v, *v > 0 && *v < 1, "must lie in (0, 1)");
        sw.reject_unknown();

        // [ladder]
        auto lad = section("ladder");
        if (auto v = lad.numbers("a0_La")) {
            for (double x : *v) detail::checked(lad.qualified("a0_La"), x, x >= 0, "entries must be >= 0");
            cfg.ladder.a0_La = *v;
        }
        const auto temps = lad.numbers("temperatures");
        const auto temp_unit = lad.raw("temperature_unit");
        if (temps) {
            if (!temp_unit) throw ParseError("key 'ladder.temperature_unit' is required with ladder.temperatures");
            for (double t : *temps)
                cfg.ladder.temperatures_k.push_back(detail::to_kelvin(t, detail::trim(*temp_unit), lad.qualified("temperature_unit")));
        } else if (temp_unit) {
            throw ParseError("key 'ladder.temperature_unit' given without ladder.temperatures");
        }
        if (!cfg.ladder.a0_La.empty() && !cfg.ladder.temperatures_k.empty())
            throw ParseError("keys 'ladder.a0_La' and 'ladder.temperatures' are mutually exclusive");
        lad.reject_unknown();

        // [fit]
        auto fs = section("fit");
        if (auto v = fs.raw("free")) {
            cfg.fit.free = {};
            for (const auto& name : detail::split_list(*v)) {
                try {
                    cfg.fit.free[static_cast<std::size_t>(parse_fit_param(name))] = true;
                } catch (const InvalidParameter&) {
                    throw ParseError("key 'fit.free': unknown parameter '" + name + "'");
                }
            }
        }
        for (std::size_t i = 0; i < fit_param_count; ++i) {
            const std::string base(fit_param_names[i]);
            if (auto v = fs.number(base + "_guess")) cfg.fit.guess[i] = *v;
            if (auto v = fs.number(base + "_min")) cfg.fit.bounds[i].lo = *v;
            if (auto v = fs.number(base + "_max")) cfg.fit.bounds[i].hi = *v;
            if (!(cfg.fit.bounds[i].lo < cfg.fit.bounds[i].hi))
                throw ParseError("key 'fit." + base + "_min': must be below fit." + base + "_max");
        }
        if (auto v = fs.boolean("multistart")) cfg.fit.multistart = *v;
        if (auto v = fs.number("max_iterations"))
            cfg.fit.simplex.max_iterations =
                static_cast<int>(detail::checked(fs.qualified("max_iterations"), *v, *v >= 1, "must be >= 1"));
        if (auto v = fs.number("tolerance"))
            cfg.fit.simplex.tolerance = detail::checked(fs.qualified("tolerance"), *v, *v > 0, "must be > 0");
        fs.reject_unknown();

        // [output]
        auto out = section("output");
        auto file_key = [&](const std::string& key, std::string& target_name) {
            if (auto v = out.raw(key)) {
                target_name = detail::trim(*v);
                if (target_name.empty()) throw ParseError("key '" + out.qualified(key) + "': empty file name");
            }
        };
        file_key("spectrum_file", cfg.output.spectrum_file);
        file_key("peaks_file", cfg.output.peaks_file);
        file_key("plot_file", cfg.output.plot_file);
        file_key("ladder_file", cfg.output.ladder_file);
        file_key("crossing_file", cfg.output.crossing_file);
        file_key("fit_file", cfg.output.fit_file);
        if (auto v = out.boolean("svg")) cfg.output.svg = *v;
        out.reject_unknown();

        if (!(m.La <= c.Lc)) throw ParseError("key 'medium.La_m': must not exceed cavity.Lc_m");
        cfg.scenario.validate();
    } catch (const ParseError& e) {
        if (!e.source().empty()) throw;
        throw ParseError(e.what(), source);
    } catch (const InvalidParameter& e) {
        throw ParseError(e.what(), source);
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file", path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str(), path.string());
}

/// Scenario at a cell temperature: Doppler width and a0*La from the density model.
inline Scenario scenario_at_temperature(const RunConfig& cfg, double temperature_k) {
    Scenario s = cfg.scenario;
    s.medium.doppler_width =
        doppler_width(temperature_k, cfg.density.mass_u * phys::atomic_mass_unit, s.medium.lambda_a);
    s.medium.a0_La = a0La_from_column_density(
        column_density_from_temperature(temperature_k, s.medium.La, cfg.density.vapor), s.medium,
        cfg.density.optical_depth);
    return s;
}

/// Fit problem for `observed` from the [fit] section; unset guesses come from the scenario.
inline FitProblem make_fit_problem(const RunConfig& cfg, Spectrum observed) {
    FitProblem p;
    p.observed = std::move(observed);
    p.base = cfg.scenario;
    p.free = cfg.fit.free;
    p.bounds = cfg.fit.bounds;
    p.multistart = cfg.fit.multistart;
    p.simplex = cfg.fit.simplex;
    const FitVector from_scenario = FitProblem::parameters_of(cfg.scenario);
    for (std::size_t i = 0; i < fit_param_count; ++i)
        p.initial_guess[i] = cfg.fit.guess[i].value_or(from_scenario[i]);
    return p;
}

} // namespace cavsplit::io
