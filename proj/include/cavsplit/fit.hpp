#pragma once

// Least-squares recovery of a0*La, Doppler width, excess loss and a frequency
// offset from an observed spectrum, using the forward model and a bounded
// simplex search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cavsplit/cavity.hpp"
#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/nelder_mead.hpp"
#include "cavsplit/spectrum.hpp"

namespace cavsplit {

enum class FitParam : std::size_t { a0_La = 0, doppler_width = 1, excess_loss = 2, freq_offset = 3 };

inline constexpr std::size_t fit_param_count = 4;

inline constexpr std::array<std::string_view, fit_param_count> fit_param_names = {
    "a0_La", "doppler_width_hz", "excess_loss", "freq_offset_hz"};

inline FitParam parse_fit_param(std::string_view name) {
    for (std::size_t i = 0; i < fit_param_count; ++i)
        if (fit_param_names[i] == name) return static_cast<FitParam>(i);
    if (name == "doppler_width") return FitParam::doppler_width;
    if (name == "freq_offset") return FitParam::freq_offset;
    throw InvalidParameter("unknown fit parameter '" + std::string(name) + "'");
}

/// a0_La, Doppler width (Hz), excess loss, frequency offset (Hz).
using FitVector = std::array<double, fit_param_count>;

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct FitProblem {
    Spectrum observed;
    Scenario base;
    std::array<bool, fit_param_count> free{};
    std::array<Bounds, fit_param_count> bounds{};
    FitVector initial_guess{};
    double model_scale = 1.0;     // model normalization multiplier
    bool multistart = false;      // 5 starting a0_La values across its bounds
    SimplexOptions simplex{};

    static FitVector parameters_of(const Scenario& s) {
        return {s.medium.a0_La, to_hz(s.medium.doppler_width), s.cavity.excess_loss, 0.0};
    }

    std::size_t free_count() const {
        return static_cast<std::size_t>(std::count(free.begin(), free.end(), true));
    }

    void validate() const {
        if (observed.size() < 2) throw InvalidParameter("fit: observed spectrum is empty");
        if (free_count() == 0) throw InvalidParameter("fit: no free parameters");
        for (std::size_t i = 0; i < fit_param_count; ++i) {
            if (!free[i]) continue;
            const auto& b = bounds[i];
            const std::string name(fit_param_names[i]);
            if (!(std::isfinite(b.lo) && std::isfinite(b.hi) && b.lo < b.hi))
                throw InvalidParameter("fit: bounds of " + name + " must be finite with lo < hi");
            if (!(initial_guess[i] >= b.lo && initial_guess[i] <= b.hi))
                throw InvalidParameter("fit: initial guess of " + name + " outside its bounds");
        }
    }
};

struct FitResult {
    FitVector best_fit{};
    double residual = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    bool at_bound = false;
};

/// Scenario with the fit vector applied. The frequency offset is not part of
/// the scenario; it shifts the model grid.
inline Scenario apply_parameters(const Scenario& base, const FitVector& p) {
    Scenario s = base;
    s.medium.a0_La = p[0];
    s.medium.doppler_width = to_angular(p[1]);
    s.cavity.excess_loss = p[2];
    return s;
}

/// Model transmission on the observed grid.
inline std::vector<double> model_curve(const FitVector& params, const FitProblem& problem) {
    const Scenario s = apply_parameters(problem.base, params);
    s.validate();
    const auto& obs = problem.observed;
    std::vector<double> out(obs.size());
    for (std::size_t i = 0; i < obs.size(); ++i)
        out[i] = problem.model_scale * transmission(to_angular(obs.frequency(i) - params[3]), s);
    return out;
}

/// Sum of squared differences between model and observation.
inline double residual(const FitVector& params, const FitProblem& problem) {
    const auto model = model_curve(params, problem);
    double sum = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        const double d = model[i] - problem.observed.values[i];
        sum += d * d;
    }
    return sum;
}

inline FitResult fit_parameters(const FitProblem& problem) {
    problem.validate();

    std::vector<std::size_t> index;
    for (std::size_t i = 0; i < fit_param_count; ++i)
        if (problem.free[i]) index.push_back(i);

    std::vector<double> lo, hi;
    for (std::size_t i : index) {
        lo.push_back(problem.bounds[i].lo);
        hi.push_back(problem.bounds[i].hi);
    }

    FitVector fixed = problem.initial_guess;
    auto expand = [&](const std::vector<double>& x) {
        FitVector p = fixed;
        for (std::size_t k = 0; k < index.size(); ++k) p[index[k]] = x[k];
        return p;
    };
    auto objective = [&](const std::vector<double>& x) {
        const FitVector p = expand(x);
        const Scenario s = apply_parameters(problem.base, p);
        if (s.medium.a0_La < 0.0 || s.cavity.excess_loss < 0.0 || s.cavity.excess_loss >= 1.0)
            return std::numeric_limits<double>::max();
        return residual(p, problem);
    };

    std::vector<std::vector<double>> starts;
    std::vector<double> guess;
    for (std::size_t i : index) guess.push_back(problem.initial_guess[i]);
    starts.push_back(guess);
    if (problem.multistart && problem.free[0]) {
        const auto pos = static_cast<std::size_t>(std::find(index.begin(), index.end(), 0) - index.begin());
        const auto& b = problem.bounds[0];
        for (int k = 0; k < 5; ++k) {
            auto s = guess;
            // geometric grid when the range allows it
            const double t = (k + 0.5) / 5.0;
            s[pos] = b.lo > 0.0 ? b.lo * std::pow(b.hi / b.lo, t) : b.lo + t * (b.hi - b.lo);
            starts.push_back(std::move(s));
        }
    }

    SimplexResult best;
    bool have = false;
    int iterations = 0;
    int evaluations = 0;
    for (const auto& start : starts) {
        SimplexResult r = minimize_bounded(objective, start, lo, hi, problem.simplex);
        iterations += r.iterations;
        evaluations += r.evaluations;
        if (!have || r.value < best.value) {
            best = std::move(r);
            have = true;
        }
    }

    FitResult out;
    out.best_fit = expand(best.x);
    out.residual = best.value;
    out.iterations = iterations;
    out.evaluations = evaluations;
    for (std::size_t k = 0; k < index.size(); ++k) {
        const double margin = 1e-6 * (hi[k] - lo[k]);
        if (best.x[k] <= lo[k] + margin || best.x[k] >= hi[k] - margin) out.at_bound = true;
    }
    out.converged = best.converged && !out.at_bound;
    return out;
}

} // namespace cavsplit
