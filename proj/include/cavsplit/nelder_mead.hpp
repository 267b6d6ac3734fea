#pragma once

// Bounded Nelder-Mead simplex. Works in coordinates scaled to the unit box,
// so bounds are enforced by clamping and the stopping tolerance is relative
// to each parameter's range.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "cavsplit/error.hpp"

namespace cavsplit {

struct SimplexOptions {
    double tolerance = 1e-6;     // simplex diameter in box-scaled units
    int max_iterations = 2000;
    double initial_step = 0.05;  // initial edge length in box-scaled units
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false; // diameter criterion reached
};

template <typename Objective>
SimplexResult minimize_bounded(Objective&& objective, const std::vector<double>& guess,
                               const std::vector<double>& lower, const std::vector<double>& upper,
                               const SimplexOptions& options = {}) {
    const std::size_t n = guess.size();
    if (n == 0 || lower.size() != n || upper.size() != n)
        throw InvalidParameter("minimize_bounded: dimension mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(std::isfinite(lower[i]) && std::isfinite(upper[i]) && lower[i] < upper[i]))
            throw InvalidParameter("minimize_bounded: bounds must be finite with lo < hi");
        if (!(guess[i] >= lower[i] && guess[i] <= upper[i]))
            throw InvalidParameter("minimize_bounded: initial guess outside bounds");
    }

    using Point = std::vector<double>;
    auto to_x = [&](const Point& u) {
        Point x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = lower[i] + std::clamp(u[i], 0.0, 1.0) * (upper[i] - lower[i]);
        return x;
    };
    auto clamp_unit = [](Point u) {
        for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
        return u;
    };

    SimplexResult result;
    auto eval = [&](const Point& u) {
        ++result.evaluations;
        return objective(to_x(u));
    };

    std::vector<Point> simplex(n + 1, Point(n));
    for (std::size_t i = 0; i < n; ++i) simplex[0][i] = (guess[i] - lower[i]) / (upper[i] - lower[i]);
    for (std::size_t k = 1; k <= n; ++k) {
        simplex[k] = simplex[0];
        const double step = simplex[0][k - 1] + options.initial_step <= 1.0 ? options.initial_step
                                                                           : -options.initial_step;
        simplex[k][k - 1] += step;
    }
    std::vector<double> values(n + 1);
    for (std::size_t k = 0; k <= n; ++k) values[k] = eval(simplex[k]);

    std::vector<std::size_t> order(n + 1);
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<Point> s(n + 1);
        std::vector<double> v(n + 1);
        for (std::size_t k = 0; k <= n; ++k) {
            s[k] = simplex[order[k]];
            v[k] = values[order[k]];
        }
        simplex.swap(s);
        values.swap(v);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (std::size_t k = 1; k <= n; ++k)
            for (std::size_t i = 0; i < n; ++i) d = std::max(d, std::abs(simplex[k][i] - simplex[0][i]));
        return d;
    };

    constexpr double reflect = 1.0;
    constexpr double expand = 2.0;
    constexpr double contract = 0.5;
    constexpr double shrink = 0.5;

    sort_simplex();
    while (true) {
        if (diameter() < options.tolerance) {
            result.converged = true;
            break;
        }
        if (result.iterations >= options.max_iterations) break;
        ++result.iterations;

        Point centroid(n, 0.0);
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[k][i] / static_cast<double>(n);
        auto along = [&](double t) {
            Point p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = centroid[i] + t * (simplex[n][i] - centroid[i]);
            return clamp_unit(std::move(p));
        };

        const Point xr = along(-reflect);
        const double fr = eval(xr);
        if (fr < values[0]) {
            const Point xe = along(-expand);
            const double fe = eval(xe);
            if (fe < fr) {
                simplex[n] = xe;
                values[n] = fe;
            } else {
                simplex[n] = xr;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = xr;
            values[n] = fr;
        } else {
            const bool outside = fr < values[n];
            const Point xc = outside ? along(-contract) : along(contract);
            const double fc = eval(xc);
            if (fc < (outside ? fr : values[n])) {
                simplex[n] = xc;
                values[n] = fc;
            } else {
                for (std::size_t k = 1; k <= n; ++k) {
                    for (std::size_t i = 0; i < n; ++i)
                        simplex[k][i] = simplex[0][i] + shrink * (simplex[k][i] - simplex[0][i]);
                    values[k] = eval(simplex[k]);
                }
            }
        }
        sort_simplex();
    }

    result.x = to_x(simplex[0]);
    result.value = values[0];
    return result;
}

} // namespace cavsplit
