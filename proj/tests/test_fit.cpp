#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "cavsplit/fit.hpp"

using namespace cavsplit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario panel(double a0_La) {
    Scenario s;
    s.cavity.excess_loss = calibrate_excess_loss(20.0, s.cavity.R1, s.cavity.R2);
    s.medium.a0_La = a0_La;
    return s;
}

FitProblem synthetic(double truth = 70.0) {
    FitProblem p;
    p.base = panel(truth);
    p.observed = sweep(symmetric_window(p.base.cavity), p.base);
    p.free = {true, false, false, false};
    p.bounds = {Bounds{1.0, 500.0}, Bounds{50e6, 1e9}, Bounds{0.0, 0.5}, Bounds{-1e8, 1e8}};
    p.initial_guess = FitProblem::parameters_of(p.base);
    p.initial_guess[0] = 50.0;
    return p;
}

} // namespace

TEST_CASE("residual: zero at the generating parameters") {
    const FitProblem p = synthetic();
    CHECK(residual(FitProblem::parameters_of(p.base), p) <= 1e-20);
}

TEST_CASE("residual: perturbed optical depth and pinned cross-panel value") {
    const FitProblem p = synthetic();
    FitVector v = FitProblem::parameters_of(p.base);
    v[0] *= 1.1;
    CHECK(residual(v, p) > 0.0);
    v[0] = 130.0;
    // independent vectorized evaluation of the same sum
    CHECK_THAT(residual(v, p), WithinRel(1.1623629368181985, 1e-12));
}

TEST_CASE("residual: frequency offset shifts the model grid") {
    FitProblem p = synthetic();
    FitVector v = FitProblem::parameters_of(p.base);
    const Spectrum shifted = sweep({p.observed.start_hz + 20e6, p.observed.stop_hz() + 20e6, p.observed.step_hz}, p.base);
    p.observed.values = shifted.values;
    v[3] = -20e6;
    CHECK(residual(v, p) <= 1e-20);
}

TEST_CASE("fit: noiseless recovery of a0La = 70") {
    const FitProblem p = synthetic();
    const FitResult r = fit_parameters(p);
    CHECK(r.converged);
    CHECK_FALSE(r.at_bound);
    CHECK_THAT(r.best_fit[0], WithinRel(70.0, 0.01));
    CHECK(r.residual < 1e-6);
    CHECK(r.iterations <= 2000);
}

TEST_CASE("fit: guess at the truth stays there") {
    FitProblem p = synthetic();
    p.initial_guess[0] = 70.0;
    const FitResult r = fit_parameters(p);
    CHECK(r.converged);
    CHECK(r.best_fit[0] == 70.0);
    CHECK(r.residual == 0.0);
}

TEST_CASE("fit: local optimality of the noiseless fit") {
    FitProblem p = synthetic();
    p.free[2] = true;
    p.initial_guess[2] = 0.1;
    const FitResult r = fit_parameters(p);
    for (std::size_t i : {0u, 2u}) {
        for (double f : {0.99, 1.01}) {
            FitVector v = r.best_fit;
            v[i] *= f;
            CHECK(r.residual <= residual(v, p));
        }
    }
}

TEST_CASE("fit: bounds are respected and an excluded truth is not converged") {
    FitProblem p = synthetic();
    p.bounds[0] = {75.0, 85.0};
    p.initial_guess[0] = 80.0;
    const FitResult r = fit_parameters(p);
    CHECK_FALSE(r.converged);
    CHECK(r.at_bound);
    CHECK(r.best_fit[0] >= 75.0);
    CHECK(r.best_fit[0] <= 85.0);
    CHECK_THAT(r.best_fit[0], WithinAbs(75.0, 0.01));
}

TEST_CASE("fit: identical problems give identical results") {
    const FitProblem p = synthetic();
    const FitResult a = fit_parameters(p);
    const FitResult b = fit_parameters(p);
    CHECK(a.best_fit == b.best_fit);
    CHECK(a.residual == b.residual);
    CHECK(a.iterations == b.iterations);
}

TEST_CASE("fit: joint rescaling of data and model leaves the optimum") {
    const FitProblem p = synthetic();
    FitProblem q = p;
    for (auto& v : q.observed.values) v *= 3.0;
    q.model_scale = 3.0;
    const FitResult a = fit_parameters(p);
    const FitResult b = fit_parameters(q);
    CHECK_THAT(b.best_fit[0], WithinRel(a.best_fit[0], 1e-6));
    FitVector v = FitProblem::parameters_of(p.base);
    v[0] = 90.0;
    CHECK_THAT(residual(v, q), WithinRel(9.0 * residual(v, p), 1e-12));
}

TEST_CASE("fit: multistart recovers the truth from a poor guess") {
    FitProblem p = synthetic();
    p.initial_guess[0] = 300.0;
    p.multistart = true;
    const FitResult r = fit_parameters(p);
    CHECK_THAT(r.best_fit[0], WithinRel(70.0, 0.01));
}

TEST_CASE("fit: additive noise, two free parameters, median of 20 trials") {
    FitProblem p = synthetic();
    p.free[2] = true;
    const auto clean = p.observed.values;
    std::mt19937_64 rng(12345);
    std::normal_distribution<double> noise(0.0, 0.01);
    std::vector<double> errors;
    for (int t = 0; t < 20; ++t) {
        for (std::size_t i = 0; i < clean.size(); ++i) p.observed.values[i] = clean[i] + noise(rng);
        p.initial_guess[0] = 50.0;
        p.initial_guess[2] = 0.1;
        const FitResult r = fit_parameters(p);
        errors.push_back(std::abs(r.best_fit[0] - 70.0) / 70.0);
    }
    std::sort(errors.begin(), errors.end());
    CHECK(0.5 * (errors[9] + errors[10]) < 0.05);
}

TEST_CASE("fit problem validation") {
    FitProblem p = synthetic();
    p.free = {};
    CHECK_THROWS_AS(fit_parameters(p), InvalidParameter);
    p = synthetic();
    p.initial_guess[0] = 600.0;
    CHECK_THROWS_AS(fit_parameters(p), InvalidParameter);
    p = synthetic();
    p.bounds[0] = {5.0, 5.0};
    CHECK_THROWS_AS(fit_parameters(p), InvalidParameter);
    CHECK(parse_fit_param("excess_loss") == FitParam::excess_loss);
    CHECK_THROWS_AS(parse_fit_param("gamma"), InvalidParameter);
}

TEST_CASE("simplex: bounded quadratic and Rosenbrock") {
    auto quad = [](const std::vector<double>& x) { return (x[0] - 3.0) * (x[0] - 3.0) + (x[1] + 1.0) * (x[1] + 1.0); };
    SimplexResult r = minimize_bounded(quad, {0.0, 0.0}, {-5.0, -5.0}, {5.0, 5.0});
    CHECK(r.converged);
    CHECK_THAT(r.x[0], WithinAbs(3.0, 1e-4));
    CHECK_THAT(r.x[1], WithinAbs(-1.0, 1e-4));

    r = minimize_bounded(quad, {0.0, 0.0}, {-5.0, 0.0}, {5.0, 5.0});
    CHECK_THAT(r.x[1], WithinAbs(0.0, 1e-9));

    auto rosen = [](const std::vector<double>& x) {
        return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
    };
    r = minimize_bounded(rosen, {-1.2, 1.0}, {-2.0, -2.0}, {2.0, 2.0});
    CHECK_THAT(r.x[0], WithinAbs(1.0, 1e-3));
    CHECK_THAT(r.x[1], WithinAbs(1.0, 1e-3));
    CHECK_THROWS_AS(minimize_bounded(quad, {9.0, 0.0}, {-5.0, -5.0}, {5.0, 5.0}), InvalidParameter);
}
