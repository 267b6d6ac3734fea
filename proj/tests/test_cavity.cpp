#include <catch_amalgamated.hpp>

#include <cmath>

#include "cavsplit/cavity.hpp"
#include "cavsplit/spectrum.hpp"

using namespace cavsplit;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Scenario calibrated(double a0_La = 0.0, ResponseMode mode = ResponseMode::approx_doppler) {
    Scenario s;
    s.cavity.excess_loss = calibrate_excess_loss(20.0, s.cavity.R1, s.cavity.R2);
    s.medium.a0_La = a0_La;
    s.medium.mode = mode;
    return s;
}

} // namespace

TEST_CASE("free spectral range") {
    CavityParams c;
    CHECK_THAT(fsr(c), WithinRel(846.87135e6, 1e-7));
    CHECK_THAT(fsr(c), WithinRel(850e6, 0.005));
    c.Lc = 0.15;
    CHECK_THAT(fsr(c), WithinRel(999.3082e6, 1e-7));
    CavityParams d;
    d.Lc = 2 * 0.177;
    CHECK_THAT(fsr(d), WithinRel(0.5 * fsr(CavityParams{}), 1e-15));
}

TEST_CASE("finesse calibration") {
    const double loss = calibrate_excess_loss(20.0, 0.90, 0.995);
    CHECK_THAT(loss, WithinRel(0.18410052, 1e-6));
    CHECK_THAT(1.0 - std::sqrt(1.0 - loss), WithinRel(0.0967, 1e-3)); // one-way equivalent
    CavityParams c;
    c.excess_loss = loss;
    CHECK_THAT(c.rho(), WithinRel(0.8547736, 1e-6));
    CHECK_THAT(finesse(c), WithinRel(20.0, 1e-3));

    CHECK_THAT(finesse(CavityParams{}), WithinRel(56.9196, 1e-5));
    CHECK_THAT(calibrate_excess_loss(finesse(CavityParams{}), 0.90, 0.995), WithinAbs(0.0, 1e-12));
    CHECK_THROWS_AS(calibrate_excess_loss(60.0, 0.90, 0.995), Infeasible);
    CHECK_THROWS_AS(calibrate_excess_loss(20.0, 1.0, 0.995), InvalidParameter);
}

TEST_CASE("round trip: empty cavity resonances and line center") {
    Scenario s = calibrated();
    const double f = fsr(s.cavity);
    for (int m = -3; m <= 3; ++m) {
        const RoundTrip rt = round_trip(to_angular(m * f), s.cavity, s.medium);
        CHECK_THAT(rt.phase, WithinAbs(phys::two_pi * m, 1e-12));
        CHECK_THAT(rt.amplitude, WithinRel(s.cavity.rho(), 1e-15));
        CHECK(rt.anchor == anchor_order(s.cavity, s.medium.lambda_a));
    }
    CHECK(anchor_order(s.cavity, 780e-9) == 453846);

    s.medium.a0_La = 12.0;
    const RoundTrip center = round_trip(0.0, s.cavity, s.medium);
    CHECK(center.phase == 0.0);
    CHECK_THAT(center.amplitude, WithinRel(s.cavity.rho() * std::exp(-12.0), 1e-14));
}

TEST_CASE("round trip: pinned value at +500 MHz for a0La = 12") {
    const Scenario s = calibrated(12.0);
    const RoundTrip rt = round_trip(to_angular(500e6), s.cavity, s.medium);
    CHECK_THAT(rt.phase, WithinRel(-3.6558152027134484, 1e-10));
    CHECK_THAT(rt.amplitude, WithinRel(0.24169102344844589, 1e-10));
}

TEST_CASE("transmission: normalization, anti-resonance and half maximum") {
    const Scenario s = calibrated();
    const double f = fsr(s.cavity);
    for (int m = -3; m <= 3; ++m) CHECK_THAT(transmission(to_angular(m * f), s), WithinAbs(1.0, 1e-12));

    const double anti = transmission(to_angular(0.5 * f), s);
    const double F = finesse(s.cavity);
    CHECK_THAT(anti, WithinRel(1.0 / (1.0 + std::pow(2.0 * F / phys::pi, 2)), 1e-9));
    CHECK_THAT(anti, WithinRel(6.13e-3, 2e-3));

    const double kappa = linewidth(s.cavity);
    CHECK_THAT(transmission(to_angular(0.5 * kappa), s), WithinAbs(0.5, 0.01));
    CHECK_THAT(transmission(to_angular(f - 0.5 * kappa), s), WithinAbs(0.5, 0.01));
}

TEST_CASE("transmission: periodicity of the empty cavity") {
    const Scenario s = calibrated();
    const double f = fsr(s.cavity);
    for (double x = -3 * f; x <= 2 * f; x += 7.77e6) {
        const double a = transmission(to_angular(x), s);
        const double b = transmission(to_angular(x + f), s);
        CHECK(std::abs(a - b) <= 1e-10);
    }
}

TEST_CASE("transmission: mirror symmetry and bounds") {
    for (auto mode : {ResponseMode::homogeneous, ResponseMode::approx_doppler, ResponseMode::voigt}) {
        for (double a0 : {0.0, 1.0, 12.0, 70.0, 170.0}) {
            const Scenario s = calibrated(a0, mode);
            for (double x = 0.0; x <= 3.3 * fsr(s.cavity); x += 3.1e6) {
                const double a = transmission(to_angular(x), s);
                const double b = transmission(to_angular(-x), s);
                CHECK(std::abs(a - b) <= 1e-9);
                CHECK(a >= 0.0);
                CHECK(a <= 1.0);
            }
        }
    }
}

TEST_CASE("transmission: line center decreases with optical depth") {
    double previous = 2.0;
    for (double a0 = 0.0; a0 <= 200.0; a0 += 2.5) {
        const double t = transmission(0.0, calibrated(a0));
        CHECK(t < previous);
        previous = t;
    }
}

TEST_CASE("empty-cavity linewidth from a swept resonance") {
    const Scenario s = calibrated();
    const double kappa = linewidth(s.cavity);
    const Spectrum sp = sweep({-0.5 * fsr(s.cavity), 0.5 * fsr(s.cavity), 0.2e6}, s);
    const auto peaks = find_peaks(sp, 0.5);
    REQUIRE(peaks.size() == 1);
    CHECK_THAT(peaks[0].fwhm_hz, WithinRel(fsr(s.cavity) / 20.0, 0.01));
    CHECK_THAT(peaks[0].fwhm_hz, WithinRel(kappa, 0.01));
}

TEST_CASE("scenario validation") {
    Scenario s = calibrated();
    s.medium.La = 0.2;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    s = calibrated();
    s.cavity.R2 = 1.0;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
    s = calibrated();
    s.cavity.excess_loss = 1.0;
    CHECK_THROWS_AS(s.validate(), InvalidParameter);
}
