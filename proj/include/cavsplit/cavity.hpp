#pragma once

// Standing-wave two-mirror cavity with an intracavity vapor cell: round-trip
// phase and amplitude, Airy transmission normalized to the empty-cavity peak.
//
// The medium is crossed twice per round trip. Only the total round-trip
// phase and loss enter, so the cell position inside the cavity is irrelevant.

#include <cmath>
#include <complex>

#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/medium.hpp"

namespace cavsplit {

/// Mirrors and geometry. Defaults are the 17.7 cm, 90% / 99.5% cavity.
struct CavityParams {
    double Lc = 0.177;
    double R1 = 0.90;
    double R2 = 0.995;
    double excess_loss = 0.0; // round-trip intensity loss besides the mirrors

    /// Round-trip field amplitude factor of the empty cavity.
    double rho() const { return std::sqrt(R1 * R2) * std::sqrt(1.0 - excess_loss); }

    void validate() const {
        if (!(Lc > 0.0)) throw InvalidParameter("cavity: Lc must be > 0");
        if (!(R1 > 0.0 && R1 < 1.0)) throw InvalidParameter("cavity: R1 must lie in (0, 1)");
        if (!(R2 > 0.0 && R2 < 1.0)) throw InvalidParameter("cavity: R2 must lie in (0, 1)");
        if (!(excess_loss >= 0.0 && excess_loss < 1.0))
            throw InvalidParameter("cavity: excess_loss must lie in [0, 1)");
    }
};

/// Free spectral range c / (2 Lc), Hz.
inline double fsr(const CavityParams& cavity) {
    if (!(cavity.Lc > 0.0)) throw InvalidParameter("fsr: Lc must be > 0");
    return phys::speed_of_light / (2.0 * cavity.Lc);
}

inline double finesse_from_rho(double rho) { return phys::pi * std::sqrt(rho) / (1.0 - rho); }

inline double finesse(const CavityParams& cavity) { return finesse_from_rho(cavity.rho()); }

/// Cavity linewidth FSR / F, Hz.
inline double linewidth(const CavityParams& cavity) { return fsr(cavity) / finesse(cavity); }

/// Excess round-trip loss that brings the mirrors down to `target_finesse`.
/// Solves F = pi sqrt(rho) / (1 - rho) for rho, then L = 1 - rho^2 / (R1 R2).
inline double calibrate_excess_loss(double target_finesse, double R1, double R2) {
    if (!(R1 > 0.0 && R1 < 1.0 && R2 > 0.0 && R2 < 1.0))
        throw InvalidParameter("calibrate_excess_loss: reflectivities must lie in (0, 1)");
    if (!(target_finesse > 0.0))
        throw InvalidParameter("calibrate_excess_loss: finesse must be > 0");
    const double mirrors_only = finesse_from_rho(std::sqrt(R1 * R2));
    if (target_finesse > mirrors_only * (1.0 + 1e-12))
        throw Infeasible("target finesse " + std::to_string(target_finesse) +
                         " exceeds mirrors-only finesse " + std::to_string(mirrors_only));
    // F s^2 + pi s - F = 0 with s = sqrt(rho).
    const double f = target_finesse;
    const double s = (-phys::pi + std::sqrt(phys::pi * phys::pi + 4.0 * f * f)) / (2.0 * f);
    const double rho = s * s;
    const double loss = 1.0 - rho * rho / (R1 * R2);
    return loss < 0.0 ? 0.0 : loss;
}

/// Medium plus cavity. The atomic line sits on a cavity resonance.
struct Scenario {
    MediumParams medium;
    CavityParams cavity;

    void validate() const {
        medium.validate();
        cavity.validate();
        if (!(medium.La <= cavity.Lc))
            throw InvalidParameter("scenario: medium length La must not exceed Lc");
    }
};

/// Longitudinal order m0 of the cavity resonance anchored on the atomic line.
inline long anchor_order(const CavityParams& cavity, double lambda_a) {
    return std::lround(2.0 * cavity.Lc / lambda_a);
}

struct RoundTrip {
    double phase = 0.0;     // round-trip phase minus 2*pi*m0, rad
    double amplitude = 0.0; // round-trip field amplitude factor
    long anchor = 0;        // m0

    /// Absolute unwrapped round-trip phase. Loses precision at ~1e-9 rad;
    /// resonance tests should use `phase` directly.
    double total_phase() const { return phys::two_pi * static_cast<double>(anchor) + phase; }
};

namespace detail {

inline RoundTrip round_trip_from(double delta, const ComplexResponse& r, const CavityParams& cavity,
                                 const MediumParams& medium, long anchor) {
    const double c = phys::speed_of_light;
    RoundTrip rt;
    rt.anchor = anchor;
    rt.phase = (2.0 / c) * (delta * cavity.Lc + medium.omega_a() * r.n_minus_1 * medium.La);
    rt.amplitude = cavity.rho() * std::exp(-r.alpha * medium.La);
    return rt;
}

inline double airy_normalized(const RoundTrip& rt, double single_pass_intensity, double rho) {
    const std::complex<double> loop = std::polar(rt.amplitude, rt.phase);
    const double denom = std::norm(1.0 - loop);
    return single_pass_intensity * (1.0 - rho) * (1.0 - rho) / denom;
}

} // namespace detail

/// Round-trip phase and amplitude at detuning `delta` (rad/s) from the line.
/// phase = (2/c)[delta Lc + omega_a (n - 1) La], amplitude = rho exp(-alpha La).
inline RoundTrip round_trip(double delta, const CavityParams& cavity, const MediumParams& medium) {
    const ComplexResponse r = response(delta, medium);
    return detail::round_trip_from(delta, r, cavity, medium, anchor_order(cavity, medium.lambda_a));
}

/// Transmitted intensity normalized to the empty-cavity peak, in [0, 1].
inline double transmission(double delta, const CavityParams& cavity, const MediumParams& medium) {
    const ComplexResponse r = response(delta, medium);
    const RoundTrip rt = detail::round_trip_from(delta, r, cavity, medium, 0);
    return detail::airy_normalized(rt, std::exp(-r.alpha * medium.La), cavity.rho());
}

inline double transmission(double delta, const Scenario& s) {
    return transmission(delta, s.cavity, s.medium);
}

} // namespace cavsplit
