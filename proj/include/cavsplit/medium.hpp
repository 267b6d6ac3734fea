#pragma once

// Linear response of a two-level vapor: intensity absorption coefficient and
// refractive-index deviation, in homogeneous, approximate-Doppler and exact
// Voigt form, plus the temperature / density helpers that feed a0*La.

#include <cmath>
#include <complex>
#include <span>
#include <string>
#include <string_view>

#include "cavsplit/constants.hpp"
#include "cavsplit/error.hpp"
#include "cavsplit/faddeeva.hpp"

namespace cavsplit {

enum class ResponseMode { homogeneous, approx_doppler, voigt };

inline std::string_view to_string(ResponseMode mode) {
    switch (mode) {
    case ResponseMode::homogeneous: return "homogeneous";
    case ResponseMode::approx_doppler: return "approx_doppler";
    case ResponseMode::voigt: return "voigt";
    }
    return "unknown";
}

inline ResponseMode parse_response_mode(std::string_view text) {
    if (text == "homogeneous") return ResponseMode::homogeneous;
    if (text == "approx_doppler") return ResponseMode::approx_doppler;
    if (text == "voigt") return ResponseMode::voigt;
    throw InvalidParameter("unknown response mode '" + std::string(text) +
                           "' (expected homogeneous, approx_doppler or voigt)");
}

struct ComplexResponse {
    double alpha = 0.0;     // intensity absorption coefficient, 1/m
    double n_minus_1 = 0.0; // refractive index deviation
};

/// Two-level vapor description. Frequencies are angular (rad/s).
///
/// `a0_La` is the line-center intensity optical depth of the active profile:
/// for approx_doppler it is the Doppler-rescaled coefficient times La, for
/// voigt it is the peak of the convolved profile times La.
struct MediumParams {
    double lambda_a = 780e-9;
    double gamma_a = phys::two_pi * 6e6;
    double doppler_width = phys::two_pi * 343e6;
    double a0_La = 0.0;
    double La = 0.05;
    ResponseMode mode = ResponseMode::approx_doppler;

    double omega_a() const { return phys::two_pi * phys::speed_of_light / lambda_a; }
    double wavenumber() const { return phys::two_pi / lambda_a; }
    double a0() const { return a0_La / La; }

    /// Linewidth entering the Lorentzian for the approximate modes.
    double effective_width() const {
        return mode == ResponseMode::homogeneous ? gamma_a : doppler_width;
    }

    /// 2*pi*a0/k << 1, checked against 0.1.
    bool weak_response_valid() const { return phys::two_pi * a0() / wavenumber() < 0.1; }

    void validate() const {
        if (!(lambda_a > 0.0)) throw InvalidParameter("medium: lambda_a must be > 0");
        if (!(gamma_a > 0.0)) throw InvalidParameter("medium: gamma_a must be > 0");
        if (!(La > 0.0)) throw InvalidParameter("medium: La must be > 0");
        if (!(a0_La >= 0.0)) throw InvalidParameter("medium: a0_La must be >= 0");
        if (!(doppler_width >= 0.0)) throw InvalidParameter("medium: doppler_width must be >= 0");
        if (mode == ResponseMode::approx_doppler && !(doppler_width > 0.0))
            throw InvalidParameter("medium: approx_doppler mode needs doppler_width > 0");
    }
};

/// Homogeneously broadened two-level response with FWHM `gamma` and
/// line-center absorption `a0` (1/m).
inline ComplexResponse lorentzian_response(double delta, double gamma, double a0, double omega_a) {
    if (!(gamma > 0.0)) throw InvalidParameter("lorentzian_response: gamma must be > 0");
    const double denom = 4.0 * delta * delta + gamma * gamma;
    return {a0 * gamma * gamma / denom,
            -a0 * (phys::speed_of_light / omega_a) * 2.0 * delta * gamma / denom};
}

/// Maxwellian velocity average of the Lorentzian response.
///
/// `a0_homogeneous` is the line-center absorption the atoms would have at rest;
/// `doppler` is u*k with u = sqrt(2 kB T / m). Evaluated through
/// L_V = a0 (gamma/2) sqrt(pi)/doppler * w((delta + i gamma/2)/doppler), with
/// alpha = Re L_V and n - 1 = -(c/omega_a) Im L_V.
inline ComplexResponse voigt_response(double delta, double gamma, double doppler,
                                      double a0_homogeneous, double omega_a) {
    if (!(gamma > 0.0)) throw InvalidParameter("voigt_response: gamma must be > 0");
    if (!(doppler > 0.0)) return lorentzian_response(delta, gamma, a0_homogeneous, omega_a);
    const std::complex<double> z{delta / doppler, 0.5 * gamma / doppler};
    const std::complex<double> line =
        a0_homogeneous * (0.5 * gamma) * std::sqrt(phys::pi) / doppler * faddeeva(z);
    return {line.real(), -(phys::speed_of_light / omega_a) * line.imag()};
}

/// Ratio of the Voigt line-center absorption to the homogeneous one.
inline double voigt_center_factor(double gamma, double doppler) {
    if (!(doppler > 0.0)) return 1.0;
    const double y = 0.5 * gamma / doppler;
    return y * std::sqrt(phys::pi) * faddeeva({0.0, y}).real();
}

/// Doppler-broadened response. approx_doppler: Lorentzian with gamma replaced
/// by the Doppler width. voigt: exact convolution, scaled so that the
/// line-center absorption equals params.a0(). Zero Doppler width reduces to
/// the homogeneous line.
inline ComplexResponse doppler_response(double delta, const MediumParams& params) {
    const double a0 = params.a0();
    const double omega_a = params.omega_a();
    switch (params.mode) {
    case ResponseMode::approx_doppler:
        if (!(params.doppler_width > 0.0))
            return lorentzian_response(delta, params.gamma_a, a0, omega_a);
        return lorentzian_response(delta, params.doppler_width, a0, omega_a);
    case ResponseMode::voigt: {
        if (!(params.doppler_width > 0.0))
            return lorentzian_response(delta, params.gamma_a, a0, omega_a);
        const double a0_hom = a0 / voigt_center_factor(params.gamma_a, params.doppler_width);
        return voigt_response(delta, params.gamma_a, params.doppler_width, a0_hom, omega_a);
    }
    case ResponseMode::homogeneous:
        break;
    }
    throw InvalidParameter("doppler_response: medium mode must be approx_doppler or voigt");
}

/// Response in whatever mode the medium is configured for.
inline ComplexResponse response(double delta, const MediumParams& params) {
    if (params.mode == ResponseMode::homogeneous)
        return lorentzian_response(delta, params.gamma_a, params.a0(), params.omega_a());
    return doppler_response(delta, params);
}

/// Doppler width (omega/c) sqrt(2 kB T / m), rad/s.
inline double doppler_width(double temperature_k, double mass_kg, double lambda) {
    if (!(temperature_k >= 0.0)) throw InvalidParameter("doppler_width: temperature must be >= 0");
    if (!(mass_kg > 0.0)) throw InvalidParameter("doppler_width: mass must be > 0");
    if (!(lambda > 0.0)) throw InvalidParameter("doppler_width: wavelength must be > 0");
    return phys::two_pi / lambda * std::sqrt(2.0 * phys::boltzmann * temperature_k / mass_kg);
}

// ---------------------------------------------------------------------------
// Vapor density

struct VaporModel {
    double abundance = 0.2783;        // 87Rb natural fraction
    double population_factor = 1.0;   // optional hyperfine-population correction
};

inline constexpr double vapor_model_t_min = 250.0;
inline constexpr double vapor_model_t_max = 600.0;

/// Saturated vapor pressure of liquid rubidium (Pa).
/// log10(P/torr) = 15.88253 - 4529.635/T + 5.8663e-4 T - 2.99138 log10(T).
inline double rubidium_vapor_pressure(double temperature_k) {
    if (!(temperature_k > vapor_model_t_min && temperature_k < vapor_model_t_max))
        throw OutOfRange("vapor pressure: temperature " + std::to_string(temperature_k) +
                         " K outside (250, 600) K");
    const double t = temperature_k;
    const double log_torr = 15.88253 - 4529.635 / t + 5.8663e-4 * t - 2.99138 * std::log10(t);
    return std::pow(10.0, log_torr) * phys::pascal_per_torr;
}

/// Total (all-isotope) atom number density, 1/m^3.
inline double rubidium_number_density(double temperature_k) {
    return rubidium_vapor_pressure(temperature_k) / (phys::boltzmann * temperature_k);
}

/// Column density N_D * La (1/m^2) of the selected isotope.
inline double column_density_from_temperature(double temperature_k, double La,
                                              const VaporModel& model = {}) {
    if (!(La > 0.0)) throw InvalidParameter("column density: La must be > 0");
    return rubidium_number_density(temperature_k) * model.abundance * model.population_factor * La;
}

// ---------------------------------------------------------------------------
// Column density -> optical depth

struct CalibrationPair {
    double a0_La;
    double column_density; // 1/m^2
};

/// Fig. 1 pairs of optical depth and column density used for calibration.
inline constexpr CalibrationPair caption_pairs[] = {
    {12.0, 9.4e15}, {70.0, 5.5e16}, {130.0, 1.0e17}, {170.0, 1.3e17}};

/// Effective cross-section minimizing the summed squared relative error
/// of sigma * N against a0_La over the pairs.
inline double fit_sigma_eff(std::span<const CalibrationPair> pairs) {
    double num = 0.0;
    double den = 0.0;
    for (const auto& p : pairs) {
        if (!(p.a0_La > 0.0) || !(p.column_density > 0.0))
            throw InvalidParameter("fit_sigma_eff: pairs must be positive");
        const double r = p.column_density / p.a0_La;
        num += r;
        den += r * r;
    }
    if (den == 0.0) throw InvalidParameter("fit_sigma_eff: no calibration pairs");
    return num / den;
}

inline const double default_sigma_eff = fit_sigma_eff(caption_pairs);

enum class OpticalDepthConvention { calibrated, analytic };

struct OpticalDepthModel {
    OpticalDepthConvention convention = OpticalDepthConvention::calibrated;
    double sigma_eff = default_sigma_eff; // m^2
};

/// a0*La for a column density. The analytic convention uses the rescaled
/// line-center coefficient (3 pi c^2 / omega_a^2)(gamma_a / doppler) N_D.
inline double a0La_from_column_density(double column_density, const MediumParams& medium,
                                       const OpticalDepthModel& model = {}) {
    if (!(column_density >= 0.0))
        throw InvalidParameter("a0La_from_column_density: column density must be >= 0");
    if (model.convention == OpticalDepthConvention::calibrated)
        return model.sigma_eff * column_density;
    const double wa = medium.omega_a();
    const double c = phys::speed_of_light;
    double sigma = 3.0 * phys::pi * c * c / (wa * wa);
    if (medium.mode != ResponseMode::homogeneous && medium.doppler_width > 0.0)
        sigma *= medium.gamma_a / medium.doppler_width;
    return sigma * column_density;
}

/// Far-wing root of the round-trip phase condition: g sqrt(N) =
/// sqrt(a0La * gamma * c / (2 Lc)), rad/s.
inline double collective_coupling_estimate(double a0_La, double gamma, double Lc) {
    if (!(a0_La >= 0.0)) throw InvalidParameter("collective_coupling_estimate: a0_La must be >= 0");
    if (!(Lc > 0.0)) throw InvalidParameter("collective_coupling_estimate: Lc must be > 0");
    return std::sqrt(a0_La * gamma * phys::speed_of_light / (2.0 * Lc));
}

} // namespace cavsplit
