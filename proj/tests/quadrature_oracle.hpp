#pragma once

// Direct quadrature of the Maxwellian velocity average of the Lorentzian
// response, used as an independent check on the Faddeeva evaluation.

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cavsplit/medium.hpp"

namespace cavsplit::testing {

/// alpha and n-1 for homogeneous amplitude `a0`, integrating over the reduced
/// velocity x with weight exp(-x^2)/sqrt(pi) and Doppler shift doppler * x.
inline ComplexResponse voigt_by_quadrature(double delta, double gamma, double doppler, double a0,
                                           double omega_a) {
    using boost::math::quadrature::gauss_kronrod;
    const double x0 = delta / doppler;        // Lorentzian center in reduced units
    const double w = 0.5 * gamma / doppler;   // its half width
    const double reach = 9.0 + std::abs(x0);
    const double cuts[] = {-reach, x0 - 200 * w, x0 - 5 * w, x0, x0 + 5 * w, x0 + 200 * w, reach};

    auto integrate = [&](auto&& f) {
        double sum = 0.0;
        for (int k = 0; k + 1 < 7; ++k) {
            const double a = std::clamp(cuts[k], -reach, reach);
            const double b = std::clamp(cuts[k + 1], -reach, reach);
            if (b > a) sum += gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-11);
        }
        return sum;
    };
    const double norm = 1.0 / std::sqrt(phys::pi);
    const double alpha = integrate([&](double x) {
        return norm * std::exp(-x * x) * lorentzian_response(delta - doppler * x, gamma, a0, omega_a).alpha;
    });
    const double n1 = integrate([&](double x) {
        return norm * std::exp(-x * x) * lorentzian_response(delta - doppler * x, gamma, a0, omega_a).n_minus_1;
    });
    return {alpha, n1};
}

} // namespace cavsplit::testing
