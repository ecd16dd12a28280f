#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "casimir/constants.hpp"
#include "casimir/warnings.hpp"

namespace casimir {

/// Coefficients of the polynomial form of the sphere-plate electrostatic
/// force, X(z) = -2 pi eps0 sum_{i=-1}^{6} c_i (z/R)^i. Fixed constants.
struct ElectrostaticCoefficients {
    // c[-1], c0, ..., c6
    static constexpr std::array<double, 8> c = {0.5,     -1.18260, 22.2375, -571.366,
                                                9592.45, -90200.5, 383084., -300357.};
};

/// Exact sphere-plate force-distance relation,
///   F(z) = 2 pi eps0 (V - V0)^2 sum_n [coth a - n coth n a] / sinh n a,
/// cosh a = 1 + z/R. The summand is negative for n >= 2, so the result is
/// attractive. Throws when the tail does not drop below 1e-8 of the partial
/// sum within n_terms.
inline double exact_electrostatic_force(double R, double z, double V, double V0,
                                        int n_terms = 100000) {
    if (!(z > 0.0)) throw std::domain_error("exact_electrostatic_force: z must be positive");
    const double a = std::acosh(1.0 + z / R);
    const double coth_a = 1.0 / std::tanh(a);

    double sum = 0.0;
    double term = 0.0;
    double tail = 0.0;
    for (int n = 1; n <= n_terms; ++n) {
        term = (coth_a - n / std::tanh(n * a)) / std::sinh(n * a);
        sum += term;
        // Geometric tail bound, valid once the ratio e^{-a}(n+1)/n of
        // successive term magnitudes drops below 1.
        const double r = std::exp(-a) * (n + 1.0) / n;
        if (r < 1.0) {
            tail = std::fabs(term) * r / (1.0 - r);
            if (n > 2 && tail < 1e-8 * std::fabs(sum))
                return 2.0 * pi * eps0 * (V - V0) * (V - V0) * sum;
        }
    }
    throw std::runtime_error("exact_electrostatic_force: series not converged, tail estimate " +
                             std::to_string(tail));
}

/// X(z) = -2 pi eps0 sum c_i (z/R)^i. Warns when z/R leaves the fitted
/// validity range [0.005, 0.06].
inline double electrostatic_basis(double R, double z) {
    const double x = z / R;
    if (x < 0.005 * (1.0 - 1e-9) || x > 0.06 * (1.0 + 1e-9))
        warn("electrostatic_basis: z/R = " + std::to_string(x) +
             " outside fitted range [0.005, 0.06]");
    double sum = ElectrostaticCoefficients::c[0] / x;
    double p = 1.0;
    for (int i = 1; i < 8; ++i) {
        sum += ElectrostaticCoefficients::c[i] * p;
        p *= x;
    }
    return -2.0 * pi * eps0 * sum;
}

/// Polynomial approximant F(z) = X(z) (V - V0)^2.
inline double polynomial_electrostatic_force(double R, double z, double V, double V0) {
    return electrostatic_basis(R, z) * (V - V0) * (V - V0);
}

} // namespace casimir
