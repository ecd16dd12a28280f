#pragma once

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/warnings.hpp"

namespace casimir {

/// Sphere-plate geometry. Valid for separations z << R; evaluation warns
/// when z/R exceeds 0.05.
struct SpherePlateGeometry {
    double radius;              // m
    double radius_uncertainty;  // m

    SpherePlateGeometry(double r, double dr) : radius(r), radius_uncertainty(dr) {
        if (!(r > 0.0) || dr < 0.0)
            throw std::invalid_argument("SpherePlateGeometry: need R > 0 and dR >= 0");
    }
};

struct ForcePoint {
    double z;  // m, separation between zero roughness levels
    double F;  // N, negative = attractive
};

using ForceCurve = std::vector<ForcePoint>;

/// Fresnel-type reflection coefficients at imaginary frequency:
///   r_par  = (eps q - k) / (eps q + k),
///   r_perp = (k - q) / (k + q),
/// with q^2 = k_perp^2 + xi^2/c^2 and k^2 = k_perp^2 + eps xi^2/c^2.
struct ReflectionCoefficients {
    double r_par;
    double r_perp;
};

inline ReflectionCoefficients reflection_coefficients(double eps, double xi, double k_perp) {
    if (!(xi > 0.0)) throw std::domain_error("reflection_coefficients: xi must be positive");
    if (k_perp < 0.0) throw std::domain_error("reflection_coefficients: k_perp must be >= 0");
    if (eps < 1.0) throw std::domain_error("reflection_coefficients: eps must be >= 1");
    if (std::isinf(eps)) return {1.0, 1.0};  // ideal-metal limit of these conventions
    const double xc = xi / c_light;
    const double q = std::sqrt(k_perp * k_perp + xc * xc);
    const double k = std::sqrt(k_perp * k_perp + eps * xc * xc);
    return {(eps * q - k) / (eps * q + k), (k - q) / (k + q)};
}

namespace detail {

// Dimensionless reflection coefficients in the integration variables
// y = 2 z q, xt = 2 z xi / c:  s = sqrt(y^2 + (eps - 1) xt^2).
struct PolarizationProduct {
    double par;
    double perp;
};

inline PolarizationProduct reflection_product(double eps1, double eps2, double y, double xt) {
    auto one = [y, xt](double eps) -> PolarizationProduct {
        if (std::isinf(eps)) return {1.0, 1.0};
        const double s = std::sqrt(y * y + (eps - 1.0) * xt * xt);
        return {(eps * y - s) / (eps * y + s), (s - y) / (s + y)};
    };
    const PolarizationProduct a = one(eps1);
    const PolarizationProduct b = one(eps2);
    return {a.par * b.par, a.perp * b.perp};
}

} // namespace detail

/// Zero-temperature Lifshitz force between a sphere of radius R and a plate,
///   F(z) = (hbar R / 2 pi) int int k dk dxi sum_pol ln[1 - r1 r2 e^(-2 z q)],
/// evaluated in the compressed variables y = 2 z q, xt = 2 z xi / c. Always
/// attractive (negative) for the models built here.
inline double casimir_force(const SpherePlateGeometry& geom, const PermittivityModel& eps1,
                            const PermittivityModel& eps2, double z, double rel_tol = 1e-5) {
    if (!(z > 0.0)) throw std::domain_error("casimir_force: z must be positive");
    if (z / geom.radius > 0.05)
        warn("casimir_force: z/R = " + std::to_string(z / geom.radius) +
             " exceeds 0.05; proximity-force form degrades");

    const double xi_scale = c_light / (2.0 * z);

    auto outer = [&](double xt) {
        const double e1 = eps1.is_ideal_metal() ? std::numeric_limits<double>::infinity()
                                                : eps1(xt * xi_scale);
        const double e2 = eps2.is_ideal_metal() ? std::numeric_limits<double>::infinity()
                                                : eps2(xt * xi_scale);
        auto inner = [&](double y) {
            const auto rp = detail::reflection_product(e1, e2, y, xt);
            const double e = std::exp(-y);
            return y * (std::log1p(-rp.par * e) + std::log1p(-rp.perp * e));
        };
        const double y_hi = xt + 45.0;
        return integrate_adaptive(inner, xt, y_hi, 1e-7, 0.0, 600,
                                  {xt + 0.5, xt + 2.0, xt + 6.0, xt + 15.0})
            .value;
    };

    QuadratureResult result = integrate_adaptive(outer, 0.0, 50.0, rel_tol, 0.0, 400,
                                                 {0.25, 1.0, 3.0, 8.0, 20.0});
    return hbar * c_light * geom.radius / (16.0 * pi * z * z * z) * result.value;
}

/// Ideal-metal proximity-force value -pi^3 hbar c R / (360 z^3).
inline double ideal_metal_force(const SpherePlateGeometry& geom, double z) {
    return -pi * pi * pi * hbar * c_light * geom.radius / (360.0 * z * z * z);
}

/// Pointwise Lifshitz force over a strictly increasing separation grid.
/// Points fan out to `threads` workers; output order follows the grid.
inline ForceCurve force_curve(const SpherePlateGeometry& geom, const PermittivityModel& eps1,
                              const PermittivityModel& eps2, const std::vector<double>& z_grid,
                              double rel_tol = 1e-5, unsigned threads = 0) {
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
        if (!(z_grid[i] > 0.0))
            throw std::domain_error("force_curve: z must be positive at index " +
                                    std::to_string(i));
        if (i + 1 < z_grid.size() && !(z_grid[i] < z_grid[i + 1]))
            throw std::invalid_argument("force_curve: grid must strictly increase at index " +
                                        std::to_string(i));
    }
    eps1.build_cache();
    eps2.build_cache();

    ForceCurve curve(z_grid.size());
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, std::max<std::size_t>(z_grid.size(), 1));

    std::vector<std::string> errors(threads);
    auto work = [&](unsigned t) {
        std::size_t i = t;
        try {
            for (; i < z_grid.size(); i += threads)
                curve[i] = {z_grid[i], casimir_force(geom, eps1, eps2, z_grid[i], rel_tol)};
        } catch (const std::exception& e) {
            errors[t] = "point " + std::to_string(i) + " (z = " + std::to_string(z_grid[i]) +
                        " m): " + e.what();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error("force_curve: " + e);
    return curve;
}

} // namespace casimir
