#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

#include "casimir/electrostatic.hpp"
#include "casimir/fitting.hpp"

namespace casimir {

/// Conversion between raw acquisition channels and absolute separation:
///   z = z_piezo + S_def * m + z0.
struct SeparationModel {
    double m;                  // m per unit deflection signal
    double z0;                 // m, separation on contact
    double V0;                 // V, residual potential difference
    double force_calibration;  // N per unit deflection signal

    SeparationModel(double m, double z0, double V0, double force_calibration)
        : m(m), z0(z0), V0(V0), force_calibration(force_calibration) {
        if (!(m > 0.0) || !(z0 > 0.0))
            throw std::invalid_argument("SeparationModel: need m > 0 and z0 > 0");
    }
};

/// Calibration constant when none has been fitted: N per unit deflection
/// signal.
inline constexpr double default_force_calibration = 1.440e-9;

inline double reconstruct_separation(double z_piezo, double s_def, double m, double z0) {
    return z_piezo + s_def * m + z0;
}

inline double reconstruct_separation(double z_piezo, double s_def, const SeparationModel& model) {
    return reconstruct_separation(z_piezo, s_def, model.m, model.z0);
}

struct ParabolaFit {
    double V0;            // vertex, V
    double X;             // curvature, N/V^2
    double rms_residual;  // N
};

/// Least-squares fit of F = X (V - V0)^2 over a fixed-separation voltage
/// sweep. Quadratic in V, so the normal equations are solved directly and
/// the vertex is read off the coefficients.
inline ParabolaFit fit_voltage_parabola(const std::vector<std::pair<double, double>>& sweep) {
    if (sweep.size() < 3) throw std::invalid_argument("fit_voltage_parabola: need >= 3 samples");
    std::vector<double> v, f;
    for (const auto& [vi, fi] : sweep) {
        v.push_back(vi);
        f.push_back(fi);
    }
    const double vmin = *std::min_element(v.begin(), v.end());
    const double vmax = *std::max_element(v.begin(), v.end());
    if (!(vmax > vmin)) throw std::runtime_error("fit_voltage_parabola: all voltages equal");

    std::vector<double> coeff;
    try {
        coeff = fit_polynomial(v, f, 2);
    } catch (const std::exception&) {
        throw std::runtime_error("fit_voltage_parabola: degenerate design");
    }
    const double a2 = coeff[2];
    if (std::fabs(a2) < 1e-300) throw std::runtime_error("fit_voltage_parabola: no curvature");
    const double v0 = -coeff[1] / (2.0 * a2);

    double ss = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = f[i] - eval_polynomial(coeff, v[i]);
        ss += r * r;
    }
    return {v0, a2, std::sqrt(ss / v.size())};
}

/// Fits the contact separation z0: given curvature samples X(z_rel) with
/// z_rel measured from contact, finds the shift that matches the polynomial
/// basis X(z_rel + z0). Uniform weighting; 1-D golden-section search on the
/// sum of squares.
inline double fit_contact_separation(const std::vector<std::pair<double, double>>& x_samples,
                                     double R) {
    if (x_samples.size() < 8)
        throw std::invalid_argument("fit_contact_separation: need >= 8 samples");
    double zmin = x_samples.front().first, zmax = zmin;
    for (const auto& [z, x] : x_samples) {
        zmin = std::min(zmin, z);
        zmax = std::max(zmax, z);
    }
    if (!(zmax >= 2.0 * zmin))
        throw std::invalid_argument("fit_contact_separation: samples must span a factor >= 2 in z");

    auto sse = [&](double z0) {
        double s = 0.0;
        for (const auto& [z, x] : x_samples) {
            const double r = x - electrostatic_basis(R, z + z0);
            s += r * r;
        }
        return s;
    };

    // Leading-term initial guess from the smallest-z sample:
    // X ~ -pi eps0 R / (z + z0).
    const auto& [zs, xs] = *std::min_element(x_samples.begin(), x_samples.end());
    double guess = -pi * eps0 * R / xs - zs;
    if (!(guess > 0.0)) guess = 0.0;
    const double span = std::max(4.0 * (guess + zmin), 0.5 * zmin + guess + 100e-9);

    const double z0 = minimize_scalar(sse, std::max(0.0, guess - span), guess + span, 1e-12);

    // A flat objective means the shift is not identifiable from these data.
    const double probe = std::max(1e-10, 0.05 * (z0 + 1e-10));
    const double base = sse(z0);
    if (sse(z0 + probe) - base < 1e-12 * base && sse(std::max(0.0, z0 - probe)) - base < 1e-12 * base)
        throw std::runtime_error("fit_contact_separation: objective flat, z0 not identifiable");
    return z0;
}

/// Deflection coefficient m from contact positions at different voltages:
/// z_piezo_at_contact(V) = C - m * S_def(V), where `predicted_deflection`
/// maps the applied voltage to the deflection signal expected at contact.
/// Returns the slope in meters per unit signal with its standard error.
struct DeflectionFit {
    double m;
    double m_stderr;
};

inline DeflectionFit fit_deflection_coefficient(
    const std::vector<std::pair<double, double>>& contacts,
    const std::function<double(double)>& predicted_deflection) {
    if (contacts.size() < 3)
        throw std::invalid_argument("fit_deflection_coefficient: need >= 3 voltages");
    std::vector<double> s, zp;
    for (const auto& [v, z] : contacts) {
        s.push_back(predicted_deflection(v));
        zp.push_back(z);
    }
    LinearFit fit{};
    try {
        fit = fit_line(s, zp);
    } catch (const std::exception&) {
        throw std::runtime_error("fit_deflection_coefficient: predicted deflections collinear");
    }
    return {-fit.slope, fit.slope_stderr};
}

} // namespace casimir
