#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/optical_data.hpp"
#include "casimir/quadrature.hpp"

namespace casimir {

/// Free-carrier response parameters.
struct DrudeParams {
    double omega_p;  // plasma frequency, rad/s
    double gamma;    // relaxation parameter, rad/s

    DrudeParams(double omega_p, double gamma) : omega_p(omega_p), gamma(gamma) {
        if (!(omega_p > 0.0) || !(gamma > 0.0))
            throw std::invalid_argument("DrudeParams: omega_p and gamma must be positive");
    }
};

/// Doping-level description of a semiconductor.
struct CarrierParams {
    double n_carriers;    // m^-3
    double m_eff_ratio;   // optical effective mass / electron mass
    double resistivity;   // Ohm m

    CarrierParams(double n, double m_ratio, double rho)
        : n_carriers(n), m_eff_ratio(m_ratio), resistivity(rho) {
        if (!(n > 0.0) || !(m_ratio > 0.0) || !(rho > 0.0))
            throw std::invalid_argument("CarrierParams: all fields must be positive");
    }
};

/// Im eps(omega) of the Drude model: omega_p^2 gamma / [omega (omega^2 + gamma^2)].
inline double drude_im_eps(const DrudeParams& p, double omega) {
    if (!(omega > 0.0)) throw std::domain_error("drude_im_eps: omega must be positive");
    return p.omega_p * p.omega_p * p.gamma / (omega * (omega * omega + p.gamma * p.gamma));
}

/// Drude permittivity on the imaginary axis: 1 + omega_p^2 / [xi (xi + gamma)].
inline double drude_eps_imag_axis(const DrudeParams& p, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("drude_eps_imag_axis: xi must be positive");
    return 1.0 + p.omega_p * p.omega_p / (xi * (xi + p.gamma));
}

/// omega_p = e sqrt(n) / sqrt(eps0 m*).
inline double plasma_frequency(const CarrierParams& c) {
    return e_charge * std::sqrt(c.n_carriers / (eps0 * c.m_eff_ratio * m_electron));
}

/// gamma = eps0 rho omega_p^2.
inline double relaxation_parameter(const CarrierParams& c, double omega_p) {
    if (!(omega_p > 0.0)) throw std::domain_error("relaxation_parameter: omega_p must be positive");
    return eps0 * c.resistivity * omega_p * omega_p;
}

inline DrudeParams drude_from_carriers(const CarrierParams& c) {
    const double wp = plasma_frequency(c);
    return DrudeParams(wp, relaxation_parameter(c, wp));
}

/// Dispersion relation eps(i xi) = 1 + (2/pi) int_0^inf w Im eps(w) / (w^2 + xi^2) dw.
///
/// Im eps is taken from the Drude extrapolation below the table, from
/// log-log interpolation inside it, and from an A/w^3 closure (evaluated in
/// closed form) above it. Quadrature: adaptive on the split intervals with
/// relative tolerance `rel_tol`.
inline double kramers_kronig(const OpticalDataTable& table,
                             const std::optional<DrudeParams>& extrapolation, double xi,
                             double rel_tol = 1e-6) {
    if (!(xi > 0.0)) throw std::domain_error("kramers_kronig: xi must be positive");

    const double w_lo = table.omega_min();
    const double w_hi = table.omega_max();
    const double xi2 = xi * xi;

    // Tabulated region, integrated segment by segment (the integrand has a
    // kink at every sample under log-log interpolation).
    const auto& ws = table.omega();
    double mid = 0.0, mid_err = 0.0;
    for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
        double seg, err;
        detail::gk15([&](double w) { return w * table.interpolate(w) / (w * w + xi2); },
                     ws[i], ws[i + 1], seg, err);
        mid += seg;
        mid_err += err;
    }
    // Refine any segment whose estimated error is out of proportion.
    if (mid_err > 0.1 * rel_tol * std::fabs(mid) && mid != 0.0) {
        mid = integrate_adaptive(
                  [&](double w) { return w * table.interpolate(w) / (w * w + xi2); }, w_lo,
                  w_hi, 0.1 * rel_tol, 0.0, 20000,
                  std::vector<double>(ws.begin() + 1, ws.end() - 1))
                  .value;
    }

    // Closed-form high-frequency closure for Im eps = A / w^3:
    //   int_W^inf dw / (w^2 (w^2 + xi^2)) = (s - atan s) / (xi^3),  s = xi / W.
    // The difference is evaluated by series for small s; the naive
    // 1/W - (pi/2 - atan(W/xi))/xi form cancels catastrophically there.
    const double a_tail = table.high_frequency_amplitude();
    double high = 0.0;
    if (a_tail > 0.0) {
        const double s = xi / w_hi;
        double diff;  // s - atan(s)
        if (s < 0.1) {
            const double s2 = s * s;
            diff = s * s2 * (1.0 / 3.0 - s2 / 5.0 + s2 * s2 / 7.0 - s2 * s2 * s2 / 9.0);
        } else {
            diff = s - std::atan(s);
        }
        high = a_tail * diff / (xi2 * xi);
    }

    // Low-frequency region.
    double low = 0.0;
    if (extrapolation) {
        const DrudeParams& d = *extrapolation;
        const double g2 = d.gamma * d.gamma;
        const double num = d.omega_p * d.omega_p * d.gamma;
        low = integrate_adaptive(
                  [&](double w) { return num / ((w * w + g2) * (w * w + xi2)); }, 0.0, w_lo,
                  0.1 * rel_tol, 0.0, 4000,
                  {d.gamma, xi, 0.5 * d.gamma, 2.0 * d.gamma})
                  .value;
    } else {
        // Without an extrapolation the tail is dropped. Bound it by the
        // linear continuation Im eps(w) = Im(w_lo) w / w_lo (the generic
        // low-frequency behavior of a dielectric) and flag tables whose
        // bound is material. Metal-like tables always trip this.
        const double im_edge = table.im_eps().front();
        const double bound =
            2.0 / pi * im_edge / w_lo * (w_lo - xi * std::atan(w_lo / xi));
        const double covered = 1.0 + 2.0 / pi * (mid + high);
        if (bound > 1e-3 * covered)
            throw std::runtime_error(
                "kramers_kronig: uncovered low-frequency tail; supply a Drude extrapolation");
    }

    return 1.0 + 2.0 / pi * (low + mid + high);
}

/// Permittivity along the imaginary frequency axis. Models are immutable
/// after construction; build_cache() precomputes a dense grid so that the
/// Lifshitz integrand can interpolate instead of re-running the dispersion
/// integral.
class PermittivityModel {
public:
    enum class Kind { vacuum, ideal_metal, constant, drude, oscillator, tabulated };

    static PermittivityModel vacuum() { return PermittivityModel(Kind::vacuum); }
    static PermittivityModel ideal_metal() { return PermittivityModel(Kind::ideal_metal); }

    /// Frequency-independent permittivity (test ladders).
    static PermittivityModel constant(double eps) {
        PermittivityModel m(Kind::constant);
        m.eps_static_ = eps;
        return m;
    }

    static PermittivityModel drude(DrudeParams p) {
        PermittivityModel m(Kind::drude);
        m.drude_ = p;
        return m;
    }

    /// Single-oscillator analytic model eps(i xi) = 1 + (eps0 - 1)/(1 + (xi/omega0)^2).
    /// This is the documented dielectric-Si fallback (approximate: about 10%
    /// force error against full tabulated data).
    static PermittivityModel oscillator(double eps_static, double omega0) {
        if (!(eps_static > 1.0) || !(omega0 > 0.0))
            throw std::invalid_argument("oscillator: need eps_static > 1 and omega0 > 0");
        PermittivityModel m(Kind::oscillator);
        m.eps_static_ = eps_static;
        m.omega0_ = omega0;
        return m;
    }

    static PermittivityModel tabulated(OpticalDataTable table,
                                       std::optional<DrudeParams> extrapolation) {
        PermittivityModel m(Kind::tabulated);
        m.table_ = std::make_shared<OpticalDataTable>(std::move(table));
        m.drude_ = extrapolation;
        return m;
    }

    /// Composite model with a free-carrier term added on the imaginary axis
    /// (doped semiconductor from a dielectric base).
    PermittivityModel with_free_carriers(DrudeParams d) const {
        PermittivityModel m = *this;
        m.carriers_ = d;
        return m;
    }

    Kind kind() const { return kind_; }
    bool is_ideal_metal() const { return kind_ == Kind::ideal_metal; }
    const std::optional<DrudeParams>& free_carriers() const { return carriers_; }

    /// eps(i xi). Uses the cached grid when present (tabulated models).
    double operator()(double xi) const {
        if (!(xi > 0.0)) throw std::domain_error("PermittivityModel: xi must be positive");
        double eps = base_eval(xi);
        if (carriers_)
            eps += carriers_->omega_p * carriers_->omega_p / (xi * (xi + carriers_->gamma));
        return eps;
    }

    /// Precomputes eps(i xi) of the tabulated base on a log grid
    /// (`per_decade` points per decade over [xi_lo, xi_hi]) with monotone
    /// cubic interpolation in log xi. No-op for analytic kinds.
    void build_cache(double xi_lo = 1e11, double xi_hi = 1e18, int per_decade = 200) const {
        if (kind_ != Kind::tabulated || cache_) return;
        const int n = static_cast<int>(std::ceil(std::log10(xi_hi / xi_lo) * per_decade)) + 1;
        std::vector<double> lx(n), ly(n);
        const double step = std::log(xi_hi / xi_lo) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double xi = xi_lo * std::exp(i * step);
            lx[i] = std::log(xi);
            // Clamp keeps zero-absorption tables (eps = 1 exactly) finite.
            ly[i] = std::log(std::max(kramers_kronig(*table_, drude_, xi) - 1.0, 1e-300));
        }
        cache_ = std::make_shared<MonotoneCubic>(std::move(lx), std::move(ly));
        cache_lo_ = xi_lo;
        cache_hi_ = xi_hi;
    }

private:
    explicit PermittivityModel(Kind k) : kind_(k) {}

    double base_eval(double xi) const {
        switch (kind_) {
            case Kind::vacuum: return 1.0;
            case Kind::ideal_metal: return std::numeric_limits<double>::infinity();
            case Kind::constant: return eps_static_;
            case Kind::drude: return drude_eps_imag_axis(*drude_, xi);
            case Kind::oscillator:
                return 1.0 + (eps_static_ - 1.0) / (1.0 + (xi / omega0_) * (xi / omega0_));
            case Kind::tabulated: break;
        }
        if (cache_) {
            if (xi < cache_lo_) {
                // Below the cache the model either keeps growing like the
                // Drude term (metals) or saturates at its static value.
                const double edge = 1.0 + std::exp((*cache_)(std::log(cache_lo_)));
                if (drude_) {
                    const double g = drude_->gamma;
                    return 1.0 + (edge - 1.0) * (cache_lo_ * (cache_lo_ + g)) / (xi * (xi + g));
                }
                return edge;
            }
            if (xi > cache_hi_) {
                // eps - 1 falls off as 1/xi^2 at the top of the axis.
                const double edge = std::exp((*cache_)(std::log(cache_hi_)));
                return 1.0 + edge * (cache_hi_ * cache_hi_) / (xi * xi);
            }
            return 1.0 + std::exp((*cache_)(std::log(xi)));
        }
        return kramers_kronig(*table_, drude_, xi);
    }

    Kind kind_;
    double eps_static_ = 1.0;
    double omega0_ = 0.0;
    std::optional<DrudeParams> drude_;
    std::optional<DrudeParams> carriers_;
    std::shared_ptr<const OpticalDataTable> table_;
    mutable std::shared_ptr<const MonotoneCubic> cache_;
    mutable double cache_lo_ = 0.0, cache_hi_ = 0.0;
};

/// eps^(2)(i xi) of a doped semiconductor: dielectric base plus the Drude
/// term omega_p^2 / [xi (xi + gamma)].
inline double doped_si_eps(const PermittivityModel& base, const DrudeParams& d, double xi) {
    if (!(xi > 0.0)) throw std::domain_error("doped_si_eps: xi must be positive");
    return base(xi) + d.omega_p * d.omega_p / (xi * (xi + d.gamma));
}

} // namespace casimir
