#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace casimir {

/// Solves the dense system A x = b in place by Gaussian elimination with
/// partial pivoting. Sized for the small normal-equation systems used by
/// the calibration fits.
inline std::vector<double> solve_dense(std::vector<std::vector<double>> a,
                                       std::vector<double> b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r][col]) > std::fabs(a[pivot][col])) pivot = r;
        if (std::fabs(a[pivot][col]) < 1e-300)
            throw std::runtime_error("solve_dense: singular system");
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
        x[i] = s / a[i][i];
    }
    return x;
}

/// Unweighted least-squares polynomial fit y = sum_k coeff[k] x^k,
/// k = 0..degree. Returns the coefficients (degree + 1 of them).
inline std::vector<double> fit_polynomial(std::span<const double> x,
                                          std::span<const double> y, int degree) {
    if (degree < 0) throw std::invalid_argument("fit_polynomial: negative degree");
    const std::size_t m = static_cast<std::size_t>(degree) + 1;
    if (x.size() != y.size() || x.size() < m)
        throw std::invalid_argument("fit_polynomial: need >= degree+1 samples");

    std::vector<std::vector<double>> ata(m, std::vector<double>(m, 0.0));
    std::vector<double> atb(m, 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> basis(m);
        basis[0] = 1.0;
        for (std::size_t k = 1; k < m; ++k) basis[k] = basis[k - 1] * x[i];
        for (std::size_t r = 0; r < m; ++r) {
            atb[r] += basis[r] * y[i];
            for (std::size_t c = 0; c <= r; ++c) ata[r][c] += basis[r] * basis[c];
        }
    }
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = r + 1; c < m; ++c) ata[r][c] = ata[c][r];
    return solve_dense(std::move(ata), std::move(atb));
}

inline double eval_polynomial(std::span<const double> coeff, double x) {
    double v = 0.0;
    for (std::size_t k = coeff.size(); k-- > 0;) v = v * x + coeff[k];
    return v;
}

/// Golden-section minimization of a 1-D objective on [a, b].
inline double minimize_scalar(const std::function<double(double)>& f, double a, double b,
                              double x_tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > x_tol) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

struct LinearFit {
    double intercept;
    double slope;
    double slope_stderr;
    double rms_residual;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw std::invalid_argument("fit_line: need >= 2 samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx < 1e-300) throw std::runtime_error("fit_line: degenerate abscissae");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - intercept - slope * x[i];
        ss += r * r;
    }
    const double rms = std::sqrt(ss / n);
    const double se = n > 2 ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    return {intercept, slope, se, rms};
}

} // namespace casimir
