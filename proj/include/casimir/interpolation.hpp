#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace casimir {

/// Piecewise-linear interpolation on strictly increasing abscissae.
/// Out-of-range arguments are an error (callers decide how to extrapolate).
inline double interp_linear(std::span<const double> x, std::span<const double> y, double xq) {
    if (x.size() < 2 || x.size() != y.size())
        throw std::invalid_argument("interp_linear: need >= 2 matching samples");
    if (xq < x.front() || xq > x.back())
        throw std::out_of_range("interp_linear: query outside sample range");
    auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = (it == x.end()) ? x.size() - 2 : static_cast<std::size_t>(it - x.begin()) - 1;
    const double t = (xq - x[i]) / (x[i + 1] - x[i]);
    return y[i] + t * (y[i + 1] - y[i]);
}

/// Monotone cubic (Fritsch-Carlson) interpolant. Preserves monotonicity of
/// the data, which keeps cached permittivity curves free of overshoot.
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("MonotoneCubic: need >= 2 matching samples");
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (!(x_[i] < x_[i + 1]))
                throw std::invalid_argument("MonotoneCubic: abscissae must increase");

        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            d[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);

        m_.resize(n);
        m_[0] = d[0];
        m_[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m_[i] = 0.0;
            } else {
                const double w1 = 2.0 * (x_[i + 1] - x_[i]) + (x_[i] - x_[i - 1]);
                const double w2 = (x_[i + 1] - x_[i]) + 2.0 * (x_[i] - x_[i - 1]);
                m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // Clamp endpoint slopes (Fritsch-Carlson condition).
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double di = d[i == 0 ? 0 : n - 2];
            if (di == 0.0) m_[i] = 0.0;
            else if (m_[i] / di < 0.0) m_[i] = 0.0;
            else if (std::fabs(m_[i]) > 3.0 * std::fabs(di)) m_[i] = 3.0 * di;
        }
    }

    double operator()(double xq) const {
        if (xq <= x_.front()) return y_.front() + m_.front() * (xq - x_.front());
        if (xq >= x_.back()) return y_.back() + m_.back() * (xq - x_.back());
        auto it = std::upper_bound(x_.begin(), x_.end(), xq);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double t = (xq - x_[i]) / h;
        const double t2 = t * t, t3 = t2 * t;
        return y_[i] * (2 * t3 - 3 * t2 + 1) + h * m_[i] * (t3 - 2 * t2 + t) +
               y_[i + 1] * (-2 * t3 + 3 * t2) + h * m_[i + 1] * (t3 - t2);
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, m_;
};

} // namespace casimir
