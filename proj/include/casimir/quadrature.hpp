#pragma once

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace casimir {

/// Thrown when an adaptive integral does not reach the requested tolerance
/// within its panel budget. Carries the best estimate and its error bound.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what + " (estimate " + std::to_string(estimate) +
                             ", error bound " + std::to_string(error_bound) + ")"),
          estimate(estimate), error_bound(error_bound) {}

    double estimate;
    double error_bound;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1].
inline constexpr double gk_nodes[8] = {
    0.000000000000000000000000000000000e+00,
    2.077849550078984676006894037732449e-01,
    4.058451513773971669066064120769615e-01,
    5.860872354676911302941448382587296e-01,
    7.415311855993944398638647732807884e-01,
    8.648644233597690727897127886409262e-01,
    9.491079123427585245261896840478513e-01,
    9.914553711208126392068546975263285e-01};

inline constexpr double kronrod_w[8] = {
    2.094821410847278280129991748917143e-01,
    2.044329400752988924141619992346491e-01,
    1.903505780647854099132564024210137e-01,
    1.690047266392679028265834265985503e-01,
    1.406532597155259187451895905102379e-01,
    1.047900103222501838398763225415180e-01,
    6.309209262997855329070066318920429e-02,
    2.293532201052922496373200805896959e-02};

inline constexpr double gauss_w[4] = {
    4.179591836734693877551020408163265e-01,
    3.818300505051189449503697754889751e-01,
    2.797053914892766679014677714237796e-01,
    1.294849661688696932706114326790820e-01};

template <typename F>
void gk15(const F& f, double a, double b, double& integral, double& error) {
    const double h = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);

    double fc = f(mid);
    double gauss = fc * gauss_w[0];
    double kron = fc * kronrod_w[0];
    for (int j = 1; j < 8; ++j) {
        const double dx = h * gk_nodes[j];
        const double fsum = f(mid - dx) + f(mid + dx);
        kron += fsum * kronrod_w[j];
        if (j % 2 == 0) gauss += fsum * gauss_w[j / 2];
    }
    integral = kron * h;
    // Standard QUADPACK-style sharpened error estimate.
    const double diff = std::fabs((kron - gauss) * h);
    error = diff > 0 ? std::pow(200.0 * diff, 1.5) : 0.0;
    if (error > diff) error = diff;
    if (error == 0.0) error = 1e-300;
}

struct Panel {
    double a, b, integral, error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

} // namespace detail

struct QuadratureResult {
    double value;
    double error_bound;
    int panels;
};

/// Adaptive Gauss-Kronrod integration of f over [a, b]. `breakpoints` seeds
/// the initial subdivision (values outside (a, b) are ignored); the worst
/// panel is split until the summed error estimate meets
/// max(rel_tol * |integral|, abs_tol).
template <typename F>
QuadratureResult integrate_adaptive(const F& f, double a, double b,
                                    double rel_tol = 1e-8, double abs_tol = 0.0,
                                    int max_panels = 2000,
                                    const std::vector<double>& breakpoints = {}) {
    std::vector<double> edges{a};
    for (double x : breakpoints)
        if (x > a && x < b) edges.push_back(x);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());

    std::priority_queue<detail::Panel> queue;
    double total = 0.0, total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        detail::Panel p{edges[i], edges[i + 1], 0.0, 0.0};
        detail::gk15(f, p.a, p.b, p.integral, p.error);
        total += p.integral;
        total_err += p.error;
        queue.push(p);
    }

    int n_panels = static_cast<int>(queue.size());
    while (total_err > std::max(rel_tol * std::fabs(total), abs_tol)) {
        if (n_panels >= max_panels)
            throw QuadratureError("adaptive quadrature did not converge", total, total_err);
        detail::Panel worst = queue.top();
        queue.pop();
        total -= worst.integral;
        total_err -= worst.error;
        const double mid = 0.5 * (worst.a + worst.b);
        for (auto [lo, hi] : {std::pair{worst.a, mid}, std::pair{mid, worst.b}}) {
            detail::Panel p{lo, hi, 0.0, 0.0};
            detail::gk15(f, p.a, p.b, p.integral, p.error);
            total += p.integral;
            total_err += p.error;
            queue.push(p);
        }
        ++n_panels;
    }
    return {total, total_err, n_panels};
}

} // namespace casimir
