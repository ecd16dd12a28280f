#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/csv.hpp"
#include "casimir/warnings.hpp"

namespace casimir {

/// Discrete roughness height distribution of one surface: fractions v_k of
/// the area covered by height h_k. Heights strictly increase; fractions sum
/// to 1 within printing tolerance.
class TopographyHistogram {
public:
    struct Bin {
        double h;  // m
        double v;  // fraction
    };

    explicit TopographyHistogram(std::vector<Bin> bins) : bins_(std::move(bins)) {
        if (bins_.empty()) throw std::invalid_argument("TopographyHistogram: no bins");
        double sum = 0.0;
        for (std::size_t i = 0; i < bins_.size(); ++i) {
            if (bins_[i].h < 0.0)
                throw std::invalid_argument("TopographyHistogram: heights must be >= 0");
            if (i + 1 < bins_.size() && !(bins_[i].h < bins_[i + 1].h))
                throw std::invalid_argument("TopographyHistogram: heights must strictly increase");
            if (bins_[i].v < 0.0)
                throw std::invalid_argument("TopographyHistogram: fractions must be >= 0");
            sum += bins_[i].v;
        }
        // Printed tables carry per-bin rounding; tolerate up to 1e-3 total,
        // warn beyond 1e-4. Fractions are used as given: rescaling them
        // shifts the published zero levels by more than their quoted
        // precision.
        if (std::fabs(sum - 1.0) > 1e-3)
            throw std::invalid_argument("TopographyHistogram: fractions sum to " +
                                        std::to_string(sum) + ", expected 1 within 1e-3");
        if (std::fabs(sum - 1.0) > 1e-4)
            warn("TopographyHistogram: fractions sum to " + std::to_string(sum) +
                 "; using them as given");
    }

    /// CSV format: header `h_nm,v`, '#' comments.
    static TopographyHistogram from_csv(const std::string& path) {
        const CsvTable csv = read_csv(path);
        const int ch = csv.column("h_nm"), cv = csv.column("v");
        if (ch < 0 || cv < 0) throw std::runtime_error(path + ": expected header h_nm,v");
        std::vector<Bin> bins;
        bins.reserve(csv.rows.size());
        for (const auto& row : csv.rows) bins.push_back({row[ch] * nm, row[cv]});
        return TopographyHistogram(std::move(bins));
    }

    const std::vector<Bin>& bins() const { return bins_; }
    double max_height() const { return bins_.back().h; }

private:
    std::vector<Bin> bins_;
};

/// Zero roughness level H0 = sum h_k v_k (the level with zero mean deviation).
inline double zero_level(const TopographyHistogram& t) {
    double h0 = 0.0;
    for (const auto& b : t.bins()) h0 += b.h * b.v;
    return h0;
}

/// Variance of the stochastic roughness process:
/// delta_st = [sum (H0 - h_k)^2 v_k]^(1/2).
inline double stochastic_variance(const TopographyHistogram& t) {
    const double h0 = zero_level(t);
    double s = 0.0;
    for (const auto& b : t.bins()) s += (h0 - b.h) * (h0 - b.h) * b.v;
    return std::sqrt(s);
}

/// Roughness-corrected force in the additive approach:
///   F_corr(z) = sum_k sum_l v_k v_l F(z + H0_1 + H0_2 - h_k - h_l).
/// `base` is any force function of separation (typically the Lifshitz curve).
inline double additive_corrected_force(const std::function<double(double)>& base,
                                       const TopographyHistogram& t1,
                                       const TopographyHistogram& t2, double z) {
    const double h01 = zero_level(t1);
    const double h02 = zero_level(t2);
    double total = 0.0;
    for (std::size_t k = 0; k < t1.bins().size(); ++k) {
        for (std::size_t l = 0; l < t2.bins().size(); ++l) {
            const auto& bk = t1.bins()[k];
            const auto& bl = t2.bins()[l];
            const double zs = z + h01 + h02 - bk.h - bl.h;
            if (!(zs > 0.0))
                throw std::domain_error(
                    "additive_corrected_force: shifted separation <= 0 for bin pair (k=" +
                    std::to_string(k + 1) + ", l=" + std::to_string(l + 1) + ")");
            total += bk.v * bl.v * base(zs);
        }
    }
    return total;
}

/// Multiplicative (stochastic) roughness correction:
///   F_m(z) = F(z) { 1 + 6 [ (d1/z)^2 + (d2/z)^2 ] }.
inline double multiplicative_corrected_force(const std::function<double(double)>& base,
                                             double delta1, double delta2, double z) {
    if (!(z > 0.0)) throw std::domain_error("multiplicative_corrected_force: z must be positive");
    const double f = 1.0 + 6.0 * ((delta1 / z) * (delta1 / z) + (delta2 / z) * (delta2 / z));
    return base(z) * f;
}

inline double multiplicative_ratio(double delta1, double delta2, double z) {
    return 1.0 + 6.0 * ((delta1 / z) * (delta1 / z) + (delta2 / z) * (delta2 / z));
}

// Upper bound on the multiplicative ratio once diffraction-type and
// correlation effects are included, quoted at the shortest separation of the
// campaign. Informational only; never applied to forces.
inline constexpr double diffraction_correlation_gap = 0.0014;

struct RoughnessReportRow {
    double z;                  // m
    double ratio_additive;     // F_corr / F
    double ratio_multiplicative;
};

} // namespace casimir
