#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/csv.hpp"

namespace casimir {

/// Tabulated imaginary part of a dielectric function on the real frequency
/// axis: ordered samples (omega [rad/s], Im eps >= 0). Built either directly
/// or from handbook-style (omega_eV, n, kappa) files via Im eps = 2 n kappa.
class OpticalDataTable {
public:
    OpticalDataTable(std::vector<double> omega, std::vector<double> im_eps)
        : omega_(std::move(omega)), im_(std::move(im_eps)) {
        if (omega_.size() < 2 || omega_.size() != im_.size())
            throw std::invalid_argument("OpticalDataTable: need >= 2 matching samples");
        if (omega_.front() <= 0.0)
            throw std::invalid_argument("OpticalDataTable: omega must be positive");
        for (std::size_t i = 0; i < omega_.size(); ++i) {
            if (i + 1 < omega_.size() && !(omega_[i] < omega_[i + 1]))
                throw std::invalid_argument("OpticalDataTable: omega must strictly increase");
            if (im_[i] < 0.0)
                throw std::invalid_argument("OpticalDataTable: Im eps must be >= 0");
        }
    }

    /// CSV ingestion: header `omega_eV,n,kappa`, '#' comments.
    static OpticalDataTable from_nk_csv(const std::string& path) {
        const CsvTable csv = read_csv(path);
        const int cw = csv.column("omega_eV"), cn = csv.column("n"), ck = csv.column("kappa");
        if (cw < 0 || cn < 0 || ck < 0)
            throw std::runtime_error(path + ": expected header omega_eV,n,kappa");
        std::vector<double> w, im;
        w.reserve(csv.rows.size());
        im.reserve(csv.rows.size());
        for (const auto& row : csv.rows) {
            w.push_back(row[cw] * eV_to_rad_s);
            im.push_back(2.0 * row[cn] * row[ck]);
        }
        return OpticalDataTable(std::move(w), std::move(im));
    }

    double omega_min() const { return omega_.front(); }
    double omega_max() const { return omega_.back(); }
    std::size_t size() const { return omega_.size(); }
    const std::vector<double>& omega() const { return omega_; }
    const std::vector<double>& im_eps() const { return im_; }

    /// Im eps between samples: linear in (log omega, log Im eps) when both
    /// endpoints are positive (optical data is smooth on log axes), linear
    /// in omega otherwise.
    double interpolate(double w) const {
        if (w < omega_.front() || w > omega_.back())
            throw std::out_of_range("OpticalDataTable: frequency outside table");
        auto it = std::upper_bound(omega_.begin(), omega_.end(), w);
        std::size_t i = (it == omega_.end()) ? omega_.size() - 2
                                             : static_cast<std::size_t>(it - omega_.begin()) - 1;
        const double w0 = omega_[i], w1 = omega_[i + 1];
        const double y0 = im_[i], y1 = im_[i + 1];
        if (y0 > 0.0 && y1 > 0.0) {
            const double t = std::log(w / w0) / std::log(w1 / w0);
            return y0 * std::exp(t * std::log(y1 / y0));
        }
        const double t = (w - w0) / (w1 - w0);
        return y0 + t * (y1 - y0);
    }

    /// Amplitude A of the high-frequency closure Im eps ~ A / omega^3,
    /// fitted in log space over the last decade of samples. Returns 0 for
    /// data that vanishes at the top of the table.
    double high_frequency_amplitude() const {
        const double w_lo = omega_.back() / 10.0;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < omega_.size(); ++i) {
            if (omega_[i] >= w_lo && im_[i] > 0.0) {
                sum += std::log(im_[i]) + 3.0 * std::log(omega_[i]);
                ++count;
            }
        }
        return count == 0 ? 0.0 : std::exp(sum / static_cast<double>(count));
    }

private:
    std::vector<double> omega_;
    std::vector<double> im_;
};

} // namespace casimir
