// Shared measurement fixtures: the published sphere/plate topography
// histograms and the reference force/error summary used by the comparison
// tests and the acceptance suite.
#pragma once

#include <array>
#include <utility>
#include <vector>

#include "casimir/roughness.hpp"

namespace fixtures {

// Gold-coated sphere roughness histogram: height (nm), area fraction.
inline const std::vector<std::pair<double, double>> au_topography = {
    {0, 8e-5},      {1, 8.5e-4},   {2, 1.21e-3},  {3, 1.6e-3},   {4, 4.09e-3},
    {5, 4.77e-3},   {6, 4.71e-3},  {7, 5.62e-3},  {8, 1.111e-2}, {9, 1.671e-2},
    {10, 2.591e-2}, {11, 4.148e-2},{12, 6.052e-2},{13, 8.644e-2},{14, 8.165e-2},
    {15, 0.15265},  {16, 0.1262},  {17, 0.107},   {18, 9.802e-2},{19, 6.958e-2},
    {20, 4.98e-2},  {21, 2.58e-2}, {22, 1.288e-2},{23, 6.4e-3},  {24, 3.29e-3},
    {25, 1.11e-3}};

// Silicon plate roughness histogram: height (nm), area fraction.
inline const std::vector<std::pair<double, double>> si_topography = {
    {0.0, 2.0e-5}, {0.1, 8.1e-4}, {0.2, 8.84e-3}, {0.3, 4.27e-2}, {0.4, 0.10384},
    {0.5, 0.34379},{0.6, 0.3683}, {0.7, 9.9e-2},  {0.8, 3.05e-2}, {0.9, 2.13e-3},
    {1.0, 7.0e-5}};

inline casimir::TopographyHistogram histogram(
    const std::vector<std::pair<double, double>>& rows) {
    std::vector<casimir::TopographyHistogram::Bin> bins;
    bins.reserve(rows.size());
    for (const auto& [h_nm, v] : rows) bins.push_back({h_nm * 1e-9, v});
    return casimir::TopographyHistogram(std::move(bins));
}

// Reference comparison summary at selected separations:
// z (nm), mean measured force, theory for the conductive plate, theory for
// the dielectric plate, theory-minus-experiment differences, and the 95%/70%
// interval half-widths (all forces in pN).
struct SummaryRow {
    double z_nm;
    double F_expt;
    double F_cond;
    double F_diel;
    double diff_cond;
    double xi95;
    double diff_diel;
    double xi70;
};

inline const std::array<SummaryRow, 13> force_summary = {{
    {62.33, -380.0, -380.5, -374.4, -0.50, 15.2, 5.7, 7.6},
    {69.98, -280.9, -277.9, -272.9, 3.0, 10.4, 8.0, 5.2},
    {80.01, -196.4, -192.8, -188.9, 3.6, 7.1, 7.5, 3.55},
    {90.04, -140.4, -139.4, -136.3, 1.0, 5.4, 4.1, 2.7},
    {100.07, -106.2, -104.2, -101.7, 2.0, 4.5, 4.5, 2.25},
    {109.93, -80.30, -80.35, -78.23, -0.05, 4.1, 2.1, 2.05},
    {119.96, -62.90, -63.05, -61.26, -0.15, 3.9, 1.64, 1.95},
    {140.02, -40.98, -40.96, -39.64, 0.02, 3.8, 1.35, 1.9},
    {160.08, -26.93, -28.14, -27.11, -1.2, 3.7, -0.19, 1.8},
    {180.14, -19.70, -20.18, -19.36, -0.48, 3.7, 0.34, 1.8},
    {200.03, -14.71, -15.02, -14.35, -0.31, 3.7, 0.36, 1.8},
    {250.18, -7.132, -7.968, -7.539, -0.84, 3.7, -0.41, 1.8},
    {299.99, -5.221, -4.756, -4.455, 0.46, 3.7, 0.76, 1.8},
}};

// Reference relative errors (%) at the same separations: experimental
// random / systematic / total, then theoretical delta0 / delta3 / total.
struct ErrorRow {
    double z_nm;
    double rand_pct;
    double syst_pct;
    double tot_pct;
    double delta0_pct;
    double delta3_pct;
    double delta_tot_pct;
};

inline const std::array<ErrorRow, 13> error_summary = {{
    {62.33, 0.78, 0.31, 0.87, 0.55, 3.8, 3.8},
    {69.98, 1.1, 0.42, 1.2, 0.56, 3.4, 3.4},
    {80.01, 1.6, 0.60, 1.7, 0.56, 2.9, 2.9},
    {90.04, 2.1, 0.84, 2.4, 0.56, 2.7, 2.7},
    {100.07, 2.9, 1.1, 3.1, 0.56, 2.4, 2.4},
    {109.93, 3.7, 1.4, 4.1, 0.56, 2.2, 2.2},
    {119.96, 4.7, 1.8, 5.3, 0.56, 2.0, 2.0},
    {140.02, 7.3, 2.8, 8.1, 0.57, 1.8, 1.9},
    {160.08, 10, 4.1, 12, 0.58, 1.5, 1.7},
    {180.14, 15, 5.7, 17, 0.58, 1.4, 1.6},
    {200.03, 20, 7.7, 22, 0.59, 1.2, 1.4},
    {250.18, 42, 16, 47, 0.61, 1.0, 1.3},
    {299.99, 57, 22, 64, 0.64, 0.9, 1.2},
}};

// Campaign-level reference constants.
inline constexpr double sphere_radius_m = 101.3e-6;
inline constexpr double sphere_radius_err_m = 0.15e-6;
inline constexpr double separation_err_m = 0.8e-9;
inline constexpr double optical_data_rel_err = 0.005;
inline const std::vector<double> systematic_components_pN = {0.82, 0.55, 0.31, 0.12};

} // namespace fixtures
