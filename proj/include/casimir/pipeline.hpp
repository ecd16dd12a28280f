#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "casimir/calibration.hpp"
#include "casimir/constants.hpp"
#include "casimir/csv.hpp"
#include "casimir/dielectric.hpp"
#include "casimir/interpolation.hpp"
#include "casimir/lifshitz.hpp"
#include "casimir/roughness.hpp"
#include "casimir/stats.hpp"

namespace casimir {

// ---------------------------------------------------------------------------
// Run configuration
// ---------------------------------------------------------------------------

struct MaterialSpec {
    std::string kind;  // vacuum | ideal_metal | constant | drude | oscillator | tabulated
    double eps_static = 0.0;
    double omega0 = 0.0;            // rad/s, oscillator
    std::optional<DrudeParams> drude;     // drude kind or tabulated extrapolation
    std::optional<CarrierParams> carriers;
    std::string table_path;

    PermittivityModel build() const {
        PermittivityModel m = [&]() {
            if (kind == "vacuum") return PermittivityModel::vacuum();
            if (kind == "ideal_metal") return PermittivityModel::ideal_metal();
            if (kind == "constant") return PermittivityModel::constant(eps_static);
            if (kind == "drude") {
                if (!drude) throw std::runtime_error("material kind 'drude' needs drude params");
                return PermittivityModel::drude(*drude);
            }
            if (kind == "oscillator") return PermittivityModel::oscillator(eps_static, omega0);
            if (kind == "tabulated") {
                auto table = OpticalDataTable::from_nk_csv(table_path);
                return PermittivityModel::tabulated(std::move(table), drude);
            }
            throw std::runtime_error("unknown material kind '" + kind + "'");
        }();
        if (carriers) m = m.with_free_carriers(drude_from_carriers(*carriers));
        return m;
    }
};

struct GridSpec {
    double z_min = 62.33 * nm;
    double z_max = 349.97 * nm;
    int points = 1693;

    std::vector<double> make() const {
        if (!(z_min > 0.0) || !(z_max > z_min) || points < 1)
            throw std::runtime_error("grid: need 0 < z_min < z_max and points >= 1");
        std::vector<double> z(points);
        if (points == 1) {
            z[0] = z_min;
            return z;
        }
        const double step = (z_max - z_min) / (points - 1);
        for (int i = 0; i < points; ++i) z[i] = z_min + i * step;
        return z;
    }
};

struct RunConfig {
    SpherePlateGeometry geometry{101.3e-6, 0.15e-6};
    double separation_uncertainty = 0.8 * nm;
    double beta = 0.95;
    bool paper_compat = true;
    bool conservative_errors = true;
    double optical_data_relative_error = 0.005;
    std::vector<double> systematic_errors;  // N
    int smoothing_window = 30;

    std::map<std::string, MaterialSpec> materials;
    std::string sphere_material;
    std::string plate_material;               // designated "experimental" material
    std::vector<std::string> plate_variants;  // additional theory variants

    std::string sphere_histogram_path;
    std::string plate_histogram_path;

    GridSpec grid;
    std::vector<std::string> campaign_sets;  // one CSV per measurement set
    std::string campaign_matrix;             // or a single matrix file

    const MaterialSpec& material(const std::string& name) const {
        auto it = materials.find(name);
        if (it == materials.end())
            throw std::runtime_error("config references unknown material '" + name + "'");
        return it->second;
    }
};

namespace detail {

inline std::string resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_absolute()) return path.string();
    return (base / path).string();
}

inline DrudeParams parse_drude(const nlohmann::json& j) {
    if (j.contains("omega_p_eV"))
        return DrudeParams(j.at("omega_p_eV").get<double>() * eV_to_rad_s,
                           j.at("gamma_eV").get<double>() * eV_to_rad_s);
    return DrudeParams(j.at("omega_p_rad_s").get<double>(), j.at("gamma_rad_s").get<double>());
}

inline CarrierParams parse_carriers(const nlohmann::json& j) {
    const double n = j.contains("density_cm3") ? j.at("density_cm3").get<double>() * 1e6
                                               : j.at("density_m3").get<double>();
    const double rho = j.contains("resistivity_ohm_cm")
                           ? j.at("resistivity_ohm_cm").get<double>() * 1e-2
                           : j.at("resistivity_ohm_m").get<double>();
    return CarrierParams(n, j.at("effective_mass_ratio").get<double>(), rho);
}

} // namespace detail

/// Parses the canonical run-configuration JSON. Relative file paths resolve
/// against the config file's directory. Grid limits outside [50, 400] nm are
/// rejected unless `allow_grid_outside` is set in the file.
inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("config parse error: ") + e.what());
    }
    const std::filesystem::path base = std::filesystem::path(path).parent_path();

    RunConfig cfg;
    if (j.contains("geometry")) {
        const auto& g = j.at("geometry");
        cfg.geometry = SpherePlateGeometry(g.at("radius_um").get<double>() * 1e-6,
                                           g.value("radius_uncertainty_um", 0.0) * 1e-6);
    }
    cfg.separation_uncertainty = j.value("separation_uncertainty_nm", 0.8) * nm;
    cfg.beta = j.value("beta", 0.95);
    cfg.paper_compat = j.value("paper_compat", true);
    cfg.conservative_errors = j.value("conservative_errors", true);
    cfg.optical_data_relative_error = j.value("optical_data_relative_error", 0.005);
    cfg.smoothing_window = j.value("smoothing_window", 30);
    if (j.contains("systematic_errors_pN"))
        for (double v : j.at("systematic_errors_pN")) cfg.systematic_errors.push_back(v * pN);

    if (j.contains("materials")) {
        for (const auto& [name, m] : j.at("materials").items()) {
            MaterialSpec spec;
            spec.kind = m.at("kind").get<std::string>();
            spec.eps_static = m.value("eps_static", 0.0);
            spec.omega0 = m.value("omega0_rad_s", 0.0);
            if (m.contains("drude")) spec.drude = detail::parse_drude(m.at("drude"));
            if (m.contains("carriers")) spec.carriers = detail::parse_carriers(m.at("carriers"));
            if (m.contains("table"))
                spec.table_path = detail::resolve_path(base, m.at("table").get<std::string>());
            cfg.materials.emplace(name, std::move(spec));
        }
    }
    cfg.sphere_material = j.value("sphere_material", "");
    cfg.plate_material = j.value("plate_material", "");
    if (j.contains("plate_variants"))
        for (const auto& v : j.at("plate_variants")) cfg.plate_variants.push_back(v);

    if (j.contains("roughness")) {
        const auto& r = j.at("roughness");
        if (r.contains("sphere_histogram"))
            cfg.sphere_histogram_path =
                detail::resolve_path(base, r.at("sphere_histogram").get<std::string>());
        if (r.contains("plate_histogram"))
            cfg.plate_histogram_path =
                detail::resolve_path(base, r.at("plate_histogram").get<std::string>());
    }

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        cfg.grid.z_min = g.at("z_min_nm").get<double>() * nm;
        cfg.grid.z_max = g.at("z_max_nm").get<double>() * nm;
        cfg.grid.points = g.at("points").get<int>();
        const bool allow = j.value("allow_grid_outside", false);
        if (!allow && (cfg.grid.z_min < 50.0 * nm || cfg.grid.z_max > 400.0 * nm))
            throw std::runtime_error(
                "config grid outside [50, 400] nm; set allow_grid_outside to override");
    }

    if (j.contains("campaign")) {
        const auto& c = j.at("campaign");
        if (c.contains("sets"))
            for (const auto& s : c.at("sets"))
                cfg.campaign_sets.push_back(detail::resolve_path(base, s.get<std::string>()));
        if (c.contains("matrix"))
            cfg.campaign_matrix = detail::resolve_path(base, c.at("matrix").get<std::string>());
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// Separation model serialization
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json separation_model_to_json(const SeparationModel& m) {
    return {{"m_nm_per_unit", m.m / nm},
            {"z0_nm", m.z0 / nm},
            {"V0_volt", m.V0},
            {"force_calibration_nN_per_unit", m.force_calibration / 1e-9}};
}

inline SeparationModel separation_model_from_json(const nlohmann::json& j) {
    return SeparationModel(j.at("m_nm_per_unit").get<double>() * nm,
                           j.at("z0_nm").get<double>() * nm, j.at("V0_volt").get<double>(),
                           j.value("force_calibration_nN_per_unit",
                                   default_force_calibration / 1e-9) *
                               1e-9);
}

// ---------------------------------------------------------------------------
// Theory curves
// ---------------------------------------------------------------------------

/// Lifshitz force with the additive roughness correction, evaluated through
/// a dense cached base curve. The base is computed once on a log grid wide
/// enough to cover every shifted separation of the double sum, then
/// interpolated (monotone cubic in log-log); the correction reuses it for
/// all grid points.
class TheoryModel {
public:
    TheoryModel(SpherePlateGeometry geom, PermittivityModel sphere, PermittivityModel plate,
                TopographyHistogram sphere_topo, TopographyHistogram plate_topo)
        : geom_(geom), sphere_(std::move(sphere)), plate_(std::move(plate)),
          topo1_(std::move(sphere_topo)), topo2_(std::move(plate_topo)) {}

    /// Prepares the cached base over [z_min, z_max] (outer separations of
    /// the target grid).
    void prepare(double z_min, double z_max, double rel_tol = 1e-6, unsigned threads = 0) {
        const double shift_up = zero_level(topo1_) + zero_level(topo2_);
        const double shift_dn = shift_up - topo1_.max_height() - topo2_.max_height();
        const double lo = (z_min + std::min(shift_dn, 0.0)) * 0.999;
        const double hi = (z_max + std::max(shift_up, 0.0)) * 1.001;
        if (!(lo > 0.0))
            throw std::runtime_error("TheoryModel: roughness shifts reach zero separation");

        const int per_decade = 80;
        const int n =
            std::max(8, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
        std::vector<double> grid(n);
        const double step = std::log(hi / lo) / (n - 1);
        for (int i = 0; i < n; ++i) grid[i] = lo * std::exp(i * step);

        const ForceCurve curve = force_curve(geom_, sphere_, plate_, grid, rel_tol, threads);
        std::vector<double> lx(n), ly(n);
        for (int i = 0; i < n; ++i) {
            if (!(curve[i].F < 0.0))
                throw std::runtime_error("TheoryModel: expected attractive force");
            lx[i] = std::log(curve[i].z);
            ly[i] = std::log(-curve[i].F);
        }
        base_ = MonotoneCubic(std::move(lx), std::move(ly));
    }

    double base_force(double z) const {
        if (base_.empty()) throw std::logic_error("TheoryModel: prepare() not called");
        return -std::exp(base_(std::log(z)));
    }

    double corrected_force(double z) const {
        return additive_corrected_force([this](double zz) { return base_force(zz); }, topo1_,
                                        topo2_, z);
    }

    RoughnessReportRow report_row(double z) const {
        const double base = base_force(z);
        return {z, corrected_force(z) / base,
                multiplicative_ratio(stochastic_variance(topo1_), stochastic_variance(topo2_), z)};
    }

    const TopographyHistogram& sphere_topography() const { return topo1_; }
    const TopographyHistogram& plate_topography() const { return topo2_; }

private:
    SpherePlateGeometry geom_;
    PermittivityModel sphere_;
    PermittivityModel plate_;
    TopographyHistogram topo1_;
    TopographyHistogram topo2_;
    MonotoneCubic base_;
};

// ---------------------------------------------------------------------------
// Campaign I/O and synthesis
// ---------------------------------------------------------------------------

/// Loads one measurement set per CSV (header z_nm,F_pN).
inline RawCurve load_force_csv(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const int cz = csv.column("z_nm"), cf = csv.column("F_pN");
    if (cz < 0 || cf < 0) throw std::runtime_error(path + ": expected header z_nm,F_pN");
    RawCurve out;
    for (const auto& row : csv.rows) {
        out.z.push_back(row[cz] * nm);
        out.F.push_back(row[cf] * pN);
    }
    return out;
}

/// Loads a whole campaign from a matrix CSV: header z_nm,set1,set2,...
inline ForceCurveSet load_campaign_matrix(const std::string& path) {
    const CsvTable csv = read_csv(path);
    const int cz = csv.column("z_nm");
    if (cz != 0 || csv.header.size() < 3)
        throw std::runtime_error(path + ": expected header z_nm,set1,set2,...");
    ForceCurveSet set;
    set.F.resize(csv.header.size() - 1);
    for (const auto& row : csv.rows) {
        set.z.push_back(row[0] * nm);
        for (std::size_t j = 1; j < row.size(); ++j) set.F[j - 1].push_back(row[j] * pN);
    }
    set.validate();
    return set;
}

inline ForceCurveSet load_campaign(const RunConfig& cfg) {
    if (!cfg.campaign_matrix.empty()) return load_campaign_matrix(cfg.campaign_matrix);
    if (cfg.campaign_sets.empty()) throw std::runtime_error("config: no campaign data");
    std::vector<RawCurve> curves;
    curves.reserve(cfg.campaign_sets.size());
    for (const auto& p : cfg.campaign_sets) curves.push_back(load_force_csv(p));
    return align_to_grid(curves, curves.front().z);
}

/// Deterministic synthetic campaign: n_sets copies of `truth` with iid
/// Gaussian noise of standard deviation sigma.
inline ForceCurveSet synth_campaign(const std::vector<double>& grid,
                                    const std::vector<double>& truth, std::size_t n_sets,
                                    double sigma, std::uint64_t seed) {
    if (grid.size() != truth.size())
        throw std::invalid_argument("synth_campaign: grid/truth length mismatch");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    ForceCurveSet set;
    set.z = grid;
    set.F.resize(n_sets, std::vector<double>(grid.size()));
    for (auto& row : set.F)
        for (std::size_t i = 0; i < grid.size(); ++i) row[i] = truth[i] + noise(rng);
    return set;
}

// ---------------------------------------------------------------------------
// Comparison pipeline
// ---------------------------------------------------------------------------

struct ExperimentalErrors {
    std::vector<double> mean;        // N
    std::vector<double> s_mean;      // N, per z
    std::vector<double> s_smoothed;  // N, per z
    double delta_rand_abs;           // N, from the grid-median smoothed variance
    double delta_syst_abs;           // N
    std::vector<double> total_abs;   // N, per z
    std::vector<OutlierVerdict> outliers;
};

/// Runs the experimental error machinery on a campaign.
inline ExperimentalErrors experimental_errors(const ForceCurveSet& set, const RunConfig& cfg) {
    ExperimentalErrors out;
    out.mean = mean_force(set);
    if (set.sets() >= 20) {
        out.outliers = outlier_scan(set, 0.90);
    } else {
        warn("experimental_errors: outlier critical values need >= 20 sets; scan skipped");
    }
    out.s_mean = variance_of_mean(set);
    out.s_smoothed = smooth_variance(out.s_mean, cfg.smoothing_window);

    std::vector<double> sorted = out.s_smoothed;
    std::sort(sorted.begin(), sorted.end());
    const double s_typical = sorted[sorted.size() / 2];
    out.delta_rand_abs =
        random_error(s_typical, set.sets(), cfg.beta, {}, cfg.paper_compat).absolute;
    out.delta_syst_abs =
        cfg.systematic_errors.empty() ? 0.0 : combine_systematic(cfg.systematic_errors, cfg.beta);

    const auto policy =
        cfg.conservative_errors ? TotalErrorPolicy::conservative : TotalErrorPolicy::standard;
    out.total_abs.reserve(set.points());
    for (std::size_t i = 0; i < set.points(); ++i) {
        const double rand_i =
            random_error(out.s_smoothed[i], set.sets(), cfg.beta, {}, cfg.paper_compat).absolute;
        out.total_abs.push_back(
            total_experimental_error(rand_i, out.delta_syst_abs, out.s_smoothed[i], cfg.beta,
                                     policy));
    }
    return out;
}

struct VariantComparison {
    std::string name;
    std::vector<double> F_theor;  // roughness-corrected, N
    std::vector<double> diff;     // theor - mean expt, N
    std::vector<ConfidenceBand> bands;
    BandConformity conformity;
    bool accepted_95 = false;
    bool accepted_70 = false;
};

struct CompareResult {
    std::vector<double> z;
    ExperimentalErrors expt;
    std::vector<VariantComparison> variants;  // [0] is the designated material
    int exit_code = 0;                        // 0 accept, 2 a variant rejected at 70%
};

/// Full comparison of one or more theory variants against a campaign:
/// experimental errors, theoretical error budget, confidence bands, and the
/// per-variant conformity verdicts. A variant is accepted at a level when
/// the fraction of points inside that band meets the level's own
/// requirement (95% inside the 95% band, 70% inside the 70% band).
inline CompareResult compare_campaign(const ForceCurveSet& campaign,
                                      const std::vector<std::pair<std::string, TheoryModel*>>& models,
                                      const RunConfig& cfg) {
    CompareResult result;
    result.z = campaign.z;
    result.expt = experimental_errors(campaign, cfg);

    for (const auto& [name, model] : models) {
        VariantComparison vc;
        vc.name = name;
        vc.F_theor.reserve(campaign.points());
        vc.diff.reserve(campaign.points());
        vc.bands.reserve(campaign.points());
        for (std::size_t i = 0; i < campaign.points(); ++i) {
            const double f = model->corrected_force(campaign.z[i]);
            vc.F_theor.push_back(f);
            vc.diff.push_back(f - result.expt.mean[i]);
            const auto budget = theory_error_budget(
                campaign.z[i], cfg.geometry.radius, cfg.geometry.radius_uncertainty,
                cfg.separation_uncertainty, cfg.optical_data_relative_error);
            vc.bands.push_back(
                confidence_band(budget.delta_total * std::fabs(f), result.expt.total_abs[i]));
        }
        vc.conformity = band_conformity(vc.diff, vc.bands);
        vc.accepted_95 = vc.conformity.fraction_inside_95 >= 0.95;
        vc.accepted_70 = vc.conformity.fraction_inside_70 >= 0.70;
        result.variants.push_back(std::move(vc));
    }

    for (const auto& vc : result.variants)
        if (!vc.accepted_70) result.exit_code = 2;
    return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline std::string permittivity_csv(const PermittivityModel& model, double xi_lo, double xi_hi,
                                    int per_decade) {
    std::string out = "xi_rad_s,eps\n";
    const int n = static_cast<int>(std::ceil(std::log10(xi_hi / xi_lo) * per_decade)) + 1;
    const double step = std::log(xi_hi / xi_lo) / (n - 1);
    char buf[80];
    for (int i = 0; i < n; ++i) {
        const double xi = xi_lo * std::exp(i * step);
        std::snprintf(buf, sizeof buf, "%.8e,%.8e\n", xi, model(xi));
        out += buf;
    }
    return out;
}

inline std::string force_csv(const ForceCurve& curve) {
    std::string out = "z_nm,F_pN\n";
    char buf[80];
    for (const auto& p : curve) {
        std::snprintf(buf, sizeof buf, "%.4f,%s\n", p.z / nm, format_sig(p.F / pN, 4).c_str());
        out += buf;
    }
    return out;
}

inline std::string roughness_report_csv(const TheoryModel& model,
                                        const std::vector<double>& grid) {
    std::string out;
    if (!grid.empty()) {
        const auto first = model.report_row(grid.front());
        char head[160];
        std::snprintf(head, sizeof head,
                      "# multiplicative ratio upper bound with diffraction/correlation effects"
                      " at z = %.2f nm: %.4f\n",
                      grid.front() / nm, first.ratio_multiplicative + diffraction_correlation_gap);
        out += head;
    }
    out += "z_nm,ratio_additive,ratio_multiplicative\n";
    char buf[96];
    for (double z : grid) {
        const auto row = model.report_row(z);
        std::snprintf(buf, sizeof buf, "%.4f,%.6f,%.6f\n", z / nm, row.ratio_additive,
                      row.ratio_multiplicative);
        out += buf;
    }
    return out;
}

inline std::string comparison_csv(const CompareResult& result, const VariantComparison& vc) {
    std::string out =
        "z_nm,F_theor_pN,F_expt_pN,diff_pN,xi95_pN,xi70_pN,inside95,inside70\n";
    char buf[160];
    for (std::size_t i = 0; i < result.z.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.4f,%s,%s,%.4f,%.4f,%.4f,%d,%d\n", result.z[i] / nm,
                      format_sig(vc.F_theor[i] / pN, 4).c_str(),
                      format_sig(result.expt.mean[i] / pN, 4).c_str(), vc.diff[i] / pN,
                      vc.bands[i].xi95 / pN, vc.bands[i].xi70 / pN,
                      vc.conformity.inside_95[i] ? 1 : 0, vc.conformity.inside_70[i] ? 1 : 0);
        out += buf;
    }
    return out;
}

/// Error budget keyed by separation (nm, two decimals).
inline std::string error_budget_json(const CompareResult& result, const RunConfig& cfg) {
    nlohmann::ordered_json j;
    j["beta"] = cfg.beta;
    j["delta_rand_pN"] = result.expt.delta_rand_abs / pN;
    j["delta_syst_pN"] = result.expt.delta_syst_abs / pN;
    nlohmann::ordered_json per_z;
    char key[32];
    for (std::size_t i = 0; i < result.z.size(); ++i) {
        std::snprintf(key, sizeof key, "%.2f", result.z[i] / nm);
        nlohmann::ordered_json row;
        row["mean_pN"] = result.expt.mean[i] / pN;
        row["s_mean_pN"] = result.expt.s_mean[i] / pN;
        row["s_smoothed_pN"] = result.expt.s_smoothed[i] / pN;
        row["total_expt_pN"] = result.expt.total_abs[i] / pN;
        const auto budget = theory_error_budget(
            result.z[i], cfg.geometry.radius, cfg.geometry.radius_uncertainty,
            cfg.separation_uncertainty, cfg.optical_data_relative_error);
        row["delta0_rel"] = budget.delta0;
        row["delta2_rel"] = budget.delta2;
        row["delta3_rel"] = budget.delta3;
        row["delta_tot_rel"] = budget.delta_total;
        per_z[key] = std::move(row);
    }
    j["per_z"] = std::move(per_z);
    return j.dump(2) + "\n";
}

} // namespace casimir
