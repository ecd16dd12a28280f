// Command-line front end: ingest data files, run the permittivity / force /
// roughness / calibration / statistics pipelines, and emit plot-ready CSV
// and JSON reports. Exit codes: 0 accept, 2 a theory variant was rejected at
// 70% confidence, 1 error.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casimir/pipeline.hpp"

using namespace casimir;
namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::string config_path;
    std::string out_dir = ".";
    double beta = 0.0;           // 0 = keep config value
    bool paper_compat = false;   // only applied when --paper-compat given
    bool paper_compat_set = false;
    std::string grid_override;   // "zmin,zmax,n" in nm
};

RunConfig load(const GlobalOptions& opt) {
    if (opt.config_path.empty()) throw std::runtime_error("--config is required");
    RunConfig cfg = load_config(opt.config_path);
    if (opt.beta > 0.0) cfg.beta = opt.beta;
    if (opt.paper_compat_set) cfg.paper_compat = opt.paper_compat;
    if (!opt.grid_override.empty()) {
        double zmin, zmax;
        int n;
        if (std::sscanf(opt.grid_override.c_str(), "%lf,%lf,%d", &zmin, &zmax, &n) != 3)
            throw std::runtime_error("--grid expects zmin,zmax,n (nm)");
        cfg.grid = GridSpec{zmin * nm, zmax * nm, n};
    }
    return cfg;
}

void write_report(const GlobalOptions& opt, const std::string& name, const std::string& content) {
    fs::create_directories(opt.out_dir);
    const std::string path = (fs::path(opt.out_dir) / name).string();
    write_file_atomic(path, content);
    std::cout << "wrote " << path << "\n";
}

PermittivityModel build_material(const RunConfig& cfg, const std::string& name) {
    auto model = cfg.material(name).build();
    model.build_cache();
    return model;
}

TheoryModel make_theory(const RunConfig& cfg, const std::string& plate_name) {
    if (cfg.sphere_material.empty() || plate_name.empty())
        throw std::runtime_error("config: sphere_material and plate_material are required");
    if (cfg.sphere_histogram_path.empty() || cfg.plate_histogram_path.empty())
        throw std::runtime_error("config: roughness histograms are required");
    return TheoryModel(cfg.geometry, build_material(cfg, cfg.sphere_material),
                       build_material(cfg, plate_name),
                       TopographyHistogram::from_csv(cfg.sphere_histogram_path),
                       TopographyHistogram::from_csv(cfg.plate_histogram_path));
}

int cmd_permittivity(const GlobalOptions& opt, const std::string& material) {
    const RunConfig cfg = load(opt);
    const std::string name = material.empty() ? cfg.plate_material : material;
    const auto model = build_material(cfg, name);
    write_report(opt, "permittivity_" + name + ".csv",
                 permittivity_csv(model, 1e11, 1e18, 20));
    return 0;
}

int cmd_force(const GlobalOptions& opt, const std::string& plate) {
    const RunConfig cfg = load(opt);
    const std::string plate_name = plate.empty() ? cfg.plate_material : plate;
    const auto sphere = build_material(cfg, cfg.sphere_material);
    const auto plate_model = build_material(cfg, plate_name);
    const auto curve = force_curve(cfg.geometry, sphere, plate_model, cfg.grid.make());
    write_report(opt, "force_" + plate_name + ".csv", force_csv(curve));
    return 0;
}

int cmd_roughness(const GlobalOptions& opt) {
    const RunConfig cfg = load(opt);
    TheoryModel theory = make_theory(cfg, cfg.plate_material);
    const auto grid = cfg.grid.make();
    theory.prepare(grid.front(), grid.back());

    const auto& t1 = theory.sphere_topography();
    const auto& t2 = theory.plate_topography();
    std::printf("sphere: H0 = %.3f nm, delta_st = %.3f nm\n", zero_level(t1) / nm,
                stochastic_variance(t1) / nm);
    std::printf("plate:  H0 = %.3f nm, delta_st = %.3f nm\n", zero_level(t2) / nm,
                stochastic_variance(t2) / nm);
    write_report(opt, "roughness_report.csv", roughness_report_csv(theory, grid));
    return 0;
}

int cmd_calibrate(const GlobalOptions& opt, const std::string& sweep_path,
                  const std::string& piezo_path, double m_nm_per_unit) {
    const RunConfig cfg = load(opt);
    nlohmann::ordered_json out;

    if (!piezo_path.empty()) {
        const CsvTable csv = read_csv(piezo_path);
        const int cv = csv.column("V"), ce = csv.column("extension_nm");
        if (cv < 0 || ce < 0)
            throw std::runtime_error(piezo_path + ": expected header V,extension_nm");
        std::vector<double> v, ext;
        for (const auto& row : csv.rows) {
            v.push_back(row[cv]);
            ext.push_back(row[ce]);
        }
        const auto coeff = fit_polynomial(v, ext, 4);
        out["piezo_extension_poly_nm"] = coeff;
    }

    if (!sweep_path.empty()) {
        const CsvTable csv = read_csv(sweep_path);
        const int cz = csv.column("z_nm"), cv = csv.column("V_volt"), cf = csv.column("F_pN");
        if (cz < 0 || cv < 0 || cf < 0)
            throw std::runtime_error(sweep_path + ": expected header z_nm,V_volt,F_pN");

        // Group rows into fixed-separation voltage sweeps.
        std::map<double, std::vector<std::pair<double, double>>> by_z;
        for (const auto& row : csv.rows)
            by_z[row[cz]].emplace_back(row[cv], row[cf] * pN);

        std::vector<std::pair<double, double>> x_samples;
        double v0_acc = 0.0;
        nlohmann::ordered_json parabolas;
        for (const auto& [z_nm_value, sweep] : by_z) {
            const auto fit = fit_voltage_parabola(sweep);
            v0_acc += fit.V0;
            x_samples.emplace_back(z_nm_value * nm, fit.X);
            char key[32];
            std::snprintf(key, sizeof key, "%.2f", z_nm_value);
            parabolas[key] = {{"V0", fit.V0}, {"X_N_per_V2", fit.X}};
        }
        const double v0 = v0_acc / static_cast<double>(by_z.size());
        out["V0_volt"] = v0;
        out["parabolas"] = std::move(parabolas);
        if (x_samples.size() >= 8) {
            const double z0 = fit_contact_separation(x_samples, cfg.geometry.radius);
            out["z0_nm"] = z0 / nm;
            out["separation_model"] = separation_model_to_json(SeparationModel(
                m_nm_per_unit * nm, z0, v0, default_force_calibration));
        }
    }

    if (out.empty()) throw std::runtime_error("calibrate: supply --sweep and/or --piezo");
    write_report(opt, "calibration.json", out.dump(2) + "\n");
    return 0;
}

int cmd_stats(const GlobalOptions& opt) {
    const RunConfig cfg = load(opt);
    const ForceCurveSet campaign = load_campaign(cfg);
    const auto errors = experimental_errors(campaign, cfg);

    int flagged = 0;
    for (const auto& v : errors.outliers) flagged += v.outlier;
    std::printf("campaign: %zu sets x %zu points, %d outlier flags\n", campaign.sets(),
                campaign.points(), flagged);
    std::printf("delta_rand = %.3f pN, delta_syst = %.3f pN\n", errors.delta_rand_abs / pN,
                errors.delta_syst_abs / pN);

    CompareResult shell;
    shell.z = campaign.z;
    shell.expt = errors;
    write_report(opt, "error_budget.json", error_budget_json(shell, cfg));

    std::string means = "z_nm,F_mean_pN,s_mean_pN,s_smoothed_pN,total_err_pN\n";
    char buf[128];
    for (std::size_t i = 0; i < campaign.points(); ++i) {
        std::snprintf(buf, sizeof buf, "%.4f,%s,%.4f,%.4f,%.4f\n", campaign.z[i] / nm,
                      format_sig(errors.mean[i] / pN, 4).c_str(), errors.s_mean[i] / pN,
                      errors.s_smoothed[i] / pN, errors.total_abs[i] / pN);
        means += buf;
    }
    write_report(opt, "campaign_means.csv", means);
    return 0;
}

int cmd_compare(const GlobalOptions& opt) {
    const RunConfig cfg = load(opt);
    const ForceCurveSet campaign = load_campaign(cfg);

    std::vector<std::pair<std::string, TheoryModel>> theories;
    theories.emplace_back(cfg.plate_material, make_theory(cfg, cfg.plate_material));
    for (const auto& variant : cfg.plate_variants)
        theories.emplace_back(variant, make_theory(cfg, variant));

    for (auto& [name, model] : theories)
        model.prepare(campaign.z.front(), campaign.z.back());

    std::vector<std::pair<std::string, TheoryModel*>> refs;
    for (auto& [name, model] : theories) refs.emplace_back(name, &model);

    const CompareResult result = compare_campaign(campaign, refs, cfg);

    for (const auto& vc : result.variants) {
        std::printf("%-20s inside95 = %5.1f%%  inside70 = %5.1f%%  -> %s\n", vc.name.c_str(),
                    100.0 * vc.conformity.fraction_inside_95,
                    100.0 * vc.conformity.fraction_inside_70,
                    vc.accepted_70 ? "consistent" : "rejected at 70% confidence");
        write_report(opt, "comparison_" + vc.name + ".csv", comparison_csv(result, vc));
    }
    write_report(opt, "error_budget.json", error_budget_json(result, cfg));
    return result.exit_code;
}

} // namespace

int main(int argc, char* argv[]) {
    CLI::App app{"Casimir force pipeline: Lifshitz theory, roughness corrections, and"
                 " statistical comparison against force-distance campaigns"};
    app.require_subcommand(1);

    GlobalOptions opt;
    app.add_option("--config", opt.config_path, "run configuration JSON");
    app.add_option("--out", opt.out_dir, "output directory (default .)");
    app.add_option("--beta", opt.beta, "confidence level override");
    app.add_option("--grid", opt.grid_override, "grid override zmin,zmax,n (nm)");
    auto* compat = app.add_flag("--paper-compat,!--no-paper-compat", opt.paper_compat,
                                "quantile rounding compatible with the published analysis");

    std::string material, sweep_path, piezo_path;
    double m_nm_per_unit = 43.3;
    auto* c_perm = app.add_subcommand("permittivity", "emit eps(i xi) table");
    c_perm->add_option("--material", material, "material name (default: plate)");
    auto* c_force = app.add_subcommand("force", "emit a Lifshitz force curve");
    c_force->add_option("--material", material, "plate material (default: configured)");
    auto* c_rough = app.add_subcommand("roughness", "topography moments and correction report");
    auto* c_cal = app.add_subcommand("calibrate", "electrostatic calibration fits");
    c_cal->add_option("--sweep", sweep_path, "voltage sweep CSV (z_nm,V_volt,F_pN)");
    c_cal->add_option("--piezo", piezo_path, "piezo extension CSV (V,extension_nm)");
    c_cal->add_option("--m", m_nm_per_unit,
                      "deflection coefficient for the emitted separation model, nm per unit");
    auto* c_stats = app.add_subcommand("stats", "campaign error statistics");
    auto* c_comp = app.add_subcommand("compare", "theory vs campaign with confidence bands");

    try {
        app.parse(argc, argv);
        opt.paper_compat_set = compat->count() > 0;
        if (c_perm->parsed()) return cmd_permittivity(opt, material);
        if (c_force->parsed()) return cmd_force(opt, material);
        if (c_rough->parsed()) return cmd_roughness(opt);
        if (c_cal->parsed()) return cmd_calibrate(opt, sweep_path, piezo_path, m_nm_per_unit);
        if (c_stats->parsed()) return cmd_stats(opt);
        if (c_comp->parsed()) return cmd_compare(opt);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
