// Generates a synthetic force-distance campaign from a configured theory
// model: the roughness-corrected Lifshitz curve plus iid Gaussian noise,
// written as a matrix CSV (z_nm,set1,...,setN) ready for the stats and
// compare subcommands.
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "casimir/pipeline.hpp"

using namespace casimir;

int main(int argc, char* argv[]) {
    CLI::App app{"synthetic campaign generator"};
    std::string config_path, out_path = "campaign.csv", plate;
    int n_sets = 65;
    double sigma_pN = 12.09;  // per-point noise; mean-of-65 scatter ~1.5 pN
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "run configuration JSON")->required();
    app.add_option("--out", out_path, "output CSV path");
    app.add_option("--material", plate, "plate material (default: configured)");
    app.add_option("--sets", n_sets, "number of measurement sets");
    app.add_option("--sigma", sigma_pN, "per-point Gaussian noise, pN");
    app.add_option("--seed", seed, "RNG seed");

    try {
        app.parse(argc, argv);
        RunConfig cfg = load_config(config_path);
        const std::string plate_name = plate.empty() ? cfg.plate_material : plate;

        auto sphere = cfg.material(cfg.sphere_material).build();
        auto plate_model = cfg.material(plate_name).build();
        sphere.build_cache();
        plate_model.build_cache();
        TheoryModel theory(cfg.geometry, sphere, plate_model,
                           TopographyHistogram::from_csv(cfg.sphere_histogram_path),
                           TopographyHistogram::from_csv(cfg.plate_histogram_path));
        const auto grid = cfg.grid.make();
        theory.prepare(grid.front(), grid.back());

        std::vector<double> truth(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) truth[i] = theory.corrected_force(grid[i]);
        const auto campaign = synth_campaign(grid, truth, n_sets, sigma_pN * pN, seed);

        std::string out = "z_nm";
        for (int j = 1; j <= n_sets; ++j) out += ",set" + std::to_string(j);
        out += "\n";
        char buf[48];
        for (std::size_t i = 0; i < grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.4f", grid[i] / nm);
            out += buf;
            for (const auto& row : campaign.F) {
                std::snprintf(buf, sizeof buf, ",%.6f", row[i] / pN);
                out += buf;
            }
            out += "\n";
        }
        write_file_atomic(out_path, out);
        std::cout << "wrote " << out_path << " (" << n_sets << " sets x " << grid.size()
                  << " points)\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
