#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "casimir/constants.hpp"
#include "casimir/stats.hpp"
#include "casimir/warnings.hpp"
#include "fixtures.hpp"

using namespace casimir;

namespace {

ForceCurveSet make_set(std::size_t n_sets, std::size_t n_points,
                       const std::function<double(std::size_t, std::size_t)>& value) {
    ForceCurveSet set;
    for (std::size_t i = 0; i < n_points; ++i) set.z.push_back((60.0 + i) * nm);
    set.F.resize(n_sets, std::vector<double>(n_points));
    for (std::size_t j = 0; j < n_sets; ++j)
        for (std::size_t i = 0; i < n_points; ++i) set.F[j][i] = value(j, i);
    return set;
}

} // namespace

TEST_CASE("student t quantiles") {
    CHECK(student_t_quantile(0.975, 64) == Catch::Approx(1.998).margin(5e-4));
    CHECK(student_t_quantile(0.975, 64, true) == 2.0);
    CHECK(student_t_quantile(0.975, 1000000) == Catch::Approx(1.960).margin(1e-3));
    CHECK(student_t_quantile(0.85, 1000000) == Catch::Approx(1.0364).margin(1e-3));
    CHECK(student_t_quantile(0.99, 10) > student_t_quantile(0.975, 10));
    CHECK_THROWS_AS(student_t_quantile(1.2, 10), std::invalid_argument);
}

TEST_CASE("grid alignment") {
    SECTION("curves already on the grid pass through unchanged") {
        std::vector<double> grid{1.0, 2.0, 3.0};
        RawCurve c{{1.0, 2.0, 3.0}, {-10.0, -5.0, -2.0}};
        auto set = align_to_grid({c, c}, grid);
        CHECK(set.F[0] == c.F);
        CHECK(set.F[1] == c.F);
    }

    SECTION("straight lines interpolate exactly") {
        RawCurve line{{0.0, 0.7, 1.9, 3.0}, {}};
        for (double z : line.z) line.F.push_back(4.0 - 2.5 * z);
        auto set = align_to_grid({line}, {0.25, 1.0, 2.75});
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(set.F[0][i] ==
                  Catch::Approx(4.0 - 2.5 * std::vector<double>{0.25, 1.0, 2.75}[i]));
    }

    SECTION("grid point outside a curve names curve and point") {
        RawCurve c{{1.0, 2.0}, {0.0, 1.0}};
        CHECK_THROWS_WITH(align_to_grid({c}, {0.5}),
                          Catch::Matchers::ContainsSubstring("curve 0"));
    }

    SECTION("interpolated white-noise amplitude follows the offset prediction") {
        std::mt19937_64 rng(2024u);
        std::normal_distribution<double> noise(0.0, 1.0);
        // Raw curves sampled at a fixed fractional offset from the grid.
        std::vector<double> raw_z, grid;
        for (int i = 0; i <= 4000; ++i) raw_z.push_back(i * 0.17);
        for (int i = 1; i < 4000; ++i) grid.push_back((i + 0.31) * 0.17);
        RawCurve c{raw_z, {}};
        for (std::size_t i = 0; i < raw_z.size(); ++i) c.F.push_back(noise(rng));
        auto set = align_to_grid({c}, grid);
        double raw_ss = 0.0, interp_ss = 0.0;
        for (double v : c.F) raw_ss += v * v;
        for (double v : set.F[0]) interp_ss += v * v;
        const double raw_rms = std::sqrt(raw_ss / c.F.size());
        const double interp_rms = std::sqrt(interp_ss / set.F[0].size());
        // Linear interpolation at offset t scales per-sample white noise by
        // sqrt(1 - 2t(1-t)): a 24% reduction at t = 0.31.
        const double t = 0.31;
        const double predicted = raw_rms * std::sqrt(1.0 - 2.0 * t * (1.0 - t));
        CHECK(std::fabs(interp_rms / predicted - 1.0) < 0.02);
    }

    SECTION("band-limited noise amplitude survives alignment within 2%") {
        // Measurement noise is correlated over many samples; smoothing white
        // noise over 16 pitches makes interpolation amplitude-preserving.
        std::mt19937_64 rng(77u);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<double> white(4400);
        for (double& v : white) v = noise(rng);
        std::vector<double> raw_z, grid;
        RawCurve c;
        for (int i = 0; i <= 4000; ++i) {
            c.z.push_back(i * 0.17);
            double acc = 0.0;
            for (int k = 0; k < 16; ++k) acc += white[i + k];
            c.F.push_back(acc / 16.0);
        }
        for (int i = 1; i < 4000; ++i) grid.push_back((i + 0.31) * 0.17);
        auto set = align_to_grid({c}, grid);
        double raw_ss = 0.0, interp_ss = 0.0;
        for (double v : c.F) raw_ss += v * v;
        for (double v : set.F[0]) interp_ss += v * v;
        const double raw_rms = std::sqrt(raw_ss / c.F.size());
        const double interp_rms = std::sqrt(interp_ss / set.F[0].size());
        CHECK(std::fabs(interp_rms / raw_rms - 1.0) < 0.02);
    }
}

TEST_CASE("mean force") {
    auto identical = make_set(3, 4, [](std::size_t, std::size_t i) { return -10.0 + i; });
    CHECK(mean_force(identical) == identical.F[0]);

    auto two = make_set(2, 1, [](std::size_t j, std::size_t) { return j == 0 ? -1.0 : -3.0; });
    CHECK(mean_force(two)[0] == Catch::Approx(-2.0));

    // Reference fixture passes through unchanged when all sets agree.
    ForceCurveSet fixture;
    for (const auto& row : fixtures::force_summary) {
        fixture.z.push_back(row.z_nm * nm);
    }
    fixture.F.assign(2, {});
    for (const auto& row : fixtures::force_summary) {
        fixture.F[0].push_back(row.F_expt * pN);
        fixture.F[1].push_back(row.F_expt * pN);
    }
    auto mean = mean_force(fixture);
    CHECK(mean[0] / pN == Catch::Approx(-380.0));
    CHECK(mean[12] / pN == Catch::Approx(-5.221));
}

TEST_CASE("outlier scan") {
    SECTION("single wild value among 65 sets is flagged") {
        auto set = make_set(65, 2, [](std::size_t j, std::size_t i) {
            return (i == 0 && j == 17) ? 10.0 : 0.0;
        });
        auto verdicts = outlier_scan(set, 0.90);
        CHECK(verdicts[0].T == Catch::Approx(7.9383).margin(1e-3));
        CHECK(verdicts[0].outlier);
        CHECK(verdicts[0].argmax_set == 17);
        CHECK_FALSE(verdicts[1].outlier);  // all-equal column: no outlier
        CHECK(verdicts[1].T == 0.0);
    }

    SECTION("Gaussian scatter of typical size is accepted") {
        std::mt19937_64 rng(5u);
        std::normal_distribution<double> noise(0.0, 12.0 * pN);
        auto set = make_set(65, 40, [&](std::size_t, std::size_t) { return noise(rng); });
        auto verdicts = outlier_scan(set, 0.90);
        int flagged = 0;
        for (const auto& v : verdicts) flagged += v.outlier;
        CHECK(flagged <= 4);  // false positives are rare at the 3.2 critical value
    }

    SECTION("critical value table") {
        CHECK(outlier_critical_value(65, 0.90) == 3.2);
        CHECK(outlier_critical_value(65, 0.95) == Catch::Approx(3.23).margin(0.005));
        CHECK(outlier_critical_value(20, 0.90) == Catch::Approx(2.5566).margin(1e-4));
        CHECK_THROWS_AS(outlier_critical_value(10, 0.90), std::invalid_argument);
        CHECK_THROWS_AS(outlier_critical_value(65, 0.80), std::invalid_argument);
    }
}

TEST_CASE("variance of the mean") {
    auto identical = make_set(5, 3, [](std::size_t, std::size_t i) { return -2.0 * i; });
    for (double s : variance_of_mean(identical)) CHECK(s == 0.0);

    // Two sets separated by 2d: s_mean = d.
    const double d = 0.7;
    auto two = make_set(2, 1, [&](std::size_t j, std::size_t) { return j == 0 ? -d : d; });
    CHECK(variance_of_mean(two)[0] == Catch::Approx(d).epsilon(1e-12));

    SECTION("scales as 1/sqrt(n) for iid noise") {
        std::mt19937_64 rng(7u);
        std::normal_distribution<double> noise(0.0, 1.0);
        double s16 = 0.0, s64 = 0.0;
        const int reps = 400;
        for (int r = 0; r < reps; ++r) {
            auto a = make_set(16, 1, [&](std::size_t, std::size_t) { return noise(rng); });
            auto b = make_set(64, 1, [&](std::size_t, std::size_t) { return noise(rng); });
            s16 += variance_of_mean(a)[0];
            s64 += variance_of_mean(b)[0];
        }
        CHECK(s16 / s64 == Catch::Approx(2.0).margin(0.1));
    }
}

TEST_CASE("variance smoothing") {
    SECTION("constant input is a fixed point") {
        std::vector<double> s(100, 1.5);
        auto smoothed = smooth_variance(s, 30);
        for (double v : smoothed) CHECK(v == Catch::Approx(1.5).epsilon(1e-12));
    }

    SECTION("uniform weights reduce to the window RMS") {
        std::vector<double> s(50);
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = 1.0 + 0.01 * i;
        auto smoothed = smooth_variance(s, 6);
        const std::size_t i = 25;
        double acc = 0.0;
        for (std::size_t k = i - 3; k <= i + 3; ++k)
            if (k != i) acc += s[k] * s[k];
        CHECK(smoothed[i] == Catch::Approx(std::sqrt(acc / 6.0)).epsilon(1e-12));
    }

    SECTION("bounded between window min and max, translation invariant") {
        std::mt19937_64 rng(11u);
        std::uniform_real_distribution<double> u(0.5, 2.5);
        std::vector<double> s(80);
        for (double& v : s) v = u(rng);
        auto smoothed = smooth_variance(s, 30);
        double lo = *std::min_element(s.begin(), s.end());
        double hi = *std::max_element(s.begin(), s.end());
        for (double v : smoothed) {
            CHECK(v >= lo);
            CHECK(v <= hi);
        }
        // Translating the whole series translates the smoothed RMS.
        std::vector<double> shifted(s.begin() + 10, s.end());
        auto sm2 = smooth_variance(shifted, 30);
        CHECK(sm2[30] == Catch::Approx(smoothed[40]).epsilon(1e-12));
    }

    SECTION("inverse-variance weights reproduce constants and reject zeros") {
        std::vector<double> s(40, 2.0);
        auto smoothed = smooth_variance(s, 10, SmoothingWeights::inverse_variance);
        CHECK(smoothed[20] == Catch::Approx(2.0).epsilon(1e-12));
        s[5] = 0.0;
        CHECK_THROWS_AS(smooth_variance(s, 10, SmoothingWeights::inverse_variance),
                        std::invalid_argument);
    }

    SECTION("window validation") {
        std::vector<double> s(10, 1.0);
        CHECK_THROWS_AS(smooth_variance(s, 30), std::invalid_argument);
        CHECK_THROWS_AS(smooth_variance(s, 5), std::invalid_argument);
    }
}

TEST_CASE("random error") {
    // 1.5 pN, n = 65, beta = 0.95, compat rounding: 3.0 pN.
    auto err = random_error(1.5 * pN, 65, 0.95, {}, true);
    CHECK(err.absolute / pN == Catch::Approx(3.0));

    // Exact quantile: 2.9966 pN.
    auto exact = random_error(1.5 * pN, 65, 0.95, {}, false);
    CHECK(exact.absolute / pN == Catch::Approx(1.5 * 1.99773).margin(1e-3));

    // Relative error at the shortest separation fixture.
    auto rel = random_error(1.5 * pN, 65, 0.95, {-380.0 * pN}, true);
    CHECK(rel.relative[0] == Catch::Approx(3.0 / 380.0).epsilon(1e-12));

    // Monotone in beta.
    CHECK(random_error(1.5, 65, 0.99).absolute > random_error(1.5, 65, 0.95).absolute);
}

TEST_CASE("systematic error combination") {
    // min(1.80, 1.12 sqrt(1.0854)) = 1.1668
    const double combined = combine_systematic({0.82, 0.55, 0.31, 0.12}, 0.95);
    CHECK(combined == Catch::Approx(1.17).margin(0.005));
    CHECK(combined == Catch::Approx(1.16684).margin(1e-4));

    CHECK(combine_systematic({0.42}, 0.95) == 0.42);
    CHECK(combine_systematic({1.0, 1.0}, 0.95) == Catch::Approx(1.1 * std::sqrt(2.0)));

    CHECK_THROWS_WITH(combine_systematic({1.0, 1.0, 1.0}, 0.95),
                      Catch::Matchers::ContainsSubstring("supported"));

    SECTION("never exceeds the sum, never falls below the largest component") {
        std::mt19937_64 rng(3u);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> e{u(rng), u(rng), u(rng), u(rng)};
            const double c = combine_systematic(e, 0.95);
            double sum = 0.0, biggest = 0.0;
            for (double v : e) {
                sum += v;
                biggest = std::max(biggest, v);
            }
            CHECK(c <= sum + 1e-12);
            CHECK(c >= biggest - 1e-12);
        }
    }
}

TEST_CASE("total experimental error") {
    // rand 3.0, syst 1.17, s~ = 1.5: r = 0.78, conservative takes
    // max(3.0, 0.8 (3.0 + 1.17)) = 3.336.
    CHECK(total_experimental_error(3.0, 1.17, 1.5, 0.95) == Catch::Approx(3.33).margin(0.01));

    // Pure-branch cases.
    CHECK(total_experimental_error(2.5, 0.0, 1.5, 0.95, TotalErrorPolicy::standard) == 2.5);
    CHECK(total_experimental_error(0.1, 10.0, 1.0, 0.95, TotalErrorPolicy::standard) == 10.0);
    CHECK(total_experimental_error(1.0, 2.0, 1.0, 0.95, TotalErrorPolicy::standard) ==
          Catch::Approx(0.8 * 3.0));

    SECTION("zero smoothed variance warns and takes the max") {
        std::vector<std::string> warnings;
        WarningCapture capture(warnings);
        CHECK(total_experimental_error(2.0, 3.0, 0.0, 0.95) == 3.0);
        CHECK(warnings.size() == 1);
    }

    SECTION("conservative policy is monotone in both inputs") {
        const double base = total_experimental_error(3.0, 1.17, 1.5, 0.95);
        CHECK(total_experimental_error(3.1, 1.17, 1.5, 0.95) >= base);
        CHECK(total_experimental_error(3.0, 1.27, 1.5, 0.95) >= base);
    }
}

TEST_CASE("theoretical error budget") {
    const double R = fixtures::sphere_radius_m;
    const double dR = fixtures::sphere_radius_err_m;
    const double dz = fixtures::separation_err_m;

    SECTION("matches the reference error table at both ends") {
        auto b1 = theory_error_budget(62.33 * nm, R, dR, dz, 0.005);
        CHECK(b1.delta0 == Catch::Approx(0.0055).margin(5e-4));
        CHECK(b1.delta_total == Catch::Approx(0.038).margin(5e-4));

        auto b2 = theory_error_budget(140.02 * nm, R, dR, dz, 0.005);
        CHECK(b2.delta_total == Catch::Approx(0.019).margin(5e-4));
    }

    SECTION("full reference columns within 0.3 percentage points") {
        for (const auto& row : fixtures::error_summary) {
            auto b = theory_error_budget(row.z_nm * nm, R, dR, dz, 0.005);
            INFO("z = " << row.z_nm);
            CHECK(std::fabs(b.delta0 * 100 - row.delta0_pct) <= 0.3);
            CHECK(std::fabs(b.delta3 * 100 - row.delta3_pct) <= 0.3);
            CHECK(std::fabs(b.delta_total * 100 - row.delta_tot_pct) <= 0.3);
        }
    }

    SECTION("no separation or radius uncertainty leaves the data-driven part") {
        auto b = theory_error_budget(100.0 * nm, R, 0.0, 0.0, 0.005);
        CHECK(b.delta3 == 0.0);
        CHECK(b.delta_total == Catch::Approx(0.8 * b.delta0));
    }
}

TEST_CASE("confidence band") {
    SECTION("reference reconstruction at 100.07 nm") {
        // theor 2.4% of 104.2 pN, expt 3.33 pN.
        auto band = confidence_band(0.024 * 104.2, 3.33);
        CHECK(band.xi95 == Catch::Approx(4.6).margin(0.05));  // table prints 4.5
    }
    SECTION("reference reconstruction at 90.04 nm") {
        auto band = confidence_band(0.027 * 139.4, 3.33);
        CHECK(band.xi95 == Catch::Approx(5.5).margin(0.06));  // table prints 5.4
    }
    SECTION("one vanishing input: min picks the sum") {
        auto band = confidence_band(0.0, 2.0);
        CHECK(band.xi95 == 2.0);
        CHECK(band.xi95_quadrature == Catch::Approx(2.2));
    }
    SECTION("the 95%/70% ratio is exactly 2") {
        for (double a : {0.1, 1.0, 5.0})
            for (double b : {0.2, 2.0, 7.0}) {
                auto band = confidence_band(a, b);
                CHECK(band.xi95 / band.xi70 == Catch::Approx(2.0).epsilon(1e-15));
                CHECK(band.xi95 > 0.0);
            }
    }
}

TEST_CASE("band conformity") {
    std::vector<ConfidenceBand> bands;
    for (int i = 0; i < 4; ++i) bands.push_back(confidence_band(1.0, 1.0));
    const double xi70 = bands[0].xi70;

    SECTION("all differences zero") {
        auto c = band_conformity({0.0, 0.0, 0.0, 0.0}, bands);
        CHECK(c.fraction_inside_95 == 1.0);
        CHECK(c.fraction_inside_70 == 1.0);
    }

    SECTION("boundary values count as inside") {
        auto c = band_conformity({xi70, -xi70, xi70, xi70}, bands);
        CHECK(c.fraction_inside_70 == 1.0);
        CHECK(c.fraction_inside_95 == 1.0);
    }

    SECTION("length mismatch is an error") {
        CHECK_THROWS_AS(band_conformity({0.0}, bands), std::invalid_argument);
    }

    SECTION("reference differences sit inside the 95% band at every row") {
        std::vector<double> diffs;
        std::vector<ConfidenceBand> ref_bands;
        for (const auto& row : fixtures::force_summary) {
            diffs.push_back(row.diff_cond);
            ConfidenceBand b{};
            b.xi95 = row.xi95;
            b.xi70 = row.xi70;
            ref_bands.push_back(b);
        }
        auto c = band_conformity(diffs, ref_bands);
        CHECK(c.fraction_inside_95 == 1.0);

        // The dielectric differences fall outside the 70% band through the
        // short-separation window.
        std::vector<double> diffs_diel;
        for (const auto& row : fixtures::force_summary) diffs_diel.push_back(row.diff_diel);
        auto cd = band_conformity(diffs_diel, ref_bands);
        for (std::size_t i = 1; i <= 5; ++i) CHECK_FALSE(cd.inside_70[i]);
    }
}

TEST_CASE("normality check") {
    std::mt19937_64 rng(31u);

    SECTION("Monte-Carlo calibration on true normals and wide uniforms") {
        // Oracle rates for this binning at the 70% threshold: ~89% of true
        // normals accepted, ~88% of uniforms rejected.
        std::normal_distribution<double> normal(0.0, 1.5);
        std::uniform_real_distribution<double> uniform(-4.0, 4.0);
        int accepted_normal = 0, rejected_uniform = 0;
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> a, b;
            for (int i = 0; i < 65; ++i) {
                a.push_back(normal(rng));
                b.push_back(uniform(rng));
            }
            accepted_normal += normality_check(a).accepted;
            rejected_uniform += !normality_check(b).accepted;
        }
        CHECK(accepted_normal >= 83);
        CHECK(rejected_uniform >= 80);
    }

    SECTION("constant samples are rejected with an explicit reason") {
        std::vector<double> flat(30, 1.0);
        auto r = normality_check(flat);
        CHECK_FALSE(r.accepted);
        CHECK(r.reason.find("zero sample variance") != std::string::npos);
    }

    SECTION("too few samples") {
        std::vector<double> few(10, 0.0);
        CHECK_THROWS_AS(normality_check(few), std::invalid_argument);
    }
}
