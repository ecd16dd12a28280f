// Generates the bundled gold optical table (data/au_optical.csv): handbook
// format omega_eV,n,kappa on a log frequency grid. The model is a Drude term
// (9.0 eV / 0.035 eV) plus five interband Lorentz oscillators with
// Lorentz-Drude literature parameters, evaluated on the real axis and
// converted to the complex refractive index.
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

int main(int argc, char* argv[]) {
    const std::string path = argc > 1 ? argv[1] : "au_optical.csv";

    const double wp = 9.0, gamma = 0.035;  // eV
    struct Osc {
        double f, G, w;
    };
    const Osc inter[5] = {{0.024, 0.241, 0.415},
                          {0.010, 0.345, 0.830},
                          {0.071, 0.870, 2.969},
                          {0.601, 2.494, 4.304},
                          {4.384, 2.214, 13.32}};
    const double wp_lorentz = 9.03;  // eV, oscillator-strength scale

    std::FILE* out = std::fopen(path.c_str(), "w");
    if (!out) {
        std::fprintf(stderr, "cannot open %s\n", path.c_str());
        return 1;
    }
    std::fprintf(out, "# synthetic gold optical constants: Drude 9.0 eV / 0.035 eV"
                      " + 5 interband Lorentz oscillators\n");
    std::fprintf(out, "omega_eV,n,kappa\n");

    const double w_lo = 0.125, w_hi = 1.0e4;
    const int per_decade = 60;
    const int n_rows = static_cast<int>(std::ceil(std::log10(w_hi / w_lo) * per_decade)) + 1;
    const double step = std::log(w_hi / w_lo) / (n_rows - 1);
    for (int i = 0; i < n_rows; ++i) {
        const double w = w_lo * std::exp(i * step);
        std::complex<double> eps =
            1.0 - wp * wp / (w * w + std::complex<double>(0.0, gamma * w));
        for (const Osc& o : inter)
            eps += o.f * wp_lorentz * wp_lorentz /
                   (o.w * o.w - w * w - std::complex<double>(0.0, o.G * w));
        const std::complex<double> nk = std::sqrt(eps);
        std::fprintf(out, "%.8e,%.8e,%.8e\n", w, nk.real(), nk.imag());
    }
    std::fclose(out);
    std::printf("wrote %s (%d rows)\n", path.c_str(), n_rows);
    return 0;
}
