#include "relcon/special.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "relcon/error.hpp"

namespace relcon {

double lanczos_gamma(double x) {
    static constexpr double kG = 7.0;
    static constexpr std::array<double, 9> kCoef = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

    require(std::isfinite(x), "lanczos_gamma: argument must be finite");
    if (x < 0.5) {
        const double s = std::sin(std::numbers::pi * x);
        require(s != 0.0, "lanczos_gamma: pole at non-positive integer");
        return std::numbers::pi / (s * lanczos_gamma(1.0 - x));
    }
    const double z = x - 1.0;
    double a = kCoef[0];
    for (std::size_t i = 1; i < kCoef.size(); ++i) {
        a += kCoef[i] / (z + static_cast<double>(i));
    }
    const double t = z + kG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

}  // namespace relcon
