#include "symcalc/bessel.hpp"

#include <cmath>
#include <stdexcept>

namespace symcalc {

double sph_bessel_jl(int l, double x) {
    if (l < 0) throw std::invalid_argument("sph_bessel_jl: l < 0");
    if (x < 0) throw std::invalid_argument("sph_bessel_jl: x < 0");
    if (x == 0.0) return l == 0 ? 1.0 : 0.0;
    if (x < 1e-6) {
        // series leading term x^l / (2l+1)!!
        double v = 1.0;
        for (int k = 1; k <= l; ++k) v *= x / (2.0 * k + 1.0);
        return v * (1.0 - x * x / (2.0 * (2.0 * l + 3.0)));
    }
    double j0 = std::sin(x) / x;
    if (l == 0) return j0;
    double j1 = j0 / x - std::cos(x) / x;
    if (l == 1) return j1;
    if (x > l) {
        // upward recurrence, stable in this regime
        double jm = j0, jc = j1;
        for (int n = 1; n < l; ++n) {
            double jn = (2.0 * n + 1.0) / x * jc - jm;
            jm = jc;
            jc = jn;
        }
        return jc;
    }
    // Miller's algorithm: downward from a padded start order, normalize by j_0
    int nstart = l + 16 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(l) * 40.0));
    double jp = 0.0, jc = 1e-300, target = 0.0;
    for (int n = nstart; n >= 0; --n) {
        double jm = (2.0 * n + 3.0) / x * jc - jp;
        if (n == l) target = jm;
        jp = jc;
        jc = jm;
        if (std::abs(jc) > 1e250) {
            jp *= 1e-250;
            jc *= 1e-250;
            target *= 1e-250;
        }
    }
    return target * (j0 / jc);
}

}  // namespace symcalc
