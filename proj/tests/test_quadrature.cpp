#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symcalc/bessel.hpp"
#include "symcalc/quadrature.hpp"

using namespace symcalc;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    // order n is exact through degree 2n-1
    auto poly = [](double x) { return 5 * x * x * x * x * x - x * x + 3; };
    double exact = 2.0 * (-1.0 / 3 + 3.0);  // odd powers drop on [-1,1]
    CHECK(gauss_integrate(poly, -1, 1, 3) == doctest::Approx(exact).epsilon(1e-14));
    CHECK(gauss_integrate([](double x) { return std::exp(x); }, 0, 1, 16) ==
          doctest::Approx(std::numbers::e - 1.0).epsilon(1e-14));
}

TEST_CASE("Gauss-Legendre node symmetry and weight sum") {
    for (int n : {7, 16, 50}) {
        const auto& r = GaussLegendre::get(n);
        double wsum = 0;
        for (int i = 0; i < n; ++i) {
            wsum += r.weights[i];
            CHECK(r.nodes[i] == doctest::Approx(-r.nodes[n - 1 - i]).epsilon(1e-13));
        }
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-14));
    }
}

TEST_CASE("adaptive quadrature handles a sharp feature") {
    double v = adaptive_integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1, 1);
    double exact = 2.0 * std::atan(1.0 / 1e-2) / 1e-2;
    CHECK(v == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("sphere quadrature integrates constants and zonal polynomials") {
    const auto& grid = SphereQuadrature::for_lmax(6);
    double area = 0;
    for (const auto& n : grid.nodes) area += n.weight;
    CHECK(area == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-13));
    double c2 = 0;
    for (const auto& n : grid.nodes) c2 += n.weight * std::cos(n.theta) * std::cos(n.theta);
    CHECK(c2 == doctest::Approx(4.0 * std::numbers::pi / 3.0).epsilon(1e-13));
}

TEST_CASE("spherical Bessel functions match closed forms") {
    for (double x : {0.3, 1.7, 9.0, 42.0}) {
        CHECK(sph_bessel_jl(0, x) == doctest::Approx(std::sin(x) / x).epsilon(1e-13));
        CHECK(sph_bessel_jl(1, x) ==
              doctest::Approx(std::sin(x) / (x * x) - std::cos(x) / x).epsilon(1e-12));
        double j2 = (3.0 / (x * x * x) - 1.0 / x) * std::sin(x) - 3.0 / (x * x) * std::cos(x);
        CHECK(sph_bessel_jl(2, x) == doctest::Approx(j2).epsilon(1e-11));
    }
}

TEST_CASE("spherical Bessel small-argument regime is stable") {
    // j_l(x) ~ x^l/(2l+1)!! for x << 1
    double x = 1e-3;
    double expect = 1.0;
    for (int k = 1; k <= 5; ++k) expect *= x / (2.0 * k + 1.0);
    CHECK(sph_bessel_jl(5, x) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("standard library cross-check of j_l") {
#if defined(__GLIBCXX__)
    for (int l : {0, 1, 3, 7, 15}) {
        for (double x : {0.2, 2.0, 6.5, 30.0}) {
            double ref = std::sph_bessel(static_cast<unsigned>(l), x);
            CHECK(sph_bessel_jl(l, x) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
#endif
}
