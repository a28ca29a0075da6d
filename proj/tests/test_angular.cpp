#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "symcalc/angular.hpp"
#include "symcalc/xfunction.hpp"
#include "symcalc/quadrature.hpp"

using namespace symcalc;

namespace {

cdouble eval_solid(AngularIndex idx, const vec3& eta) {
    double r = std::sqrt(eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]);
    double theta = std::acos(eta[2] / r);
    double phi = std::atan2(eta[1], eta[0]);
    return std::pow(r, idx.l) * eval_sph_harm(idx, theta, phi);
}

cdouble eval_decomp(const std::vector<SolidTerm>& terms, const vec3& eta) {
    double r = std::sqrt(eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]);
    cdouble sum = 0.0;
    for (const auto& t : terms) sum += t.coeff * std::pow(r, t.eta_power) * eval_solid(t.idx, eta);
    return sum;
}

const std::vector<vec3> kSampleEtas{
    {0.3, -0.7, 1.1}, {1.0, 0.2, -0.4}, {-0.8, 0.5, 0.9}, {0.1, 1.3, 0.6}, {-0.5, -0.5, -1.2}};

}  // namespace

TEST_CASE("Y_00 is the quadrature-normalized constant") {
    cdouble y = eval_sph_harm({0, 0}, 1.1, 2.3);
    CHECK(y.real() == doctest::Approx(0.28209479177).epsilon(1e-10));
    CHECK(y.imag() == doctest::Approx(0.0));
    // independent normalization oracle: integral |Y00|^2 over the sphere = 1
    const auto& grid = SphereQuadrature::for_lmax(2);
    double norm = 0;
    for (const auto& n : grid.nodes) norm += n.weight * std::norm(eval_sph_harm({0, 0}, n.theta, n.phi));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("Y_10 vanishes on the equator") {
    CHECK(std::abs(eval_sph_harm({1, 0}, std::numbers::pi / 2, 0.7)) < 1e-15);
}

TEST_CASE("Condon-Shortley conjugation identity") {
    for (auto idx : {AngularIndex{2, 1}, AngularIndex{3, -2}, AngularIndex{5, 4}}) {
        for (double theta : {0.4, 1.2, 2.8}) {
            cdouble lhs = std::conj(eval_sph_harm(idx, theta, 0.9));
            double sign = idx.m % 2 == 0 ? 1.0 : -1.0;
            cdouble rhs = sign * eval_sph_harm({idx.l, -idx.m}, theta, 0.9);
            CHECK(std::abs(lhs - rhs) < 1e-14);
        }
    }
}

TEST_CASE("invalid angular index is a domain error") {
    CHECK_THROWS_AS(eval_sph_harm({1, 2}, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(eval_sph_harm({-1, 0}, 0.5, 0.5), std::domain_error);
}

TEST_CASE("quadrature orthonormality for l,l' <= 6") {
    const auto& grid = SphereQuadrature::for_lmax(6);
    for (int l = 0; l <= 6; ++l) {
        for (int m = -l; m <= l; ++m) {
            for (int lp = l; lp <= 6; ++lp) {
                for (int mp = -lp; mp <= lp; ++mp) {
                    cdouble acc = 0;
                    for (const auto& n : grid.nodes)
                        acc += n.weight * eval_sph_harm({l, m}, n.theta, n.phi) *
                               std::conj(eval_sph_harm({lp, mp}, n.theta, n.phi));
                    double expect = (l == lp && m == mp) ? 1.0 : 0.0;
                    CHECK(std::abs(acc - expect) < 1e-10);
                }
            }
        }
    }
}

TEST_CASE("gaunt expansion: multiplication by Y_00") {
    for (auto idx : {AngularIndex{0, 0}, AngularIndex{2, -1}, AngularIndex{4, 3}}) {
        AngularExpansion e = gaunt_expand({0, 0}, idx);
        CHECK(e.terms().size() == 1);
        CHECK(std::abs(e.coeff(idx) - 1.0 / std::sqrt(4.0 * std::numbers::pi)) < 1e-12);
    }
}

TEST_CASE("gaunt expansion: selection rules for Y_10 * Y_10") {
    AngularExpansion e = gaunt_expand({1, 0}, {1, 0});
    for (const auto& [idx, c] : e.terms()) {
        CHECK((idx.l == 0 || idx.l == 2));
        CHECK(idx.m == 0);
        CHECK(std::abs(c.imag()) < 1e-14);
    }
    CHECK(std::abs(e.coeff({0, 0})) > 1e-3);
    CHECK(std::abs(e.coeff({2, 0})) > 1e-3);
}

TEST_CASE("gaunt expansion reproduces the pointwise product") {
    // quadrature oracle: project Y_a Y_b onto each allowed Y_LM independently
    for (auto [a, b] : {std::pair<AngularIndex, AngularIndex>{{1, 1}, {1, -1}},
                        {{2, 1}, {3, -2}},
                        {{4, 0}, {3, 3}}}) {
        AngularExpansion e = gaunt_expand(a, b);
        const auto& grid = SphereQuadrature::for_lmax(a.l + b.l);
        for (int L = 0; L <= a.l + b.l; ++L) {
            for (int M = -L; M <= L; ++M) {
                cdouble proj = 0;
                for (const auto& n : grid.nodes)
                    proj += n.weight * eval_sph_harm(a, n.theta, n.phi) *
                            eval_sph_harm(b, n.theta, n.phi) *
                            std::conj(eval_sph_harm({L, M}, n.theta, n.phi));
                CHECK(std::abs(proj - e.coeff({L, M})) < 1e-11);
            }
        }
    }
}

TEST_CASE("gaunt parity closure (Table 1 structural content)") {
    // product support satisfies l1 + l2 - L even, i.e. parity adds
    for (auto [a, b] : {std::pair<AngularIndex, AngularIndex>{{3, 2}, {2, 0}},
                        {{1, 0}, {4, -2}},
                        {{3, 1}, {3, 1}}}) {
        AngularExpansion e = gaunt_expand(a, b);
        for (const auto& [idx, c] : e.terms()) {
            (void)c;
            CHECK((a.l + b.l - idx.l) % 2 == 0);
            CHECK(idx.m == a.m + b.m);
            CHECK(idx.l >= std::abs(a.l - b.l));
        }
    }
}

TEST_CASE("solid harmonics: differentiate Z_00 is empty") {
    for (int axis : {1, 2, 3})
        CHECK(solid_harmonic_decompose(SolidOp::differentiate_component, axis, {0, 0}).empty());
}

TEST_CASE("solid harmonics: eta_3 Z_00 lands on (1,0)") {
    auto terms = solid_harmonic_decompose(SolidOp::multiply_by_component, 3, {0, 0});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].idx == AngularIndex{1, 0});
    CHECK(terms[0].eta_power == 0);
    for (const auto& eta : kSampleEtas) {
        cdouble lhs = eta[2] * eval_solid({0, 0}, eta);
        CHECK(std::abs(lhs - eval_decomp(terms, eta)) < 1e-12);
    }
}

TEST_CASE("solid harmonics: d/d eta_3 of Z_20 lands on l'=1 only") {
    auto terms = solid_harmonic_decompose(SolidOp::differentiate_component, 3, {2, 0});
    for (const auto& t : terms) CHECK(t.idx.l == 1);
    CHECK(!terms.empty());
}

TEST_CASE("solid harmonic multiplication identities on a sample grid") {
    for (int axis : {1, 2, 3}) {
        for (auto idx : {AngularIndex{1, 0}, AngularIndex{2, 1}, AngularIndex{3, -2},
                         AngularIndex{4, 4}}) {
            auto terms = solid_harmonic_decompose(SolidOp::multiply_by_component, axis, idx);
            for (const auto& eta : kSampleEtas) {
                cdouble lhs = eta[axis - 1] * eval_solid(idx, eta);
                CHECK(std::abs(lhs - eval_decomp(terms, eta)) < 1e-11);
            }
        }
    }
}

TEST_CASE("solid harmonic differentiation identities via finite differences") {
    const double h = 1e-5;
    for (int axis : {1, 2, 3}) {
        for (auto idx : {AngularIndex{1, 1}, AngularIndex{2, 0}, AngularIndex{3, 2},
                         AngularIndex{4, -3}}) {
            auto terms = solid_harmonic_decompose(SolidOp::differentiate_component, axis, idx);
            for (const auto& eta : kSampleEtas) {
                vec3 ep = eta, em = eta;
                ep[axis - 1] += h;
                em[axis - 1] -= h;
                cdouble fd = (eval_solid(idx, ep) - eval_solid(idx, em)) / (2.0 * h);
                cdouble an = eval_decomp(terms, eta);
                CHECK(std::abs(fd - an) < 1e-7 * (1.0 + std::abs(an)));
            }
        }
    }
}

TEST_CASE("angular expansion normal form strips tiny coefficients") {
    AngularExpansion e;
    e.set({2, 1}, 1e-14);
    CHECK(e.empty());
    e.set({2, 1}, 0.5);
    e.add({2, 1}, -0.5);
    CHECK(e.empty());
}

TEST_CASE("parity consistency bookkeeping") {
    AngularExpansion e;
    e.parity_class = ParityClass::even_with_j;
    e.reference_j = 4;
    e.set({2, 1}, 1.0);
    e.set({4, 0}, 0.3);
    CHECK(e.parity_consistent());
    e.set({3, 0}, 0.1);
    CHECK(!e.parity_consistent());
}
