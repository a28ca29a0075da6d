#include "symcalc/angular.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "symcalc/quadrature.hpp"

namespace symcalc {

void AngularExpansion::set(AngularIndex idx, cdouble c) {
    if (std::abs(c) < kAngularEps)
        terms_.erase(idx);
    else
        terms_[idx] = c;
}

void AngularExpansion::add(AngularIndex idx, cdouble c) {
    auto it = terms_.find(idx);
    cdouble v = (it == terms_.end() ? cdouble{} : it->second) + c;
    set(idx, v);
}

cdouble AngularExpansion::coeff(AngularIndex idx) const {
    auto it = terms_.find(idx);
    return it == terms_.end() ? cdouble{} : it->second;
}

cdouble AngularExpansion::eval(double theta, double phi) const {
    cdouble sum = 0.0;
    for (const auto& [idx, c] : terms_) sum += c * eval_sph_harm(idx, theta, phi);
    return sum;
}

bool AngularExpansion::parity_consistent() const {
    if (parity_class == ParityClass::unconstrained) return true;
    int want = parity_class == ParityClass::even_with_j ? 0 : 1;
    for (const auto& [idx, c] : terms_) {
        (void)c;
        if (idx.l > reference_j) return false;
        if (((reference_j - idx.l) % 2 + 2) % 2 != want) return false;
    }
    return true;
}

AngularExpansion& AngularExpansion::operator*=(cdouble s) {
    if (std::abs(s) < kAngularEps) {
        terms_.clear();
        return *this;
    }
    for (auto& [idx, c] : terms_) c *= s;
    return *this;
}

AngularExpansion& AngularExpansion::operator+=(const AngularExpansion& other) {
    for (const auto& [idx, c] : other.terms_) add(idx, c);
    return *this;
}

namespace {

// Normalized associated Legendre N_lm P_l^m(cos theta) including the
// Condon-Shortley phase, by the standard stable ladder recurrence.
double legendre_norm(int l, int m, double ct, double st) {
    // P~_mm, then upward in l
    double pmm = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    for (int k = 1; k <= m; ++k)
        pmm *= -st * std::sqrt((2.0 * k + 1.0) / (2.0 * k));
    if (l == m) return pmm;
    double pm1 = pmm;
    double pl = ct * std::sqrt(2.0 * m + 3.0) * pmm;
    if (l == m + 1) return pl;
    for (int k = m + 2; k <= l; ++k) {
        double a = std::sqrt((4.0 * k * k - 1.0) / (static_cast<double>(k) * k - m * m));
        double b = std::sqrt(((k - 1.0) * (k - 1.0) - m * m) / (4.0 * (k - 1.0) * (k - 1.0) - 1.0));
        double p = a * (ct * pl - b * pm1);
        pm1 = pl;
        pl = p;
    }
    return pl;
}

}  // namespace

cdouble eval_sph_harm(AngularIndex idx, double theta, double phi) {
    if (!idx.valid()) throw std::domain_error("eval_sph_harm: invalid (l,m) index");
    int m = std::abs(idx.m);
    double p = legendre_norm(idx.l, m, std::cos(theta), std::sin(theta));
    cdouble e = std::polar(1.0, m * phi);
    if (idx.m >= 0) return p * e;
    double sign = (m % 2 == 0) ? 1.0 : -1.0;  // conj(Y_lm) = (-1)^m Y_{l,-m}
    return sign * p * std::conj(e);
}

AngularExpansion gaunt_expand(AngularIndex a, AngularIndex b) {
    if (!a.valid() || !b.valid()) throw std::domain_error("gaunt_expand: invalid index");
    AngularExpansion out;
    int M = a.m + b.m;
    int Lmin = std::max(std::abs(a.l - b.l), std::abs(M));
    if (((a.l + b.l) - Lmin) % 2 != 0) ++Lmin;
    const auto& grid = SphereQuadrature::for_lmax(std::min(a.l + b.l, kLMax));
    for (int L = Lmin; L <= a.l + b.l && L <= kLMax; L += 2) {
        cdouble g = 0.0;
        for (const auto& node : grid.nodes) {
            g += node.weight * eval_sph_harm(a, node.theta, node.phi) *
                 eval_sph_harm(b, node.theta, node.phi) *
                 std::conj(eval_sph_harm({L, M}, node.theta, node.phi));
        }
        out.set({L, M}, g.real());  // Gaunt coefficients are real
    }
    return out;
}

namespace {

// Ladder blocks for R_lm := r^l Y_lm.
//   z R_lm           = az_up R_{l+1,m}   + az_dn r^2 R_{l-1,m}
//   (x+iy) R_lm      = ap_up R_{l+1,m+1} + ap_dn r^2 R_{l-1,m+1}
//   (x-iy) R_lm      = am_up R_{l+1,m-1} + am_dn r^2 R_{l-1,m-1}
//   dz R_lm          = dz  R_{l-1,m}
//   (dx+i dy) R_lm   = dp  R_{l-1,m+1}
//   (dx-i dy) R_lm   = dm  R_{l-1,m-1}
double az_up(int l, int m) {
    return std::sqrt((l - m + 1.0) * (l + m + 1.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}
double az_dn(int l, int m) {
    return std::sqrt((l - m) * (l + m) / ((2.0 * l - 1.0) * (2.0 * l + 1.0)));
}
double ap_up(int l, int m) {
    return -std::sqrt((l + m + 1.0) * (l + m + 2.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}
double ap_dn(int l, int m) {
    return std::sqrt((l - m) * (l - m - 1.0) / ((2.0 * l - 1.0) * (2.0 * l + 1.0)));
}
double am_up(int l, int m) {
    return std::sqrt((l - m + 1.0) * (l - m + 2.0) / ((2.0 * l + 1.0) * (2.0 * l + 3.0)));
}
double am_dn(int l, int m) {
    return -std::sqrt((l + m) * (l + m - 1.0) / ((2.0 * l - 1.0) * (2.0 * l + 1.0)));
}
double dz_c(int l, int m) {
    return std::sqrt((static_cast<double>(l) * l - static_cast<double>(m) * m) * (2.0 * l + 1.0) /
                     (2.0 * l - 1.0));
}
double dp_c(int l, int m) {
    return std::sqrt((l - m) * (l - m - 1.0) * (2.0 * l + 1.0) / (2.0 * l - 1.0));
}
double dm_c(int l, int m) {
    return -std::sqrt((l + m) * (l + m - 1.0) * (2.0 * l + 1.0) / (2.0 * l - 1.0));
}

void push(std::vector<SolidTerm>& v, int l, int m, cdouble c, int pow) {
    if (l < 0 || std::abs(m) > l || std::abs(c) < kAngularEps) return;
    if (l > kLMax) throw std::domain_error("solid_harmonic_decompose: l exceeds l_max bound");
    v.push_back({{l, m}, c, pow});
}

}  // namespace

std::vector<SolidTerm> solid_harmonic_decompose(SolidOp op, int axis, AngularIndex idx) {
    if (!idx.valid()) throw std::domain_error("solid_harmonic_decompose: invalid index");
    if (axis < 1 || axis > 3) throw std::domain_error("solid_harmonic_decompose: axis must be 1..3");
    int l = idx.l, m = idx.m;
    std::vector<SolidTerm> out;
    const cdouble I(0.0, 1.0);
    if (op == SolidOp::multiply_by_component) {
        if (axis == 3) {
            push(out, l + 1, m, az_up(l, m), 0);
            push(out, l - 1, m, az_dn(l, m), 2);
        } else {
            // x = ((x+iy)+(x-iy))/2,  y = ((x+iy)-(x-iy))/(2i)
            cdouble cp = axis == 1 ? cdouble(0.5) : cdouble(0.0, -0.5);
            cdouble cm = axis == 1 ? cdouble(0.5) : cdouble(0.0, 0.5);
            push(out, l + 1, m + 1, cp * ap_up(l, m), 0);
            push(out, l - 1, m + 1, cp * ap_dn(l, m), 2);
            push(out, l + 1, m - 1, cm * am_up(l, m), 0);
            push(out, l - 1, m - 1, cm * am_dn(l, m), 2);
        }
    } else {
        if (l == 0) return out;  // derivative of a constant
        if (axis == 3) {
            push(out, l - 1, m, dz_c(l, m), 0);
        } else {
            cdouble cp = axis == 1 ? cdouble(0.5) : cdouble(0.0, -0.5);
            cdouble cm = axis == 1 ? cdouble(0.5) : cdouble(0.0, 0.5);
            push(out, l - 1, m + 1, cp * dp_c(l, m), 0);
            push(out, l - 1, m - 1, cm * dm_c(l, m), 0);
        }
    }
    return out;
}

}  // namespace symcalc
