#include "symcalc/xfunction.hpp"

#include <cmath>
#include <stdexcept>

namespace symcalc {

namespace {
constexpr double kCoeffEps = 1e-15;
}

XFunction XFunction::constant(cdouble c) {
    XFunction f;
    f.append({{0, 0, 0}, 0.0, {0, 0, 0}, c});
    return f;
}

XFunction XFunction::gaussian(cdouble c, double width, vec3 center, std::array<int, 3> nu) {
    if (width < 0.0) throw std::invalid_argument("XFunction: negative Gaussian width");
    if (width == 0.0 && (nu[0] || nu[1] || nu[2]))
        throw std::invalid_argument("XFunction: unbounded monomial term (width 0 with nu != 0)");
    XFunction f;
    f.append({nu, width, center, c});
    return f;
}

void XFunction::append(const Term& t) {
    if (std::abs(t.coeff) < kCoeffEps) return;
    for (auto& u : terms_) {
        if (u.nu == t.nu && u.width == t.width && u.center == t.center) {
            u.coeff += t.coeff;
            if (std::abs(u.coeff) < kCoeffEps) {
                u = terms_.back();
                terms_.pop_back();
            }
            return;
        }
    }
    terms_.push_back(t);
}

cdouble XFunction::eval(const vec3& x) const {
    cdouble sum = 0.0;
    for (const auto& t : terms_) {
        double mono = 1.0, r2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            for (int k = 0; k < t.nu[a]; ++k) mono *= x[a];
            double d = x[a] - t.center[a];
            r2 += d * d;
        }
        sum += t.coeff * mono * std::exp(-t.width * r2);
    }
    return sum;
}

XFunction XFunction::derivative(int axis) const {
    if (axis < 1 || axis > 3) throw std::invalid_argument("XFunction::derivative: axis must be 1..3");
    int a = axis - 1;
    XFunction out;
    for (const auto& t : terms_) {
        // d/dx_a [x^nu e^{-w|x-c|^2}] = nu_a x^{nu-e_a} e - 2w x^{nu+e_a} e + 2w c_a x^nu e
        if (t.nu[a] > 0) {
            Term d = t;
            d.coeff *= static_cast<double>(t.nu[a]);
            --d.nu[a];
            out.append(d);
        }
        if (t.width != 0.0) {
            Term up = t;
            up.coeff *= -2.0 * t.width;
            ++up.nu[a];
            out.append(up);
            if (t.center[a] != 0.0) {
                Term same = t;
                same.coeff *= 2.0 * t.width * t.center[a];
                out.append(same);
            }
        }
    }
    return out;
}

XFunction XFunction::operator+(const XFunction& o) const {
    XFunction out = *this;
    for (const auto& t : o.terms_) out.append(t);
    return out;
}

XFunction& XFunction::operator+=(const XFunction& o) {
    for (const auto& t : o.terms_) append(t);
    return *this;
}

XFunction XFunction::operator*(const XFunction& o) const {
    XFunction out;
    for (const auto& s : terms_) {
        for (const auto& t : o.terms_) {
            Term p;
            p.coeff = s.coeff * t.coeff;
            for (int a = 0; a < 3; ++a) p.nu[a] = s.nu[a] + t.nu[a];
            double w = s.width + t.width;
            p.width = w;
            if (w == 0.0) {
                p.center = {0, 0, 0};
            } else {
                double cross = 0.0;
                for (int a = 0; a < 3; ++a) {
                    p.center[a] = (s.width * s.center[a] + t.width * t.center[a]) / w;
                    double d = s.center[a] - t.center[a];
                    cross += d * d;
                }
                p.coeff *= std::exp(-s.width * t.width / w * cross);
            }
            out.append(p);
        }
    }
    return out;
}

XFunction XFunction::operator*(cdouble s) const {
    XFunction out;
    for (auto t : terms_) {
        t.coeff *= s;
        out.append(t);
    }
    return out;
}

double XFunction::max_abs_coeff() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.coeff));
    return m;
}

}  // namespace symcalc
