#pragma once

#include <array>
#include <complex>
#include <vector>

namespace symcalc {

using cdouble = std::complex<double>;
using vec3 = std::array<double, 3>;

/// Smooth coefficient function on R^3: a finite sum of terms
///   coeff * x^nu * exp(-width |x - center|^2).
/// The family is closed under partial differentiation, pointwise product and
/// complex-linear combinations; all members and their derivatives are bounded
/// (width = 0 is permitted only for the constant term nu = 0).
class XFunction {
public:
    struct Term {
        std::array<int, 3> nu{0, 0, 0};
        double width = 0.0;
        vec3 center{0.0, 0.0, 0.0};
        cdouble coeff = 0.0;
    };

    XFunction() = default;

    static XFunction constant(cdouble c);
    static XFunction gaussian(cdouble c, double width, vec3 center = {0, 0, 0},
                              std::array<int, 3> nu = {0, 0, 0});

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    cdouble eval(const vec3& x) const;

    XFunction derivative(int axis) const;  // axis in 1..3
    XFunction operator+(const XFunction& o) const;
    XFunction operator*(const XFunction& o) const;
    XFunction operator*(cdouble s) const;
    XFunction& operator+=(const XFunction& o);

    /// Largest |coeff| over terms (cheap magnitude proxy).
    double max_abs_coeff() const;

private:
    void append(const Term& t);
    std::vector<Term> terms_;
};

}  // namespace symcalc
