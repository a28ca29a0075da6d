#pragma once

#include <complex>
#include <map>
#include <optional>
#include <vector>

namespace symcalc {

using cdouble = std::complex<double>;

/// Highest angular momentum degree supported by the harmonic algebra.
inline constexpr int kLMax = 24;

/// Coefficients below this magnitude are stripped by normal form.
inline constexpr double kAngularEps = 1e-13;

struct AngularIndex {
    int l = 0;
    int m = 0;

    bool valid() const { return l >= 0 && l <= kLMax && std::abs(m) <= l; }
    auto operator<=>(const AngularIndex&) const = default;
};

enum class ParityClass { unconstrained, even_with_j, odd_with_j };

/// Finite expansion sum_{lm} c_lm Y_lm, kept in normal form (no stored zero
/// coefficients). An optional parity tag records the constraint of
/// the orthogonality relations: every stored (l,m) must satisfy l <= j and
/// j - l even (resp. odd).
class AngularExpansion {
public:
    AngularExpansion() = default;

    ParityClass parity_class = ParityClass::unconstrained;
    int reference_j = -1;

    const std::map<AngularIndex, cdouble>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }

    void set(AngularIndex idx, cdouble c);
    void add(AngularIndex idx, cdouble c);
    cdouble coeff(AngularIndex idx) const;

    /// Evaluate sum c_lm Y_lm(theta,phi).
    cdouble eval(double theta, double phi) const;

    /// True if all stored indices satisfy the recorded parity constraint.
    bool parity_consistent() const;

    AngularExpansion& operator*=(cdouble s);
    AngularExpansion& operator+=(const AngularExpansion& other);

private:
    std::map<AngularIndex, cdouble> terms_;
};

/// Complex spherical harmonic with Condon-Shortley phase,
/// conj(Y_lm) = (-1)^m Y_{l,-m}, orthonormal on the sphere.
cdouble eval_sph_harm(AngularIndex idx, double theta, double phi);

/// Product expansion Y_a * Y_b = sum_LM C_LM Y_LM. Coefficients are real;
/// nonzero only for |l_a-l_b| <= L <= l_a+l_b with l_a+l_b-L even and
/// M = m_a+m_b. Computed by product-Gauss quadrature (exact for band-limited
/// integrands).
AngularExpansion gaunt_expand(AngularIndex a, AngularIndex b);

enum class SolidOp { multiply_by_component, differentiate_component };

/// One term of a solid-harmonic decomposition: coeff * eta^{eta_power} * Z_{idx}.
struct SolidTerm {
    AngularIndex idx;
    cdouble coeff;
    int eta_power;  // 0 or 2 for multiply, 0 for differentiate
};

/// Decompose eta_axis * Z_lm (multiply) or d/d eta_axis Z_lm (differentiate)
/// over solid harmonics Z_{l'm'} = eta^{l'} Y_{l'm'}, axis in {1,2,3}.
/// Multiplication shifts l -> l+-1 (the l-1 component carries eta^2);
/// differentiation lands on l-1 only. Differentiating Z_00 gives an empty
/// decomposition.
std::vector<SolidTerm> solid_harmonic_decompose(SolidOp op, int axis, AngularIndex idx);

}  // namespace symcalc
