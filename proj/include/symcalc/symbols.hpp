#pragma once

#include <map>
#include <string>
#include <vector>

#include "symcalc/angular.hpp"
#include "symcalc/xfunction.hpp"

namespace symcalc {

/// Homogeneity of the symbol representation is only claimed for |eta| >= this.
inline constexpr double kEtaCutoff = 1.0;

/// One order of a classical symbol:
///   term(x, eta) = eta^degree * sum_{lm} f_lm(x) Y_lm(Theta, Phi),
/// i.e. sum_{lm} f_lm(x) eta^{degree-l} Z_lm(eta). parity_index records the
/// nominal expansion index n of the orthogonality constraint (stored (l,m)
/// must satisfy l <= n with n-l even); -1 marks an unconstrained term.
struct HomogeneousTerm {
    int degree = 0;
    int parity_index = -1;
    std::map<AngularIndex, XFunction> angular;

    bool empty() const;
    void add_component(AngularIndex idx, const XFunction& f);
    /// Structural orthogonality check against the recorded parity_index.
    bool parity_structural_ok() const;
};

/// Truncated classical symbol: terms of degrees p, p-1, ..., p-N+1 with no
/// gaps (absent orders stored as empty terms). The smoothing ideal S^-infty is
/// the all-empty symbol.
struct ClassicalSymbol {
    int leading_order = 0;
    std::vector<HomogeneousTerm> terms;

    int truncation_order() const { return static_cast<int>(terms.size()); }
    bool all_empty() const;
    /// Structural invariant: degrees descend by one from leading_order.
    bool degrees_consistent() const;
};

/// Symbol with N empty terms at leading order p (term k gets parity index k).
ClassicalSymbol make_symbol(int leading_order, int orders);

ClassicalSymbol add(const ClassicalSymbol& a, const ClassicalSymbol& b);
ClassicalSymbol scale(const ClassicalSymbol& a, cdouble s);

/// eta-derivative: degree drops by one, parity index shifts j -> j+1.
HomogeneousTerm d_eta(const HomogeneousTerm& t, int axis);
/// x-derivative: degree and parity preserved, coefficients differentiated.
HomogeneousTerm d_x(const HomogeneousTerm& t, int axis);

/// Product of homogeneous terms (degrees and parity indices add; angular
/// parts multiply through the Gaunt expansion).
HomogeneousTerm multiply_terms(const HomogeneousTerm& a, const HomogeneousTerm& b);

/// Asymptotic Leibniz product
///   sum_alpha (2 pi i)^{-|alpha|} (alpha!)^{-1} d_eta^alpha a . d_x^alpha b,
/// collected by homogeneity degree, truncated to `orders` output terms.
/// Throws if either input covers fewer than `orders` orders.
ClassicalSymbol leibniz_product(const ClassicalSymbol& a, const ClassicalSymbol& b, int orders);

cdouble eval_term(const HomogeneousTerm& t, const vec3& x, const vec3& eta);

/// Evaluate the truncated symbol at (x, eta); |eta| below the homogeneity
/// cutoff is a domain error. Imaginary residue above 1e-12 relative is an
/// error (use eval_complex for intrinsically complex symbols).
double eval(const ClassicalSymbol& s, const vec3& x, const vec3& eta);
cdouble eval_complex(const ClassicalSymbol& s, const vec3& x, const vec3& eta);

struct ParityTermReport {
    int degree = 0;
    int parity_index = -1;
    bool structural_ok = true;
    double max_violation = 0.0;  // numeric projection onto forbidden Y_lm
    bool pass = true;
};

struct ParityReport {
    std::vector<ParityTermReport> terms;
    bool all_pass = true;
};

/// Structural + numeric (quadrature against Y_lm) orthogonality verification.
ParityReport check_parity(const ClassicalSymbol& s);

/// Canonical JSON document, format "symcalc-symbol/1" (degree-sorted terms,
/// lexicographic (l,m) order).
std::string to_json(const ClassicalSymbol& s);
ClassicalSymbol symbol_from_json(const std::string& text);

}  // namespace symcalc
