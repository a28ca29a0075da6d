#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symcalc/angular.hpp"
#include "symcalc/symbols.hpp"
#include "symcalc/xfunction.hpp"

namespace symcalc {

/// C-infinity radial cutoff: identically 1 on [0, inner], identically 0 on
/// [outer, inf), monotone between. The transition is the normalized integral
/// of the bump exp(1 - 1/(1-u^2)).
class Cutoff {
public:
    Cutoff(double inner = 0.5, double outer = 1.0);
    double operator()(double s) const;
    double inner_radius() const { return inner_; }
    double outer_radius() const { return outer_; }

    static const Cutoff& global();

private:
    double inner_, outer_;
    std::vector<double> table_;   // transition values on a uniform grid
    std::vector<double> dtable_;  // exact derivatives at the grid points
};

/// One singular term of a kernel expansion:
///   cutoff(s) * s^power * (log s)^{has_log} * angular(theta1,phi1) * xcoef(x),
/// with s = |z|.
struct KernelTerm {
    int power = 0;
    bool has_log = false;
    AngularExpansion angular;
    XFunction xcoef;
};

/// Singular part of a diagram kernel near z = 0, tied to the symbol order p
/// it corresponds to (leading singular exponent -3-p).
struct KernelExpansion {
    int symbol_order = 0;
    std::vector<KernelTerm> terms;

    bool log_branch_empty() const;
};

/// a_{0j} = 1, a_{lj} = prod_{n=0}^{l-1} (j+l+1-2n) for l > 0.
std::int64_t a_coeff(int l, int j);

/// Same product shifted for the potential-map reduction:
/// prod_{n=0}^{l-1} (j+l-2n)  (equals a_{l,j-1} for j >= 1).
std::int64_t a_coeff_potential(int l, int j);

/// Independent recurrence engine: symbolically iterates the spherical Bessel
/// recurrence on int j_l(eta s) f(s) s^{P} ds, reducing l to 0 and returning
/// the accumulated integer factor. With P = j+2 this regenerates a_coeff.
std::int64_t bessel_recurrence_factor(int l, int P);

/// Forward map for a non-logarithmic kernel term (kernel power j):
/// j = 0 gives the smoothing class (nullopt); j > 0 gives the degree -3-j
/// homogeneous term. Components with j - l even are smoothing and drop out.
/// Throws constraint_error-style domain_error naming the offending (l,m) if
/// the input violates l <= j (or, for log terms, j - l even).
std::optional<HomogeneousTerm> symbol_from_kernel_term(const KernelTerm& t);

/// Forward map for the short-range effective interaction (kernel power j-1):
/// degree -2-j homogeneous term with weights a_coeff_potential * (j-l)! and
/// per-component phase (-1)^l i^j. Coefficients may be present only for
/// l <= j with j - l even.
HomogeneousTerm potential_symbol(int j, const std::map<AngularIndex, XFunction>& v_coeffs);

/// Inverse map: singular kernel expansion of a homogeneous symbol of degree
/// < -3. Non-log terms appear at exponent J = -3-degree for components with
/// J - l odd; components with J - l even go to the log branch.
KernelExpansion kernel_from_symbol(const HomogeneousTerm& t);
KernelExpansion kernel_from_symbol(const ClassicalSymbol& s);

/// ---- oscillatory-integral oracle ------------------------------------------

/// Regularized radial moment int_0^inf j_l(eta s) s^P (log s)^klog ds in the
/// Abel sense (the distributional transform of the singular part): partial
/// sums over half-period panels with iterated averaging of the tail.
double bessel_power_moment(int l, int P, double eta, int klog = 0);

/// Same moment from the Weber-Schafheitlin closed form (log case by the
/// derivative of the Gamma quotient). Independent cross-check of the above.
double bessel_power_moment_closed(int l, int P, double eta, int klog = 0);

enum class OracleMode {
    singular_part,  // regularized transform of the pure singular profile
    with_cutoff     // direct quadrature of the cutoff kernel on [0, outer]
};

/// sigma(x, eta) = int e^{-i z.eta} k(x, z) dz for a kernel expansion,
/// computed channel-by-channel via spherical-harmonic projection plus radial
/// quadrature. Ground truth for the closed-form maps (singular_part mode).
cdouble oscillatory_oracle(const KernelExpansion& k, const vec3& x, const vec3& eta,
                           OracleMode mode = OracleMode::singular_part);
cdouble oscillatory_oracle(const KernelTerm& t, const vec3& x, const vec3& eta,
                           OracleMode mode = OracleMode::singular_part);

/// Generic callable-kernel oracle: projects k(z) onto Y_lm by sphere
/// quadrature (degrees up to l_max), then integrates each radial channel
/// adaptively over [0, cutoff outer radius].
cdouble oscillatory_oracle(const std::function<double(const vec3&)>& kernel, const vec3& eta,
                           int l_max);

/// ---- asymptotic smoothness -------------------------------------------------

/// Predicted growth exponent -3-p-|alpha|-N of the asymptotic-smoothness
/// bounds; nullopt flags the bounded regime |alpha| <= -3-p (checked with N).
std::optional<int> smoothness_exponent(int p, int alpha_order, int N);

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// Fit log2|f| vs log2 scale by least squares (dyadic-shell regression oracle).
SlopeFit fit_loglog(const std::vector<double>& scales, const std::vector<double>& values);

/// Sample max |d^alpha k| of the model cusp kernel |z|^{-3-p} on dyadic
/// shells |z| = 2^{-i}, i in [i0, i1], via central differences along axis 3,
/// and fit the log-log slope.
SlopeFit dyadic_derivative_slope(int p, int alpha_order, int i0 = 4, int i1 = 10);

/// ---- model symbols -----------------------------------------------------------

/// Parity-valid model pair-amplitude symbol in S^-4: forward-mapped cusp
/// kernel terms of powers 1..orders with mixed angular content.
ClassicalSymbol model_amplitude_symbol(int orders);

/// Model short-range interaction symbol in S^-2 built from potential_symbol
/// terms j = 0..orders-1.
ClassicalSymbol model_potential_symbol(int orders);

/// ---- serialization ----------------------------------------------------------

/// "symcalc-kernel/1" JSON (exponent-sorted, log flag, angular map,
/// x-coefficient descriptor).
std::string to_json(const KernelExpansion& k);
KernelExpansion kernel_from_json(const std::string& text);

}  // namespace symcalc
