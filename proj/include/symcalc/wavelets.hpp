#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <tuple>
#include <vector>

namespace symcalc {

/// Orthonormal compactly supported Daubechies wavelet with 8 vanishing
/// moments (filter length 16, support [0,15]). Provides the filter pair,
/// cascade samples of phi/psi on a dyadic grid, moments of phi, and a
/// moment-matched interpolatory quadrature rule with weight phi.
class DaubechiesWavelet {
public:
    static constexpr int kMoments = 8;
    static constexpr int kTaps = 16;
    static constexpr int kSupport = kTaps - 1;
    static constexpr int kRuleNodes = 8;

    static const std::array<double, kTaps>& lowpass();   // sum = sqrt(2)
    static std::array<double, kTaps> highpass();         // g_k = (-1)^k h_{15-k}

    static const DaubechiesWavelet& get();

    /// Piecewise-linear evaluation from cascade samples (grid 2^-12).
    double phi(double t) const;
    double psi(double t) const;

    /// int t^n phi(t) dt, exact from the refinement relation.
    double phi_moment(int n) const;

    /// Interpolatory rule with weight phi on the support, exact for
    /// polynomials of degree <= kRuleNodes-1 (the weight changes sign, so a
    /// Gauss rule with interior nodes need not exist; fixed nodes keep it real).
    const std::array<double, kRuleNodes>& rule_nodes() const { return rule_nodes_; }
    const std::array<double, kRuleNodes>& rule_weights() const { return rule_weights_; }

private:
    DaubechiesWavelet();
    std::vector<double> phi_samples_, psi_samples_;
    int grid_log2_ = 12;
    std::vector<double> moments_;
    std::array<double, kRuleNodes> rule_nodes_{}, rule_weights_{};
};

/// Hyperbolic (anisotropic tensor product) wavelet index. dim is the factor
/// dimension (1 for the 1+1 testbed, 3 for the 3+3 smoke mode); type flags
/// s are per-axis bitmasks (0 = pure scaling, allowed on the coarsest level
/// j0 only).
struct WaveletIndex {
    int dim = 1;
    int j1 = 0, j2 = 0;
    unsigned s1 = 1, s2 = 1;
    std::array<int, 3> a1{0, 0, 0};
    std::array<int, 3> a2{0, 0, 0};

    auto operator<=>(const WaveletIndex&) const = default;
};

/// Model kernel on the unit box pair, in the separated form
/// f(x, y) = box_x(x) box_y(y) profile(x - y) (1+1 reduction); the 3+3 mode
/// reuses profile radially. A pure-power exponent q with guard radius r0
/// (profile(u) = |u|^q for |u| <= r0) drives the singular-cell quadrature.
struct ModelKernel {
    std::function<double(double)> box_x, box_y;
    std::function<double(double)> profile;
    bool singular = false;
    int power = 0;          // q = -3-p for the cusp family
    double pure_radius = 0; // profile is exactly |u|^q within this radius

    double eval(double x, double y) const { return box_x(x) * box_y(y) * profile(x - y); }

    /// cusp family w(|u|) |u|^{-3-p} g(x) for symbol order p <= -4
    static ModelKernel cusp(int p);
    /// smooth control kernel exp(-width (x-y)^2) g(x) g(y)
    static ModelKernel gaussian(double width = 25.0);
    /// bare polynomial x^dx y^dy (no windows; vanishing-moment checks)
    static ModelKernel polynomial(int dx, int dy);
};

struct AnalysisOptions {
    int j0 = 0;
    int fine_extra = 3;  // fine level = j_max + fine_extra
    int threads = 0;     // 0 = hardware concurrency
};

struct CoefficientTable {
    int dim = 1;
    int j0 = 0;
    int j_max = 0;
    std::map<WaveletIndex, double> entries;
    double table_energy = 0.0;      // sum c^2 over stored entries
    double total_energy = 0.0;      // sum c^2 over the full pyramid
    double tail_energy = 0.0;       // total - table (levels above j_max)
    double quad_l2_sq = 0.0;        // independent quadrature of ||f||_{L2}^2
    double tail_energy_weighted = 0.0;
};

/// Hyperbolic coefficient table of the model kernel up to level j_max:
/// moment-matched tensor Gauss projection at the fine level (singular-line
/// cells via the exact refinable connection table), then the aperiodic
/// anisotropic DWT pyramid.
CoefficientTable analyze(const ModelKernel& f, int j_max, const AnalysisOptions& opts = {});

/// Coarse 3+3 smoke analysis: isotropic 3d-wavelet pairs with translations
/// windowed around the coalescence cell, computed by convolution-separated
/// quadrature. j_max <= 4.
CoefficientTable analyze_3p3(int p, int j_max, int window = 1);

/// Direct quadrature of one hyperbolic coefficient (route independent of the
/// pyramid; the dense-oracle building block).
double direct_coefficient(const ModelKernel& f, const WaveletIndex& idx);

struct ApproxRateReport {
    std::vector<std::size_t> N;
    std::vector<double> sigma;       // non-increasing in N
    double fitted_decay_rate = 0.0;  // alpha in sigma_N ~ N^-alpha, over the top decade
    double floor_sigma = 0.0;        // j_max truncation tail
};

/// Best-N-term errors by retaining the N largest coefficients (ell_2 mode by
/// default; weighted = the 2^{max(j1,j2)} H^1-type mode). Ties broken by
/// lexicographic index order.
ApproxRateReport best_n_term(const CoefficientTable& table, std::vector<std::size_t> N_list,
                             bool weighted = false);

struct LevelMax {
    int j1 = 0, j2 = 0;
    double max_coef = 0.0;
};

/// max |coefficient| over touching translations (support distance
/// <= 7 * 2^{-j2}) for each wavelet-wavelet level pair j1 >= j2.
std::vector<LevelMax> touching_max(const CoefficientTable& table);

/// Same quantity computed by direct quadrature per coefficient.
std::vector<LevelMax> touching_max_oracle(const ModelKernel& f, int j1_max, int j2_max, int j0 = 0);

struct TwoSlopeFit {
    double beta1 = 0.0;  // decay exponent in j1 (log2 max ~ c - beta1 j1 + beta2 j2)
    double beta2 = 0.0;
};

TwoSlopeFit fit_level_decay(const std::vector<LevelMax>& data);

struct BoundCheckReport {
    TwoSlopeFit fitted;
    TwoSlopeFit oracle;
    bool conclusive = true;  // >= 4 level pairs
    bool pass = false;       // within 15% of the oracle exponents
    std::vector<LevelMax> table_max;
    std::vector<LevelMax> oracle_max;
};

/// Fit the touching-translation coefficient decay of the table and compare
/// with the dense-oracle regression on the same level pairs.
BoundCheckReport coefficient_bound_check(const CoefficientTable& table, const ModelKernel& f,
                                         int oracle_j_max = 6);

/// Besov-threshold formula: q_min = -3/(1+p), alpha_max = 3/q_min - 3/2.
/// Domain error for p >= -1 (formula pole); intended range p <= -4.
std::pair<double, double> besov_threshold(double p);

}  // namespace symcalc
