#include "symcalc/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "symcalc/bessel.hpp"
#include "symcalc/quadrature.hpp"

namespace symcalc {

namespace {

double bump(double u) {
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

// i^k for integer k (negative allowed)
cdouble ipow(int k) {
    switch (((k % 4) + 4) % 4) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
    }
}

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace

Cutoff::Cutoff(double inner, double outer) : inner_(inner), outer_(outer) {
    if (!(0.0 < inner && inner < outer))
        throw std::invalid_argument("Cutoff: need 0 < inner < outer");
    const int n = 2048;
    double norm = panel_integrate([](double u) { return bump(u); }, -1.0, 1.0, 32, 16);
    table_.assign(n + 1, 0.0);
    dtable_.assign(n + 1, 0.0);
    double du = 2.0 / n;
    table_[n] = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        double u0 = -1.0 + i * du, u1 = u0 + du;
        table_[i] = table_[i + 1] +
                    gauss_integrate([](double u) { return bump(u); }, u0, u1, 16) / norm;
    }
    double dudx = 2.0 / (outer_ - inner_);
    for (int i = 0; i <= n; ++i) dtable_[i] = -bump(-1.0 + i * du) / norm * dudx;
}

double Cutoff::operator()(double s) const {
    if (s <= inner_) return 1.0;
    if (s >= outer_) return 0.0;
    double u = (s - inner_) / (outer_ - inner_) * 2.0 - 1.0;
    int n = static_cast<int>(table_.size()) - 1;
    double t = (u + 1.0) / 2.0 * n;
    int i = std::min(static_cast<int>(t), n - 1);
    double f = t - i;
    double h = (outer_ - inner_) / n;  // grid spacing in s
    double v0 = table_[i], v1 = table_[i + 1];
    double d0 = dtable_[i] * h, d1 = dtable_[i + 1] * h;
    double f2 = f * f, f3 = f2 * f;
    return (2 * f3 - 3 * f2 + 1) * v0 + (f3 - 2 * f2 + f) * d0 + (-2 * f3 + 3 * f2) * v1 +
           (f3 - f2) * d1;
}

const Cutoff& Cutoff::global() {
    static Cutoff c(0.5, 1.0);
    return c;
}

bool KernelExpansion::log_branch_empty() const {
    for (const auto& t : terms)
        if (t.has_log && !t.angular.empty() && !t.xcoef.is_zero()) return false;
    return true;
}

std::int64_t a_coeff(int l, int j) {
    if (l < 0 || j < 0) throw std::domain_error("a_coeff: negative index");
    std::int64_t p = 1;
    for (int n = 0; n < l; ++n) p *= (j + l + 1 - 2 * n);
    return p;
}

std::int64_t a_coeff_potential(int l, int j) {
    if (l < 0 || j < 0) throw std::domain_error("a_coeff_potential: negative index");
    std::int64_t p = 1;
    for (int n = 0; n < l; ++n) p *= (j + l - 2 * n);
    return p;
}

std::int64_t bessel_recurrence_factor(int l, int P) {
    // j_l(eta s) = -(1/eta) d/ds j_{l-1}(eta s) + ((l-1)/(eta s)) j_{l-1}(eta s)
    // against f = s^P: one step yields factor (P + l - 1) and (l, P) -> (l-1, P-1),
    // modulo cutoff-derivative terms in S^-infty.
    std::int64_t factor = 1;
    while (l > 0) {
        factor *= (P + l - 1);
        --l;
        --P;
    }
    return factor;
}

namespace {

// Per-component symbol weights of the three closed-form maps (excluding the
// common v(x) and eta power). Derived from the plane-wave expansion
// e^{-iz.eta} = 4pi sum (-i)^l j_l Ybar_lm(zhat) Y_lm(etahat), the Bessel
// recurrence, and the regularized sine/log moments.
cdouble nonlog_weight(int l, int j) {
    // 4pi (-i)^l i^{j-l+1} a_lj (j-l+1)!   (j-l odd)
    return 4.0 * std::numbers::pi * ipow(-l) * ipow(j - l + 1) *
           static_cast<double>(a_coeff(l, j)) * factorial(j - l + 1);
}

cdouble log_weight(int l, int j) {
    // 4pi (-i)^l (-1)^{(j-l+2)/2} (pi/2) a_lj (j-l+1)!   (j-l even)
    double sign = ((j - l + 2) / 2) % 2 == 0 ? 1.0 : -1.0;
    return 4.0 * std::numbers::pi * ipow(-l) * sign * (std::numbers::pi / 2.0) *
           static_cast<double>(a_coeff(l, j)) * factorial(j - l + 1);
}

cdouble potential_weight(int l, int j) {
    // 4pi (-i)^l i^{j-l} a^pot_lj (j-l)!   (j-l even)
    return 4.0 * std::numbers::pi * ipow(-l) * ipow(j - l) *
           static_cast<double>(a_coeff_potential(l, j)) * factorial(j - l);
}

[[noreturn]] void constraint_error(const char* what, AngularIndex idx) {
    throw std::domain_error(std::string(what) + " violated at (l,m)=(" + std::to_string(idx.l) +
                            "," + std::to_string(idx.m) + ")");
}

}  // namespace

std::optional<HomogeneousTerm> symbol_from_kernel_term(const KernelTerm& t) {
    int j = t.power;
    if (j < 0) throw std::domain_error("symbol_from_kernel_term: amplitude power must be >= 0");
    if (t.has_log && j < 1)
        throw std::domain_error("symbol_from_kernel_term: log terms require power >= 1");
    for (const auto& [idx, c] : t.angular.terms()) {
        (void)c;
        if (idx.l > j) constraint_error("orthogonality constraint l <= j", idx);
        if (t.has_log && (j - idx.l) % 2 != 0)
            constraint_error("log-term constraint j - l even", idx);
    }
    if (!t.has_log && j == 0) return std::nullopt;  // smoothing class

    HomogeneousTerm out;
    out.degree = -3 - j;
    out.parity_index = t.has_log ? j : j - 1;
    for (const auto& [idx, c] : t.angular.terms()) {
        if ((j - idx.l) % 2 == (t.has_log ? 1 : 0)) continue;  // smoothing component
        cdouble w = (t.has_log ? log_weight(idx.l, j) : nonlog_weight(idx.l, j)) * c;
        out.add_component(idx, t.xcoef * w);
    }
    if (!t.has_log && out.angular.empty() && !t.angular.empty()) {
        // all components were of smoothing parity
        return std::nullopt;
    }
    return out;
}

HomogeneousTerm potential_symbol(int j, const std::map<AngularIndex, XFunction>& v_coeffs) {
    if (j < 0) throw std::domain_error("potential_symbol: j must be >= 0");
    for (const auto& [idx, f] : v_coeffs) {
        (void)f;
        if (idx.l > j || (j - idx.l) % 2 != 0)
            constraint_error("potential constraint l <= j with j - l even", idx);
    }
    HomogeneousTerm out;
    out.degree = -2 - j;
    out.parity_index = j;
    for (const auto& [idx, f] : v_coeffs) out.add_component(idx, f * potential_weight(idx.l, j));
    return out;
}

KernelExpansion kernel_from_symbol(const HomogeneousTerm& t) {
    if (t.degree >= -3)
        throw std::domain_error("kernel_from_symbol: requires degree < -3 (absolute convergence)");
    int J = -3 - t.degree;  // kernel exponent j - p - 3
    KernelExpansion out;
    out.symbol_order = t.degree;  // leading interpretation: j = 0
    for (const auto& [idx, f] : t.angular) {
        if (idx.l > J) constraint_error("kernel_from_symbol: component not invertible, l > exponent", idx);
        KernelTerm kt;
        kt.power = J;
        kt.has_log = (J - idx.l) % 2 == 0;
        cdouble w = kt.has_log ? log_weight(idx.l, J) : nonlog_weight(idx.l, J);
        kt.angular.set(idx, 1.0);
        kt.xcoef = f * (1.0 / w);
        out.terms.push_back(std::move(kt));
    }
    std::sort(out.terms.begin(), out.terms.end(), [](const KernelTerm& a, const KernelTerm& b) {
        auto ka = std::tuple(a.power, a.has_log, a.angular.terms().begin()->first);
        auto kb = std::tuple(b.power, b.has_log, b.angular.terms().begin()->first);
        return ka < kb;
    });
    return out;
}

KernelExpansion kernel_from_symbol(const ClassicalSymbol& s) {
    KernelExpansion out;
    out.symbol_order = s.leading_order;
    for (const auto& t : s.terms) {
        if (t.empty()) continue;
        KernelExpansion part = kernel_from_symbol(t);
        for (auto& kt : part.terms) out.terms.push_back(std::move(kt));
    }
    return out;
}

double bessel_power_moment(int l, int P, double eta, int klog) {
    if (eta <= 0.0) throw std::domain_error("bessel_power_moment: eta must be positive");
    auto f = [&](double s) {
        double v = sph_bessel_jl(l, eta * s) * std::pow(s, P);
        for (int k = 0; k < klog; ++k) v *= std::log(s);
        return v;
    };
    const double half_period = std::numbers::pi / eta;
    const int npanels = 2 * (P + l) + 48;
    std::vector<double> partial(npanels);
    double acc = 0.0;
    for (int n = 0; n < npanels; ++n) {
        acc += gauss_integrate(f, n * half_period, (n + 1) * half_period, 16);
        partial[n] = acc;
    }
    // iterated averaging of the oscillating partial sums (Euler summation of
    // the Abel-regularized tail)
    std::vector<double> v(partial.begin() + 8, partial.end());
    int passes = P + l + 6;
    for (int pass = 0; pass < passes && v.size() > 2; ++pass) {
        for (size_t i = 0; i + 1 < v.size(); ++i) v[i] = 0.5 * (v[i] + v[i + 1]);
        v.pop_back();
    }
    return v[v.size() / 2];
}

namespace {

// digamma via upward shift + asymptotic series
double digamma(double x) {
    double acc = 0.0;
    while (x < 8.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    double inv = 1.0 / x, inv2 = inv * inv;
    return acc + std::log(x) - 0.5 * inv -
           inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 / 240)));
}

// Gamma(z) for z off the poles, with sign (via reflection for z < 0)
double gamma_signed(double z) {
    if (z > 0) return std::tgamma(z);
    // Gamma(z) = pi / (sin(pi z) Gamma(1-z))
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * std::tgamma(1.0 - z));
}

}  // namespace

double bessel_power_moment_closed(int l, int P, double eta, int klog) {
    // int_0^inf j_l(x) x^P dx = 2^{P-1} sqrt(pi) Gamma((l+P+1)/2) / Gamma((l-P+2)/2)
    double a = (l + P + 1) / 2.0;
    double b = (l - P + 2) / 2.0;
    bool b_pole = b <= 0.0 && std::abs(b - std::round(b)) < 1e-12;
    double front = std::pow(2.0, P - 1) * std::sqrt(std::numbers::pi) * std::tgamma(a);
    double scale = std::pow(eta, -(P + 1.0));
    if (klog == 0) {
        if (b_pole) return 0.0;
        return front / gamma_signed(b) * scale;
    }
    if (klog != 1) throw std::invalid_argument("bessel_power_moment_closed: klog must be 0 or 1");
    // d/dP of the moment: with x = eta s the log picks up -log(eta) plus the
    // derivative of the Gamma quotient.
    if (b_pole) {
        // 1/Gamma(b) ~ (-1)^k k! (b + k) near b = -k; d b/dP = -1/2
        int k = static_cast<int>(std::round(-b));
        double dinv = ((k % 2 == 0) ? 1.0 : -1.0) * factorial(k) * (-0.5);
        return front * dinv * scale;
    }
    double val = front / gamma_signed(b) * scale;
    return val * (std::numbers::ln2 + 0.5 * digamma(a) + 0.5 * digamma(b) - std::log(eta));
}

namespace {

double radial_cutoff_integral(int l, int P, int klog, double eta) {
    const Cutoff& w = Cutoff::global();
    auto f = [&](double s) {
        double v = sph_bessel_jl(l, eta * s) * std::pow(s, P) * w(s);
        for (int k = 0; k < klog; ++k) v *= std::log(s);
        return v;
    };
    int panels = std::max(48, static_cast<int>(4.0 * eta * w.outer_radius() / std::numbers::pi) + 8);
    return panel_integrate(f, 0.0, w.outer_radius(), panels, 12);
}

cdouble oracle_term(const KernelTerm& t, const vec3& x, const vec3& eta_vec, OracleMode mode) {
    double eta = std::sqrt(eta_vec[0] * eta_vec[0] + eta_vec[1] * eta_vec[1] + eta_vec[2] * eta_vec[2]);
    if (eta <= 0.0) throw std::domain_error("oscillatory_oracle: eta = 0");
    double Theta = std::acos(std::clamp(eta_vec[2] / eta, -1.0, 1.0));
    double Phi = std::atan2(eta_vec[1], eta_vec[0]);
    cdouble vx = t.xcoef.eval(x);
    cdouble sum = 0.0;
    int klog = t.has_log ? 1 : 0;
    for (const auto& [idx, c] : t.angular.terms()) {
        double radial = mode == OracleMode::singular_part
                            ? bessel_power_moment(idx.l, t.power + 2, eta, klog)
                            : radial_cutoff_integral(idx.l, t.power + 2, klog, eta);
        sum += ipow(-idx.l) * c * eval_sph_harm(idx, Theta, Phi) * radial;
    }
    return 4.0 * std::numbers::pi * vx * sum;
}

}  // namespace

cdouble oscillatory_oracle(const KernelTerm& t, const vec3& x, const vec3& eta,
                           OracleMode mode) {
    return oracle_term(t, x, eta, mode);
}

cdouble oscillatory_oracle(const KernelExpansion& k, const vec3& x, const vec3& eta,
                           OracleMode mode) {
    cdouble sum = 0.0;
    for (const auto& t : k.terms) sum += oracle_term(t, x, eta, mode);
    return sum;
}

cdouble oscillatory_oracle(const std::function<double(const vec3&)>& kernel, const vec3& eta_vec,
                           int l_max) {
    double eta = std::sqrt(eta_vec[0] * eta_vec[0] + eta_vec[1] * eta_vec[1] + eta_vec[2] * eta_vec[2]);
    if (eta <= 0.0) throw std::domain_error("oscillatory_oracle: eta = 0");
    double Theta = std::acos(std::clamp(eta_vec[2] / eta, -1.0, 1.0));
    double Phi = std::atan2(eta_vec[1], eta_vec[0]);
    const Cutoff& w = Cutoff::global();
    const auto& sphere = SphereQuadrature::for_lmax(l_max);
    const double outer = w.outer_radius();

    // radial panels resolving the oscillation
    int panels = std::max(48, static_cast<int>(4.0 * eta * outer / std::numbers::pi) + 8);
    const auto& gl = GaussLegendre::get(12);
    double h = outer / panels;
    std::map<AngularIndex, cdouble> acc;
    for (int p = 0; p < panels; ++p) {
        for (int q = 0; q < 12; ++q) {
            double s = (p + 0.5 * (1.0 + gl.nodes[q])) * h;
            double wrad = 0.5 * h * gl.weights[q] * s * s;
            // project the kernel on this shell
            for (int l = 0; l <= l_max; ++l) {
                double jl = sph_bessel_jl(l, eta * s) * wrad;
                if (jl == 0.0) continue;
                for (int m = -l; m <= l; ++m) {
                    cdouble proj = 0.0;
                    for (const auto& node : sphere.nodes) {
                        vec3 z{s * std::sin(node.theta) * std::cos(node.phi),
                               s * std::sin(node.theta) * std::sin(node.phi),
                               s * std::cos(node.theta)};
                        proj += node.weight * kernel(z) *
                                std::conj(eval_sph_harm({l, m}, node.theta, node.phi));
                    }
                    acc[{l, m}] += proj * jl;
                }
            }
        }
    }
    cdouble sum = 0.0;
    for (const auto& [idx, v] : acc)
        sum += ipow(-idx.l) * v * eval_sph_harm(idx, Theta, Phi);
    return 4.0 * std::numbers::pi * sum;
}

std::optional<int> smoothness_exponent(int p, int alpha_order, int N) {
    if (alpha_order < 0 || N < 0) throw std::domain_error("smoothness_exponent: negative order");
    int e = -3 - p - alpha_order - N;
    if (alpha_order <= -3 - p || e >= 0) return std::nullopt;  // bounded regime
    return e;
}

SlopeFit fit_loglog(const std::vector<double>& scales, const std::vector<double>& values) {
    if (scales.size() != values.size() || scales.size() < 2)
        throw std::invalid_argument("fit_loglog: need >= 2 samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (size_t i = 0; i < scales.size(); ++i) {
        if (values[i] <= 0.0 || scales[i] <= 0.0) continue;
        double lx = std::log2(scales[i]), ly = std::log2(values[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw std::invalid_argument("fit_loglog: too few positive samples");
    SlopeFit fit;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

SlopeFit dyadic_derivative_slope(int p, int alpha_order, int i0, int i1) {
    // model cusp kernel |z|^{-3-p} on the shell |z| = r, differentiated
    // transversally (axis 1 at z = r e_3), where the radial profile is not
    // polynomial and the shell maximum scales like r^{-3-p-|alpha|}
    int q = -3 - p;
    std::vector<double> scales, values;
    for (int i = i0; i <= i1; ++i) {
        double r = std::pow(2.0, -i);
        double h = r / 16.0;
        int a = alpha_order;
        double acc = 0.0;
        for (int k = 0; k <= a; ++k) {
            double binom = 1.0;
            for (int t = 0; t < k; ++t) binom = binom * (a - t) / (t + 1);
            double sign = (k % 2 == 0) ? 1.0 : -1.0;
            double z1 = (a / 2.0 - k) * h;
            acc += sign * binom * std::pow(z1 * z1 + r * r, 0.5 * q);
        }
        double deriv = std::abs(acc / std::pow(h, a));
        scales.push_back(r);
        values.push_back(deriv);
    }
    return fit_loglog(scales, values);
}

ClassicalSymbol model_amplitude_symbol(int orders) {
    ClassicalSymbol s = make_symbol(-4, orders);
    for (int k = 0; k < orders; ++k) {
        KernelTerm t;
        t.power = k + 1;  // kernel exponent j; forward map lands at degree -4-k
        int l0 = k % 2;
        t.angular.set({l0, 0}, 1.0);
        if (k >= l0 + 2) t.angular.add({l0 + 2, 1}, 0.5);
        t.xcoef = XFunction::gaussian(1.0, 1.0, {0.1 * k, 0.0, -0.05 * k});
        auto term = symbol_from_kernel_term(t);
        if (term) s.terms[k] = std::move(*term);
    }
    return s;
}

ClassicalSymbol model_potential_symbol(int orders) {
    ClassicalSymbol s = make_symbol(-2, orders);
    for (int k = 0; k < orders; ++k) {
        std::map<AngularIndex, XFunction> v;
        int l0 = k % 2;
        v.emplace(AngularIndex{l0, 0}, XFunction::gaussian(1.0, 0.5, {0.0, 0.05 * k, 0.0}));
        if (k >= l0 + 2)
            v.emplace(AngularIndex{l0 + 2, -1}, XFunction::gaussian(0.25, 0.75, {0.1, 0.0, 0.0}));
        s.terms[k] = potential_symbol(k, v);
    }
    return s;
}

namespace {

nlohmann::json xf_json(const XFunction& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : f.terms())
        terms.push_back({{"nu", t.nu},
                         {"width", t.width},
                         {"center", t.center},
                         {"coeff", {t.coeff.real(), t.coeff.imag()}}});
    return terms;
}

XFunction xf_from(const nlohmann::json& j) {
    XFunction f;
    for (const auto& t : j) {
        std::array<int, 3> nu = t.at("nu");
        vec3 center = t.at("center");
        f += XFunction::gaussian(cdouble(t.at("coeff")[0].get<double>(), t.at("coeff")[1].get<double>()),
                                 t.at("width"), center, nu);
    }
    return f;
}

}  // namespace

std::string to_json(const KernelExpansion& k) {
    nlohmann::json j;
    j["format"] = "symcalc-kernel/1";
    j["symbol_order"] = k.symbol_order;
    auto sorted = k.terms;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const KernelTerm& a, const KernelTerm& b) {
                         return std::tuple(a.power, a.has_log) < std::tuple(b.power, b.has_log);
                     });
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : sorted) {
        nlohmann::json jt;
        jt["power"] = t.power;
        jt["log"] = t.has_log;
        nlohmann::json ang = nlohmann::json::array();
        for (const auto& [idx, c] : t.angular.terms())
            ang.push_back({{"l", idx.l}, {"m", idx.m}, {"coeff", {c.real(), c.imag()}}});
        jt["angular"] = ang;
        jt["xcoef"] = xf_json(t.xcoef);
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j.dump(2);
}

KernelExpansion kernel_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format") != "symcalc-kernel/1")
        throw std::runtime_error("kernel_from_json: unknown format tag");
    KernelExpansion k;
    k.symbol_order = j.at("symbol_order");
    for (const auto& jt : j.at("terms")) {
        KernelTerm t;
        t.power = jt.at("power");
        t.has_log = jt.at("log");
        for (const auto& ja : jt.at("angular"))
            t.angular.set({ja.at("l"), ja.at("m")},
                          cdouble(ja.at("coeff")[0].get<double>(), ja.at("coeff")[1].get<double>()));
        t.xcoef = xf_from(jt.at("xcoef"));
        k.terms.push_back(std::move(t));
    }
    return k;
}

}  // namespace symcalc
