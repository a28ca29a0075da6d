#include "symcalc/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace symcalc {

namespace {

// Newton iteration on P_n with the Chebyshev-like initial guess.
GaussLegendre compute_gl(int n) {
    GaussLegendre rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return rule;
}

}  // namespace

const GaussLegendre& GaussLegendre::get(int order) {
    static std::map<int, GaussLegendre> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, compute_gl(order)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order) {
    const auto& rule = GaussLegendre::get(order);
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    return sum * half;
}

double panel_integrate(const std::function<double(double)>& f, double a, double b, int panels,
                       int order) {
    double h = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) total += gauss_integrate(f, a + p * h, a + (p + 1) * h, order);
    return total;
}

namespace {

double adapt_rec(const std::function<double(double)>& f, double a, double b, double coarse,
                 double abs_tol, double rel_tol, int depth) {
    double mid = 0.5 * (a + b);
    double left = gauss_integrate(f, a, mid, 16);
    double right = gauss_integrate(f, mid, b, 16);
    double fine = left + right;
    double err = std::abs(fine - coarse);
    if (depth <= 0 || err <= abs_tol || err <= rel_tol * std::abs(fine)) return fine;
    return adapt_rec(f, a, mid, left, 0.5 * abs_tol, rel_tol, depth - 1) +
           adapt_rec(f, mid, b, right, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, double rel_tol, int max_depth) {
    return adapt_rec(f, a, b, gauss_integrate(f, a, b, 16), abs_tol, rel_tol, max_depth);
}

SphereQuadrature::SphereQuadrature(int theta_order, int phi_points) {
    const auto& gl = GaussLegendre::get(theta_order);
    nodes.reserve(static_cast<size_t>(theta_order) * phi_points);
    double dphi = 2.0 * std::numbers::pi / phi_points;
    for (int i = 0; i < theta_order; ++i) {
        double ct = gl.nodes[i];
        double theta = std::acos(ct);
        double wt = gl.weights[i] * dphi;
        for (int k = 0; k < phi_points; ++k) nodes.push_back({theta, k * dphi, wt});
    }
}

const SphereQuadrature& SphereQuadrature::for_lmax(int l_max) {
    static std::map<int, SphereQuadrature> cache;
    static std::mutex mtx;
    if (l_max < 0) throw std::invalid_argument("l_max must be nonnegative");
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(l_max);
    if (it == cache.end())
        it = cache.emplace(l_max, SphereQuadrature(2 * l_max + 2, 4 * l_max + 4)).first;
    return it->second;
}

}  // namespace symcalc
