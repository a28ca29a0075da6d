#pragma once

#include <functional>
#include <vector>

namespace symcalc {

/// Gauss-Legendre nodes/weights on [-1,1], cached per order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    static const GaussLegendre& get(int order);
};

/// Integrate f over [a,b] with a single Gauss-Legendre rule of given order.
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int order = 16);

/// Composite Gauss-Legendre over equal panels.
double panel_integrate(const std::function<double(double)>& f, double a, double b, int panels,
                       int order = 16);

/// Adaptive bisection quadrature (Gauss order 16 vs 32 error estimate).
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-12, double rel_tol = 1e-10, int max_depth = 30);

/// Product Gauss(theta) x trapezoid(phi) grid on the unit sphere. Exact for
/// spherical-harmonic integrands of degree <= 2*theta_order-1 in cos(theta)
/// and azimuthal frequency < phi_points.
struct SphereQuadrature {
    struct Node {
        double theta, phi, weight;
    };
    std::vector<Node> nodes;

    explicit SphereQuadrature(int theta_order, int phi_points);

    /// Grid sized for integrands band-limited to total degree 3*l_max.
    static const SphereQuadrature& for_lmax(int l_max);
};

}  // namespace symcalc
