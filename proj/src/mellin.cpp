#include "symcalc/mellin.hpp"

#include <climits>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace symcalc {

bool MellinPoleSet::disjoint() const {
    for (int p : parametrix_poles)
        if (rhs_poles.count(p)) return false;
    return true;
}

int MellinPoleSet::min_gap() const {
    int gap = INT_MAX;
    for (int p : parametrix_poles)
        for (int q : rhs_poles) gap = std::min(gap, std::abs(p - q));
    return gap;
}

MellinPoleSet pole_sets(int l, int m_max, int n_max) {
    if (l < 0 || m_max < 0 || n_max < 0) throw std::domain_error("pole_sets: negative bound");
    MellinPoleSet ps;
    ps.l = l;
    for (int m = 0; m <= m_max; ++m) {
        ps.parametrix_poles.insert(3 + m + l);
        ps.parametrix_poles.insert(2 + m - l);
    }
    for (int n = 0; n <= n_max; ++n) ps.rhs_poles.insert(1 - l - n);
    return ps;
}

LogFreeVerdict log_free_verdict(int l_max, int m_max, int n_max, int rhs_shift) {
    if (l_max < 0 || l_max > 64) throw std::domain_error("log_free_verdict: l_max must be in [0,64]");
    LogFreeVerdict v;
    for (int l = 0; l <= l_max; ++l) {
        MellinPoleSet ps = pole_sets(l, m_max, n_max);
        if (rhs_shift != 0) {
            std::set<int> shifted;
            for (int q : ps.rhs_poles) shifted.insert(q + rhs_shift);
            ps.rhs_poles = std::move(shifted);
        }
        LogFreeRow row{l, ps.min_gap(), ps.disjoint()};
        v.table.push_back(row);
        if (!row.disjoint && v.log_free) {
            v.log_free = false;
            v.witness_l = l;
            for (int p : ps.parametrix_poles)
                if (ps.rhs_poles.count(p)) {
                    v.witness_pole = p;
                    break;
                }
        }
    }
    return v;
}

namespace {

// one tridiagonal solve of the u = s*tau formulation; returns tau'(0+)
// extracted by a quadratic fit through the first three interior nodes
double solve_ratio(double kappa, double psi0, int M) {
    double s_max = 20.0 / kappa;
    double h = s_max / M;
    int n = M - 1;  // interior unknowns u_1..u_{M-1}
    // -u'' + kappa^2 u = -psi0, u(0) = 0, u(s_max) = psi0 e^{-kappa s_max}/kappa^2
    std::vector<double> diag(n, 2.0 / (h * h) + kappa * kappa);
    std::vector<double> rhs(n, -psi0);
    double off = -1.0 / (h * h);
    double u_right = psi0 * std::exp(-kappa * s_max) / (kappa * kappa);
    rhs[n - 1] -= off * u_right;
    // Thomas algorithm
    std::vector<double> c(n), d(n);
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for (int i = 1; i < n; ++i) {
        double m = diag[i] - off * c[i - 1];
        c[i] = off / m;
        d[i] = (rhs[i] - off * d[i - 1]) / m;
    }
    std::vector<double> u(n);
    u[n - 1] = d[n - 1];
    for (int i = n - 2; i >= 0; --i) u[i] = d[i] - c[i] * u[i + 1];
    // tau_i = u_i / s_i; quadratic through (s_1, s_2, s_3) evaluated at 0
    double s1 = h, s2 = 2 * h, s3 = 3 * h;
    double t1 = u[0] / s1, t2 = u[1] / s2, t3 = u[2] / s3;
    // derivative at 0 of the interpolating quadratic
    double d1 = t1 * (s2 + s3) / ((s1 - s2) * (s1 - s3));
    double d2 = t2 * (s1 + s3) / ((s2 - s1) * (s2 - s3));
    double d3 = t3 * (s1 + s2) / ((s3 - s1) * (s3 - s2));
    return -(d1 + d2 + d3);
}

}  // namespace

CuspResult cusp_coefficient(const CuspModel& model) {
    if (model.kappa <= 0.0) throw std::domain_error("cusp_coefficient: kappa must be positive");
    if (model.grid_points < 64) throw std::domain_error("cusp_coefficient: grid too coarse");
    CuspResult res;
    if (model.psi0 == 0.0) {
        res.zero_source = true;
        return res;
    }
    int M = model.grid_points;
    double s_max = 20.0 / model.kappa;
    for (int M_k : {M / 4, M / 2, M}) {
        res.grid_h.push_back(s_max / M_k);
        res.grid_ratios.push_back(solve_ratio(model.kappa, model.psi0, M_k) / model.psi0);
    }
    double r0 = res.grid_ratios[0], r1 = res.grid_ratios[1], r2 = res.grid_ratios[2];
    res.observed_order = std::log2(std::abs(r1 - r0) / std::abs(r2 - r1));
    res.ratio = r2 + (r2 - r1) / 3.0;  // second-order Richardson
    return res;
}

}  // namespace symcalc
