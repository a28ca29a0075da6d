#pragma once

#include <set>
#include <vector>

namespace symcalc {

/// Integer pole locations of the radial Mellin analysis at fixed angular
/// momentum l: parametrix poles {3+m+l} u {2+m-l} for m = 0..m_max, right-hand
/// side poles {1-l-n} for n = 0..n_max. The families are provably disjoint
/// (2+m-l = 1-l-n would need m+n = -1).
struct MellinPoleSet {
    int l = 0;
    std::set<int> parametrix_poles;
    std::set<int> rhs_poles;

    bool disjoint() const;
    /// smallest |a - b| over pairs from the two families
    int min_gap() const;
};

MellinPoleSet pole_sets(int l, int m_max, int n_max);

struct LogFreeRow {
    int l = 0;
    int min_gap = 0;
    bool disjoint = true;
};

struct LogFreeVerdict {
    bool log_free = true;
    std::vector<LogFreeRow> table;
    int witness_l = -1;  // populated when a coalescence is found
    int witness_pole = 0;
};

/// True iff no pole coalescence for any l <= l_max (m, n up to the given
/// bounds). rhs_shift is a test hook displacing the rhs family (+1 forces a
/// coalescence; negative control).
LogFreeVerdict log_free_verdict(int l_max, int m_max = 64, int n_max = 64, int rhs_shift = 0);

/// Reduced s-wave radial model of the first-order cusp expansion:
///   (-d^2/ds^2 - (2/s) d/ds + kappa^2) tau(s) = -psi0 / s
/// solved by second-order finite differences in u = s*tau on (0, s_max],
/// s_max = 20/kappa, outer value from the decaying homogeneous solution.
struct CuspModel {
    double kappa = 1.0;
    double psi0 = 1.0;
    int grid_points = 4000;  // finest grid; coarser grids derived by halving
};

struct CuspResult {
    bool zero_source = false;  // psi0 = 0 guard: tau == 0, ratio undefined
    double ratio = 0.0;        // Richardson-extrapolated tau'(0+)/psi0
    double observed_order = 0.0;
    std::vector<double> grid_h;       // grid spacings used
    std::vector<double> grid_ratios;  // per-grid extracted ratios
};

/// Extract tau'(0+)/psi0; the model forces the value 1/2 independent of kappa.
CuspResult cusp_coefficient(const CuspModel& model);

}  // namespace symcalc
