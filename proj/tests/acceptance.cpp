// Acceptance suite: runs every primary criterion at its stated tolerance and
// prints one pass/fail line per criterion.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "symcalc/diagrams.hpp"
#include "symcalc/kernels.hpp"
#include "symcalc/mellin.hpp"
#include "symcalc/symbols.hpp"
#include "symcalc/wavelets.hpp"

using namespace symcalc;

namespace {

int failures = 0;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

void report(int id, const std::string& what, bool ok, double seconds) {
    std::printf("%-4s criterion %2d: %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(),
                seconds);
    std::fflush(stdout);
    if (!ok) ++failures;
}

const char* kFig3 =
    "(nonlinear_rpa_direct (ladder_particle (ladder_hole (source))) "
    "(linear_rpa_direct (ladder_particle_hole (source))))";

}  // namespace

int main() {
    // 1. ladder-stripping classification of the multi-ladder diagram, exact, < 1 ms
    {
        GoldstoneDiagram fig3 = parse_diagram(kFig3);
        Timer t;
        DiagramClassification c = classify(fig3);
        double dt = t.seconds();
        report(1, "multi-ladder diagram classifies to S_cl^-16", c.symbol_order == -16 && dt < 1e-3,
               dt);
    }

    // 2. Dual-rule equivalence on iterate(3) and all trees of <= 9 nodes, < 30 s
    {
        Timer t;
        bool ok = true;
        long trees = 0;
        for_each_tree(9, [&](const GoldstoneDiagram& d) {
            ++trees;
            if (classify(d).symbol_order != classify_by_symbol_propagation(d)) ok = false;
        });
        IterationState st = iterate(3);
        for (const auto& [key, d] : st.diagrams) {
            (void)key;
            if (classify(d).symbol_order != classify_by_symbol_propagation(d)) ok = false;
        }
        double dt = t.seconds();
        report(2,
               "classify == symbol propagation on " + std::to_string(trees) + " trees + iterate(3)",
               ok && dt < 30.0, dt);
    }

    // 3. Filtration endpoints for n = 1, 2, 3, exact, < 60 s
    {
        Timer t;
        bool ok = true;
        for (int n : {1, 2, 3}) {
            FiltrationReport rep = filtration_report(iterate(n));
            ok = ok && rep.pass && rep.expected_max == -4 * (n + 1) &&
                 rep.expected_min == -4 * ((1 << (n + 1)) - 1);
        }
        report(3, "progression endpoints -4(n+1) and -4(2^{n+1}-1), n = 1..3", ok && t.seconds() < 60,
               t.seconds());
    }

    // 4. Closed-form maps vs the oscillatory oracle, rel < 1e-3 at eta in {20,50,100}, < 2 min
    {
        Timer t;
        bool ok = true;
        double worst = 0.0;
        auto check = [&](const KernelTerm& kt, const HomogeneousTerm& term) {
            vec3 x{0.1, -0.2, 0.15};
            for (double eta : {20.0, 50.0, 100.0}) {
                vec3 ev{0.48 * eta, -0.6 * eta, 0.64 * eta};
                cdouble closed = eval_term(term, x, ev);
                cdouble oracle = oscillatory_oracle(kt, x, ev);
                double rel = std::abs(closed - oracle) / std::abs(closed);
                worst = std::max(worst, rel);
                if (rel >= 1e-3) ok = false;
            }
        };
        for (int j : {1, 2, 3}) {  // amplitude terms, non-log forward map
            KernelTerm kt;
            kt.power = j;
            int l0 = (j % 2 == 1) ? 0 : 1;
            kt.angular.set({l0, 0}, 1.0);
            if (l0 + 2 <= j) kt.angular.add({l0 + 2, 1}, 0.6);
            kt.xcoef = XFunction::gaussian(1.1, 0.7, {0.05 * j, 0.0, -0.1});
            check(kt, *symbol_from_kernel_term(kt));
        }
        {  // logarithmic forward map, j = 1
            KernelTerm kt;
            kt.power = 1;
            kt.has_log = true;
            kt.angular.set({1, 0}, 1.0);
            kt.xcoef = XFunction::gaussian(0.8, 0.5, {0.0, 0.1, 0.0});
            check(kt, *symbol_from_kernel_term(kt));
        }
        for (int j : {0, 1, 2}) {  // potential forward map
            std::map<AngularIndex, XFunction> v;
            int l0 = j % 2;
            v.emplace(AngularIndex{l0, 0}, XFunction::gaussian(1.0, 0.4, {0.0, 0.0, 0.05 * j}));
            if (l0 + 2 <= j) v.emplace(AngularIndex{l0 + 2, -1}, XFunction::gaussian(0.4, 0.6, {0, 0, 0}));
            HomogeneousTerm term = potential_symbol(j, v);
            vec3 x{0.1, -0.2, 0.15};
            for (double eta : {20.0, 50.0, 100.0}) {
                vec3 ev{0.48 * eta, -0.6 * eta, 0.64 * eta};
                cdouble closed = eval_term(term, x, ev);
                cdouble oracle = 0.0;
                for (const auto& [idx, f] : v) {
                    KernelTerm kt;
                    kt.power = j - 1;
                    kt.angular.set(idx, 1.0);
                    kt.xcoef = f;
                    oracle += oscillatory_oracle(kt, x, ev);
                }
                double rel = std::abs(closed - oracle) / std::abs(closed);
                worst = std::max(worst, rel);
                if (rel >= 1e-3) ok = false;
            }
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "kernel<->symbol closed forms vs oracle, worst rel %.1e",
                      worst);
        report(4, buf, ok && t.seconds() < 120, t.seconds());
    }

    // 5. a_lj equals the symbolically iterated Bessel recurrence, l <= j <= 8, exact
    {
        Timer t;
        bool ok = true;
        for (int j = 0; j <= 8; ++j)
            for (int l = 0; l <= j; ++l)
                if (a_coeff(l, j) != bessel_recurrence_factor(l, j + 2)) ok = false;
        report(5, "a_lj table equals the Bessel-recurrence factors", ok, t.seconds());
    }

    // 6. Log-free structural check on parity-valid Leibniz composites, < 10 s
    {
        Timer t;
        bool ok = true;
        ClassicalSymbol tau = model_amplitude_symbol(4);
        ClassicalSymbol rho = model_potential_symbol(4);
        std::vector<ClassicalSymbol> composites;
        composites.push_back(leibniz_product(tau, rho, 4));            // linear interaction composite, S^-6
        composites.push_back(leibniz_product(composites[0], tau, 3));  // nonlinear interaction composite, S^-10
        composites.push_back(leibniz_product(rho, rho, 4));
        composites.push_back(leibniz_product(tau, tau, 3));
        for (const auto& s : composites) {
            if (!check_parity(s).all_pass) ok = false;
            if (!kernel_from_symbol(s).log_branch_empty()) ok = false;
        }
        report(6, "kernel_from_symbol emits an empty log branch on every composite",
               ok && t.seconds() < 10, t.seconds());
    }

    // 7. Mellin pole disjointness for all l, m, n <= 64, exact, < 1 s
    {
        Timer t;
        LogFreeVerdict v = log_free_verdict(64, 64, 64);
        report(7, "parametrix and rhs Mellin poles never coalesce", v.log_free && t.seconds() < 1,
               t.seconds());
    }

    // 8. Cusp coefficient 0.500 +- 0.01 with observed order >= 1.8, < 10 s
    {
        Timer t;
        CuspResult r = cusp_coefficient({1.0, 1.0, 4000});
        CuspResult r2 = cusp_coefficient({2.0, 3.0, 4000});
        bool ok = !r.zero_source && std::abs(r.ratio - 0.5) <= 0.01 && r.observed_order >= 1.8 &&
                  std::abs(r2.ratio - 0.5) <= 0.01;
        char buf[96];
        std::snprintf(buf, sizeof buf, "cusp ratio %.4f, observed order %.2f", r.ratio,
                      r.observed_order);
        report(8, buf, ok && t.seconds() < 10, t.seconds());
    }

    // 9. Besov threshold formula, exact to 1e-12
    {
        Timer t;
        auto [q4, a4] = besov_threshold(-4);
        auto [q6, a6] = besov_threshold(-6);
        bool ok = std::abs(q4 - 1.0) < 1e-12 && std::abs(a4 - 1.5) < 1e-12 &&
                  std::abs(q6 - 0.6) < 1e-12 && std::abs(a6 - 3.5) < 1e-12;
        report(9, "(q_min, alpha_max) = (1, 1.5) at p=-4 and (0.6, 3.5) at p=-6", ok, t.seconds());
    }

    // 10. Wavelet property suite, total < 5 min
    {
        Timer t;
        bool ok_a = true, ok_b = true, ok_c = true, ok_d = true, ok_e = true;
        // (a) vanishing-moment zeros to 1e-12
        {
            ModelKernel poly = ModelKernel::polynomial(3, 2);
            CoefficientTable tp = analyze(poly, 6);
            double scale = 0;
            for (const auto& [idx, v] : tp.entries) scale = std::max(scale, std::abs(v));
            auto interior = [](int j, int a) {
                double lo = std::ldexp(static_cast<double>(a), -j);
                double hi = std::ldexp(static_cast<double>(a + DaubechiesWavelet::kSupport), -j);
                return lo > 0.0 && hi < 1.0;
            };
            for (const auto& [idx, v] : tp.entries)
                if (idx.s1 && interior(idx.j1, idx.a1[0]) && std::abs(v) >= 1e-12 * scale)
                    ok_a = false;
            int checked = 0;
            for (int a1 = 3; a1 <= 40; a1 += 4) {
                WaveletIndex idx;
                idx.j1 = 6;
                idx.j2 = 6;
                idx.a1 = {a1, 0, 0};
                idx.a2 = {a1 + 2, 0, 0};
                if (!interior(6, a1) || !interior(6, a1 + 2)) continue;
                if (std::abs(direct_coefficient(poly, idx)) >= 1e-12 * scale) ok_a = false;
                ++checked;
            }
            if (checked < 8) ok_a = false;
        }
        // (b) Parseval within 1%, (c) sigma_N monotone, (d) decay exponents
        // within 15% of the dense oracle, (e) slope ordering for p = -4,-6,-8
        std::vector<double> rates;
        for (int p : {-4, -6, -8}) {
            CoefficientTable tb = analyze(ModelKernel::cusp(p), 8);
            if (std::abs(tb.total_energy - tb.quad_l2_sq) > 0.01 * tb.quad_l2_sq) ok_b = false;
            std::vector<std::size_t> Ns;
            for (std::size_t N = 1; N <= (std::size_t{1} << 14); N *= 2) Ns.push_back(N);
            ApproxRateReport rep = best_n_term(tb, Ns);
            for (std::size_t i = 1; i < rep.sigma.size(); ++i)
                if (rep.sigma[i] > rep.sigma[i - 1] + 1e-15) ok_c = false;
            std::vector<std::size_t> NsAll;
            for (std::size_t N = 1; N <= tb.entries.size(); N *= 2) NsAll.push_back(N);
            rates.push_back(best_n_term(tb, NsAll).fitted_decay_rate);
            if (p == -4) {
                BoundCheckReport bc = coefficient_bound_check(tb, ModelKernel::cusp(p), 5);
                if (!bc.conclusive || !bc.pass) ok_d = false;
            }
        }
        if (!(rates[0] < rates[1] && rates[1] < rates[2])) ok_e = false;
        bool ok = ok_a && ok_b && ok_c && ok_d && ok_e && t.seconds() < 300;
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "wavelets: moments %c parseval %c monotone %c exponents %c ordering %c",
                      ok_a ? '+' : '-', ok_b ? '+' : '-', ok_c ? '+' : '-', ok_d ? '+' : '-',
                      ok_e ? '+' : '-');
        report(10, buf, ok, t.seconds());
    }

    // 11. Parity algebra: all four Table-1 rows realized with structural zeros, < 5 s
    {
        Timer t;
        bool ok = true;
        struct Row {
            int j1, l1, j2, l2;
        };
        for (const Row& row : {Row{1, 1, 1, 1}, Row{1, 1, 2, 2}, Row{2, 2, 1, 1}, Row{2, 2, 2, 0}}) {
            HomogeneousTerm a;
            a.degree = -4 - row.j1;
            a.parity_index = row.j1;
            a.add_component({row.l1, 0}, XFunction::gaussian(1.0, 0.5, {0.1, 0.0, 0.0}));
            HomogeneousTerm b;
            b.degree = -2 - row.j2;
            b.parity_index = row.j2;
            b.add_component({row.l2, row.l2 > 0 ? 1 : 0}, XFunction::gaussian(0.7, 0.6, {0, 0, 0}));
            HomogeneousTerm prod = multiply_terms(a, b);
            if (prod.parity_index != row.j1 + row.j2) ok = false;
            int want = (row.j1 + row.j2) % 2;
            for (const auto& [idx, f] : prod.angular) {
                (void)f;
                if (idx.l % 2 != want || idx.l > row.j1 + row.j2) ok = false;
            }
            if (!prod.parity_structural_ok()) ok = false;
        }
        // and through the full Leibniz product with the numeric check
        ClassicalSymbol comp =
            leibniz_product(model_amplitude_symbol(4), model_potential_symbol(4), 4);
        ParityReport rep = check_parity(comp);
        if (!rep.all_pass) ok = false;
        for (const auto& tr : rep.terms)
            if (!tr.structural_ok) ok = false;
        report(11, "all four Table-1 parity rows with structural zeros", ok && t.seconds() < 5,
               t.seconds());
    }

    std::printf("%s (%d criteria failed)\n", failures == 0 ? "ACCEPTANCE: ALL PASS" : "ACCEPTANCE: FAILURES",
                failures);
    return failures == 0 ? 0 : 1;
}
