#include "symcalc/symbols.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "symcalc/quadrature.hpp"

namespace symcalc {

namespace {
constexpr double kTermEps = 1e-14;
}

bool HomogeneousTerm::empty() const {
    for (const auto& [idx, f] : angular)
        if (f.max_abs_coeff() >= kTermEps) return false;
    return true;
}

void HomogeneousTerm::add_component(AngularIndex idx, const XFunction& f) {
    if (!idx.valid()) throw std::domain_error("HomogeneousTerm: invalid angular index");
    auto it = angular.find(idx);
    if (it == angular.end()) {
        if (!f.is_zero()) angular.emplace(idx, f);
    } else {
        it->second += f;
        if (it->second.is_zero()) angular.erase(it);
    }
}

bool HomogeneousTerm::parity_structural_ok() const {
    if (parity_index < 0) return true;
    for (const auto& [idx, f] : angular) {
        if (f.max_abs_coeff() < kTermEps) continue;
        if (idx.l > parity_index || (parity_index - idx.l) % 2 != 0) return false;
    }
    return true;
}

bool ClassicalSymbol::all_empty() const {
    for (const auto& t : terms)
        if (!t.empty()) return false;
    return true;
}

bool ClassicalSymbol::degrees_consistent() const {
    for (size_t k = 0; k < terms.size(); ++k)
        if (terms[k].degree != leading_order - static_cast<int>(k)) return false;
    return true;
}

ClassicalSymbol make_symbol(int leading_order, int orders) {
    ClassicalSymbol s;
    s.leading_order = leading_order;
    s.terms.resize(orders);
    for (int k = 0; k < orders; ++k) {
        s.terms[k].degree = leading_order - k;
        s.terms[k].parity_index = k;
    }
    return s;
}

ClassicalSymbol add(const ClassicalSymbol& a, const ClassicalSymbol& b) {
    if (a.terms.empty()) return b;
    if (b.terms.empty()) return a;
    int lead = std::max(a.leading_order, b.leading_order);
    int low_a = a.leading_order - a.truncation_order();  // first uncovered degree
    int low_b = b.leading_order - b.truncation_order();
    int low = std::max(low_a, low_b);
    int orders = lead - low;
    ClassicalSymbol out = make_symbol(lead, orders);
    bool parity_kept = (a.leading_order - b.leading_order) % 2 == 0;
    for (int k = 0; k < orders; ++k) {
        int deg = lead - k;
        if (!parity_kept) out.terms[k].parity_index = -1;
        for (const ClassicalSymbol* src : {&a, &b}) {
            int pos = src->leading_order - deg;
            if (pos < 0 || pos >= src->truncation_order()) continue;
            for (const auto& [idx, f] : src->terms[pos].angular) out.terms[k].add_component(idx, f);
        }
    }
    return out;
}

ClassicalSymbol scale(const ClassicalSymbol& a, cdouble s) {
    ClassicalSymbol out = a;
    for (auto& t : out.terms) {
        std::map<AngularIndex, XFunction> scaled;
        for (const auto& [idx, f] : t.angular) {
            XFunction g = f * s;
            if (!g.is_zero()) scaled.emplace(idx, g);
        }
        t.angular = std::move(scaled);
    }
    return out;
}

HomogeneousTerm d_eta(const HomogeneousTerm& t, int axis) {
    HomogeneousTerm out;
    out.degree = t.degree - 1;
    out.parity_index = t.parity_index < 0 ? -1 : t.parity_index + 1;
    for (const auto& [idx, f] : t.angular) {
        // d_a [eta^{d-l} Z_lm] = (d-l) eta^{d-l-2} (eta_a Z_lm) + eta^{d-l} (d_a Z_lm)
        double radial = static_cast<double>(t.degree - idx.l);
        if (radial != 0.0) {
            for (const auto& st : solid_harmonic_decompose(SolidOp::multiply_by_component, axis, idx))
                out.add_component(st.idx, f * (st.coeff * radial));
        }
        for (const auto& st : solid_harmonic_decompose(SolidOp::differentiate_component, axis, idx))
            out.add_component(st.idx, f * st.coeff);
    }
    return out;
}

HomogeneousTerm d_x(const HomogeneousTerm& t, int axis) {
    HomogeneousTerm out;
    out.degree = t.degree;
    out.parity_index = t.parity_index;
    for (const auto& [idx, f] : t.angular) {
        XFunction df = f.derivative(axis);
        if (!df.is_zero()) out.add_component(idx, df);
    }
    return out;
}

HomogeneousTerm multiply_terms(const HomogeneousTerm& a, const HomogeneousTerm& b) {
    HomogeneousTerm out;
    out.degree = a.degree + b.degree;
    out.parity_index =
        (a.parity_index < 0 || b.parity_index < 0) ? -1 : a.parity_index + b.parity_index;
    for (const auto& [ia, fa] : a.angular) {
        for (const auto& [ib, fb] : b.angular) {
            XFunction prod = fa * fb;
            if (prod.is_zero()) continue;
            const AngularExpansion gaunt = gaunt_expand(ia, ib);
            for (const auto& [iL, g] : gaunt.terms()) out.add_component(iL, prod * g);
        }
    }
    return out;
}

ClassicalSymbol leibniz_product(const ClassicalSymbol& a, const ClassicalSymbol& b, int orders) {
    if (a.truncation_order() < orders || b.truncation_order() < orders)
        throw std::length_error("leibniz_product: inputs truncated below requested order");
    ClassicalSymbol out = make_symbol(a.leading_order + b.leading_order, orders);
    const cdouble two_pi_i(0.0, 2.0 * std::numbers::pi);

    for (int i = 0; i < orders; ++i) {
        if (a.terms[i].empty()) continue;
        for (int j = 0; i + j < orders; ++j) {
            if (b.terms[j].empty()) continue;
            int budget = orders - 1 - i - j;  // remaining |alpha|
            for (int a1 = 0; a1 <= budget; ++a1) {
                for (int a2 = 0; a1 + a2 <= budget; ++a2) {
                    for (int a3 = 0; a1 + a2 + a3 <= budget; ++a3) {
                        int mag = a1 + a2 + a3;
                        HomogeneousTerm da = a.terms[i];
                        for (int k = 0; k < a1; ++k) da = d_eta(da, 1);
                        for (int k = 0; k < a2; ++k) da = d_eta(da, 2);
                        for (int k = 0; k < a3; ++k) da = d_eta(da, 3);
                        if (da.empty()) continue;
                        HomogeneousTerm db = b.terms[j];
                        for (int k = 0; k < a1; ++k) db = d_x(db, 1);
                        for (int k = 0; k < a2; ++k) db = d_x(db, 2);
                        for (int k = 0; k < a3; ++k) db = d_x(db, 3);
                        if (db.empty()) continue;
                        double afact = 1.0;
                        for (int k = 2; k <= a1; ++k) afact *= k;
                        for (int k = 2; k <= a2; ++k) afact *= k;
                        for (int k = 2; k <= a3; ++k) afact *= k;
                        cdouble w = std::pow(two_pi_i, -mag) / afact;
                        HomogeneousTerm prod = multiply_terms(da, db);
                        int pos = i + j + mag;
                        for (const auto& [idx, f] : prod.angular)
                            out.terms[pos].add_component(idx, f * w);
                    }
                }
            }
        }
    }
    return out;
}

cdouble eval_term(const HomogeneousTerm& t, const vec3& x, const vec3& eta) {
    double r = std::sqrt(eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]);
    if (r == 0.0) throw std::domain_error("eval_term: eta = 0");
    double theta = std::acos(std::clamp(eta[2] / r, -1.0, 1.0));
    double phi = std::atan2(eta[1], eta[0]);
    cdouble sum = 0.0;
    for (const auto& [idx, f] : t.angular)
        sum += f.eval(x) * eval_sph_harm(idx, theta, phi);
    return sum * std::pow(r, t.degree);
}

cdouble eval_complex(const ClassicalSymbol& s, const vec3& x, const vec3& eta) {
    double r = std::sqrt(eta[0] * eta[0] + eta[1] * eta[1] + eta[2] * eta[2]);
    if (r < kEtaCutoff)
        throw std::domain_error("eval: |eta| below homogeneity cutoff");
    cdouble sum = 0.0;
    for (const auto& t : s.terms) sum += eval_term(t, x, eta);
    return sum;
}

double eval(const ClassicalSymbol& s, const vec3& x, const vec3& eta) {
    cdouble v = eval_complex(s, x, eta);
    if (std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
        throw std::domain_error("eval: non-negligible imaginary residue, use eval_complex");
    return v.real();
}

ParityReport check_parity(const ClassicalSymbol& s) {
    ParityReport report;
    const vec3 x_probe{0.3, -0.2, 0.5};
    const double eta_r = 2.0;
    for (const auto& t : s.terms) {
        ParityTermReport tr;
        tr.degree = t.degree;
        tr.parity_index = t.parity_index;
        tr.structural_ok = t.parity_structural_ok();
        if (t.parity_index >= 0 && !t.empty()) {
            // quadrature projection of the term onto forbidden Y_lm
            int l_probe = std::min(t.parity_index + 2, kLMax);
            const auto& grid = SphereQuadrature::for_lmax(l_probe);
            std::vector<cdouble> samples(grid.nodes.size());
            for (size_t i = 0; i < grid.nodes.size(); ++i) {
                const auto& n = grid.nodes[i];
                vec3 eta{eta_r * std::sin(n.theta) * std::cos(n.phi),
                         eta_r * std::sin(n.theta) * std::sin(n.phi), eta_r * std::cos(n.theta)};
                samples[i] = eval_term(t, x_probe, eta);
            }
            // violations are measured relative to the term's own scale
            double comp_scale = 0.0;
            for (const auto& [idx, f] : t.angular) {
                (void)idx;
                comp_scale = std::max(comp_scale, std::abs(f.eval(x_probe)));
            }
            double scale_out = std::pow(eta_r, t.degree) * std::max(comp_scale, 1e-300);
            for (int l = 0; l <= l_probe; ++l) {
                bool forbidden = l > t.parity_index || (t.parity_index - l) % 2 != 0;
                if (!forbidden) continue;
                for (int m = -l; m <= l; ++m) {
                    cdouble proj = 0.0;
                    for (size_t i = 0; i < grid.nodes.size(); ++i)
                        proj += grid.nodes[i].weight * samples[i] *
                                std::conj(eval_sph_harm({l, m}, grid.nodes[i].theta, grid.nodes[i].phi));
                    tr.max_violation = std::max(tr.max_violation, std::abs(proj) / std::abs(scale_out));
                }
            }
        }
        tr.pass = tr.structural_ok && tr.max_violation < 1e-10;
        report.all_pass = report.all_pass && tr.pass;
        report.terms.push_back(tr);
    }
    return report;
}

namespace {

nlohmann::json xfunction_to_json(const XFunction& f) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : f.terms()) {
        terms.push_back({{"nu", t.nu},
                         {"width", t.width},
                         {"center", t.center},
                         {"coeff", {t.coeff.real(), t.coeff.imag()}}});
    }
    return terms;
}

XFunction xfunction_from_json(const nlohmann::json& j) {
    XFunction f;
    for (const auto& t : j) {
        std::array<int, 3> nu = t.at("nu");
        vec3 center = t.at("center");
        double width = t.at("width");
        cdouble c(t.at("coeff")[0].get<double>(), t.at("coeff")[1].get<double>());
        f += XFunction::gaussian(c, width, center, nu);
    }
    return f;
}

}  // namespace

std::string to_json(const ClassicalSymbol& s) {
    nlohmann::json j;
    j["format"] = "symcalc-symbol/1";
    j["leading_order"] = s.leading_order;
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : s.terms) {
        nlohmann::json jt;
        jt["degree"] = t.degree;
        jt["parity_index"] = t.parity_index;
        nlohmann::json ang = nlohmann::json::array();
        for (const auto& [idx, f] : t.angular)
            ang.push_back({{"l", idx.l}, {"m", idx.m}, {"coef", xfunction_to_json(f)}});
        jt["angular"] = ang;
        terms.push_back(jt);
    }
    j["terms"] = terms;
    return j.dump(2);
}

ClassicalSymbol symbol_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    if (j.at("format") != "symcalc-symbol/1")
        throw std::runtime_error("symbol_from_json: unknown format tag");
    ClassicalSymbol s;
    s.leading_order = j.at("leading_order");
    for (const auto& jt : j.at("terms")) {
        HomogeneousTerm t;
        t.degree = jt.at("degree");
        t.parity_index = jt.at("parity_index");
        for (const auto& ja : jt.at("angular"))
            t.add_component({ja.at("l"), ja.at("m")}, xfunction_from_json(ja.at("coef")));
        s.terms.push_back(std::move(t));
    }
    if (!s.degrees_consistent()) throw std::runtime_error("symbol_from_json: degree gap in terms");
    return s;
}

}  // namespace symcalc
