#include "symcalc/wavelets.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "symcalc/kernels.hpp"
#include "symcalc/quadrature.hpp"

namespace symcalc {

namespace {

constexpr int kTaps = DaubechiesWavelet::kTaps;
constexpr int kSup = DaubechiesWavelet::kSupport;

// Daubechies scaling filter with kMoments vanishing moments, built by
// spectral factorization of the binomial half-band polynomial
// P(y) = sum_k C(N-1+k, k) y^k: substitute y = (2 - z - 1/z)/4, factor the
// palindromic root pairs, keep the minimal-phase (|z| < 1) branch.
std::array<double, kTaps> compute_daubechies() {
    using cplx = std::complex<double>;
    constexpr int N = DaubechiesWavelet::kMoments;
    // P(y) coefficients
    std::array<double, N> pc{};
    for (int k = 0; k < N; ++k) {
        double b = 1.0;
        for (int t = 0; t < k; ++t) b = b * (N + t) / (t + 1);  // C(N-1+k, k)
        pc[k] = b;
    }
    // R(z) = z^{N-1} P((2 - z - 1/z)/4), ordinary polynomial of degree 2N-2
    std::vector<double> R(2 * N - 1, 0.0);  // coefficient of z^{i}, centered at N-1
    {
        std::vector<double> ypow{1.0};  // Laurent coeffs of y^k, centered
        for (int k = 0; k < N; ++k) {
            int off = (static_cast<int>(ypow.size()) - 1) / 2;
            for (std::size_t i = 0; i < ypow.size(); ++i)
                R[N - 1 - off + static_cast<int>(i)] += pc[k] * ypow[i];
            // multiply ypow by (2 - z - 1/z)/4
            std::vector<double> nxt(ypow.size() + 2, 0.0);
            for (std::size_t i = 0; i < ypow.size(); ++i) {
                nxt[i] += -0.25 * ypow[i];
                nxt[i + 1] += 0.5 * ypow[i];
                nxt[i + 2] += -0.25 * ypow[i];
            }
            ypow.swap(nxt);
        }
    }
    // roots of R by Durand-Kerner
    int deg = 2 * N - 2;
    std::vector<cplx> roots(deg);
    cplx seed(0.4, 0.9);
    cplx acc(1.0, 0.0);
    for (int i = 0; i < deg; ++i) {
        acc *= seed;
        roots[i] = acc;
    }
    auto evalR = [&](cplx z) {
        cplx v = 0.0;
        for (int i = deg; i >= 0; --i) v = v * z + R[i];
        return v;
    };
    for (int it = 0; it < 500; ++it) {
        double moved = 0.0;
        for (int i = 0; i < deg; ++i) {
            cplx num = evalR(roots[i]) / R[deg];
            cplx den(1.0, 0.0);
            for (int j = 0; j < deg; ++j)
                if (j != i) den *= roots[i] - roots[j];
            cplx step = num / den;
            roots[i] -= step;
            moved = std::max(moved, std::abs(step));
        }
        if (moved < 1e-15) break;
    }
    // minimal-phase factor from roots inside the unit disk
    std::vector<cplx> L{1.0};
    for (const cplx& r : roots) {
        if (std::abs(r) >= 1.0) continue;
        std::vector<cplx> nxt(L.size() + 1, 0.0);
        for (std::size_t i = 0; i < L.size(); ++i) {
            nxt[i + 1] += L[i];
            nxt[i] += -r * L[i];
        }
        L.swap(nxt);
    }
    // m0(z) = ((1+z)/2)^N * L(z) / L(1)
    std::vector<cplx> m0{1.0};
    for (int k = 0; k < N; ++k) {
        std::vector<cplx> nxt(m0.size() + 1, 0.0);
        for (std::size_t i = 0; i < m0.size(); ++i) {
            nxt[i] += 0.5 * m0[i];
            nxt[i + 1] += 0.5 * m0[i];
        }
        m0.swap(nxt);
    }
    {
        std::vector<cplx> conv(m0.size() + L.size() - 1, 0.0);
        for (std::size_t i = 0; i < m0.size(); ++i)
            for (std::size_t j = 0; j < L.size(); ++j) conv[i + j] += m0[i] * L[j];
        m0.swap(conv);
    }
    cplx sum = 0.0;
    for (const cplx& v : m0) sum += v;
    std::array<double, kTaps> h{};
    for (int k = 0; k < kTaps; ++k) h[k] = std::numbers::sqrt2 * (m0[k] / sum).real();
    return h;
}

const std::array<double, kTaps> kH = compute_daubechies();

void run_parallel(int n, int threads, const std::function<void(int, int)>& chunk) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n));
    if (threads == 1) {
        chunk(0, n);
        return;
    }
    std::vector<std::thread> pool;
    int per = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int lo = t * per, hi = std::min(n, lo + per);
        if (lo >= hi) break;
        pool.emplace_back(chunk, lo, hi);
    }
    for (auto& th : pool) th.join();
}

// dense Gaussian elimination with partial pivoting: solves A x = b in place
void solve_dense(std::vector<double>& A, std::vector<double>& b, int n) {
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[piv * n + j]);
            std::swap(b[col], b[piv]);
        }
        double d = A[col * n + col];
        if (d == 0.0) throw std::runtime_error("solve_dense: singular system");
        for (int r = 0; r < n; ++r) {
            if (r == col) continue;
            double fac = A[r * n + col] / d;
            if (fac == 0.0) continue;
            for (int j = col; j < n; ++j) A[r * n + j] -= fac * A[col * n + j];
            b[r] -= fac * b[col];
        }
    }
    for (int i = 0; i < n; ++i) b[i] /= A[i * n + i];
}

}  // namespace

const std::array<double, kTaps>& DaubechiesWavelet::lowpass() { return kH; }

std::array<double, kTaps> DaubechiesWavelet::highpass() {
    std::array<double, kTaps> g{};
    for (int k = 0; k < kTaps; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * kH[kSup - k];
    return g;
}

DaubechiesWavelet::DaubechiesWavelet() {
    // values at integers: eigenvector of A[i][j] = c_{2i-j} (c = sqrt(2) h),
    // eigenvalue 1, normalized to sum 1
    std::array<double, kTaps> c{};
    for (int k = 0; k < kTaps; ++k) c[k] = std::numbers::sqrt2 * kH[k];
    constexpr int ni = kSup - 1;  // interior integers 1..kSup-1
    std::vector<double> A(ni * ni, 0.0);
    std::vector<double> rhs(ni, 0.0);
    for (int i = 0; i < ni; ++i) {
        for (int j = 0; j < ni; ++j) {
            int idx = 2 * (i + 1) - (j + 1);
            A[i * ni + j] = (idx >= 0 && idx < kTaps ? c[idx] : 0.0) - (i == j ? 1.0 : 0.0);
        }
    }
    for (int j = 0; j < ni; ++j) A[(ni - 1) * ni + j] = 1.0;  // normalization row
    rhs[ni - 1] = 1.0;
    solve_dense(A, rhs, ni);
    std::vector<double> at_int(kTaps, 0.0);
    for (int i = 0; i < ni; ++i) at_int[i + 1] = rhs[i];

    // refine to the dyadic grid 2^-K
    const int K = grid_log2_;
    const std::size_t n = (static_cast<std::size_t>(kSup) << K) + 1;
    phi_samples_.assign(n, 0.0);
    for (int i = 0; i <= kSup; ++i)
        phi_samples_[static_cast<std::size_t>(i) << K] = at_int[i];
    for (int d = 1; d <= K; ++d) {
        std::size_t step = std::size_t{1} << (K - d);
        for (std::size_t idx = step; idx < n; idx += 2 * step) {
            double x2 = 2.0 * static_cast<double>(idx) / (1 << K);
            double v = 0.0;
            for (int k = 0; k < kTaps; ++k) {
                double arg = x2 - k;
                if (arg < 0.0 || arg > kSup) continue;
                v += c[k] * phi_samples_[static_cast<std::size_t>(std::llround(arg * (1 << K)))];
            }
            phi_samples_[idx] = v;
        }
    }
    auto g = highpass();
    psi_samples_.assign(n, 0.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        double x2 = 2.0 * static_cast<double>(idx) / (1 << K);
        double v = 0.0;
        for (int k = 0; k < kTaps; ++k) {
            double arg = x2 - k;
            if (arg < 0.0 || arg > kSup) continue;
            v += std::numbers::sqrt2 * g[k] *
                 phi_samples_[static_cast<std::size_t>(std::llround(arg * (1 << K)))];
        }
        psi_samples_[idx] = v;
    }

    // moments M_n (1 - 2^-n) = 2^{-n-1} sum_{j<n} C(n,j) (sum_k c_k k^{n-j}) M_j
    const int nmom = 16;
    moments_.assign(nmom + 1, 0.0);
    moments_[0] = 1.0;
    for (int nn = 1; nn <= nmom; ++nn) {
        double acc = 0.0;
        for (int j = 0; j < nn; ++j) {
            double binom = 1.0;
            for (int t = 0; t < nn - j; ++t) binom = binom * (nn - t) / (t + 1);
            double pk = 0.0;
            for (int k = 0; k < kTaps; ++k) pk += c[k] * std::pow(static_cast<double>(k), nn - j);
            acc += binom * pk * moments_[j];
        }
        moments_[nn] = acc / std::pow(2.0, nn + 1) / (1.0 - std::pow(2.0, -nn));
    }

    // fixed interior nodes; weights from the Vandermonde system against the
    // moments (degree kRuleNodes-1 exactness)
    for (int i = 0; i < kRuleNodes; ++i)
        rule_nodes_[i] = 0.5 + i * (kSup - 1.0) / (kRuleNodes - 1);
    std::vector<double> V(kRuleNodes * kRuleNodes);
    std::vector<double> m(kRuleNodes);
    for (int r = 0; r < kRuleNodes; ++r) {
        for (int i = 0; i < kRuleNodes; ++i) V[r * kRuleNodes + i] = std::pow(rule_nodes_[i], r);
        m[r] = moments_[r];
    }
    solve_dense(V, m, kRuleNodes);
    for (int i = 0; i < kRuleNodes; ++i) rule_weights_[i] = m[i];
}

const DaubechiesWavelet& DaubechiesWavelet::get() {
    static DaubechiesWavelet w;
    return w;
}

namespace {

double interp(const std::vector<double>& samples, int K, double t) {
    if (t <= 0.0 || t >= kSup) return 0.0;
    double x = t * (1 << K);
    auto i = static_cast<std::size_t>(x);
    double f = x - static_cast<double>(i);
    return samples[i] * (1.0 - f) + samples[i + 1] * f;
}

}  // namespace

double DaubechiesWavelet::phi(double t) const { return interp(phi_samples_, grid_log2_, t); }
double DaubechiesWavelet::psi(double t) const { return interp(psi_samples_, grid_log2_, t); }

double DaubechiesWavelet::phi_moment(int n) const {
    if (n < 0 || n >= static_cast<int>(moments_.size()))
        throw std::domain_error("phi_moment: order out of range");
    return moments_[n];
}

/// ---- model kernels ---------------------------------------------------------

namespace {

double window_bump(double x) {
    // smooth bump on (0.05, 0.95), peak 1 at 0.5
    double v = (x - 0.5) / 0.45;
    if (std::abs(v) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - v * v));
}

const Cutoff& profile_cutoff() {
    static Cutoff c(0.2, 0.4);
    return c;
}

}  // namespace

ModelKernel ModelKernel::cusp(int p) {
    if (p > -4) throw std::domain_error("ModelKernel::cusp: requires p <= -4");
    ModelKernel f;
    int q = -3 - p;
    f.box_x = window_bump;
    f.box_y = window_bump;
    f.profile = [q](double u) { return std::pow(std::abs(u), q) * profile_cutoff()(std::abs(u)); };
    f.singular = true;
    f.power = q;
    f.pure_radius = profile_cutoff().inner_radius();
    return f;
}

ModelKernel ModelKernel::gaussian(double width) {
    ModelKernel f;
    f.box_x = window_bump;
    f.box_y = window_bump;
    f.profile = [width](double u) { return std::exp(-width * u * u); };
    return f;
}

ModelKernel ModelKernel::polynomial(int dx, int dy) {
    ModelKernel f;
    f.box_x = [dx](double x) { return (x >= 0.0 && x <= 1.0) ? std::pow(x, dx) : 0.0; };
    f.box_y = [dy](double y) { return (y >= 0.0 && y <= 1.0) ? std::pow(y, dy) : 0.0; };
    f.profile = [](double) { return 1.0; };
    return f;
}

/// ---- refinable connection table for |u|^q ----------------------------------

namespace {

// M_{ab}(D) = int int (t-c)^a (t'-c)^b phi(t) phi(t') |D + t - t'|^q dt dt',
// c = kSup/2, for |D| <= kSup, a,b <= 2. Exact values from the two-scale
// identity: the refinement couples M_{ab}(D) to M_{a'b'}(2D+n-m); shifts with
// |delta| > kSup see a single-sign kernel and reduce to moment polynomials.
// Solved as one dense linear system.
class ConnectionTable {
public:
    explicit ConnectionTable(int q) : q_(q) {
        const auto& w = DaubechiesWavelet::get();
        const double c = kSup / 2.0;
        const int nd = 2 * kSup + 1;  // D in [-kSup, kSup]
        const int nu = 9 * nd;        // unknowns (a,b <= 2)
        std::vector<double> sm(q + 3, 0.0);
        for (int k = 0; k < static_cast<int>(sm.size()); ++k) {
            double acc = 0.0;
            for (int i = 0; i <= k; ++i) {
                double binom = 1.0;
                for (int t = 0; t < i; ++t) binom = binom * (k - t) / (t + 1);
                acc += binom * std::pow(-c, i) * w.phi_moment(k - i);
            }
            sm[k] = acc;
        }
        auto poly_value = [&](int a, int b, int delta) {
            double sign = delta > 0 ? 1.0 : ((q_ % 2 == 0) ? 1.0 : -1.0);
            double acc = 0.0;
            for (int r = 0; r <= q_; ++r) {
                double cqr = 1.0;
                for (int t = 0; t < r; ++t) cqr = cqr * (q_ - t) / (t + 1);
                double dpow = std::pow(static_cast<double>(delta), q_ - r);
                for (int i = 0; i <= r; ++i) {
                    double cri = 1.0;
                    for (int t = 0; t < i; ++t) cri = cri * (r - t) / (t + 1);
                    double s = ((r - i) % 2 == 0) ? 1.0 : -1.0;
                    acc += cqr * dpow * cri * s * sm[a + i] * sm[b + r - i];
                }
            }
            return sign * acc;
        };
        auto slot = [&](int a, int b, int D) { return (a * 3 + b) * nd + (D + kSup); };

        std::vector<double> A(static_cast<std::size_t>(nu) * nu, 0.0);
        std::vector<double> rhs(nu, 0.0);
        const auto& h = DaubechiesWavelet::lowpass();
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                for (int D = -kSup; D <= kSup; ++D) {
                    int row = slot(a, b, D);
                    A[static_cast<std::size_t>(row) * nu + row] += 1.0;
                    double scale = std::pow(2.0, -(1 + a + b + q_));
                    for (int n = 0; n < kTaps; ++n) {
                        for (int mm = 0; mm < kTaps; ++mm) {
                            double hh = h[n] * h[mm] * scale;
                            int delta = 2 * D + n - mm;
                            for (int a2 = 0; a2 <= a; ++a2) {
                                double ca = 1.0;
                                for (int t = 0; t < a - a2; ++t) ca = ca * (a - t) / (t + 1);
                                double wa = ca * std::pow(n - c, a - a2);
                                for (int b2 = 0; b2 <= b; ++b2) {
                                    double cb = 1.0;
                                    for (int t = 0; t < b - b2; ++t) cb = cb * (b - t) / (t + 1);
                                    double wt = hh * wa * cb * std::pow(mm - c, b - b2);
                                    if (std::abs(delta) <= kSup)
                                        A[static_cast<std::size_t>(row) * nu + slot(a2, b2, delta)] -= wt;
                                    else
                                        rhs[row] += wt * poly_value(a2, b2, delta);
                                }
                            }
                        }
                    }
                }
            }
        }
        solve_dense(A, rhs, nu);
        values_ = std::move(rhs);
        nd_ = nd;
    }

    double value(int a, int b, int D) const { return values_[(a * 3 + b) * nd_ + (D + kSup)]; }

    static const ConnectionTable& get(int q);

private:
    int q_;
    int nd_ = 0;
    std::vector<double> values_;
};

const ConnectionTable& ConnectionTable::get(int q) {
    static std::map<int, ConnectionTable> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(q);
    if (it == cache.end()) it = cache.emplace(q, ConnectionTable(q)).first;
    return it->second;
}

/// ---- aperiodic multilevel DWT ----------------------------------------------

struct Band {
    int j = 0;
    bool wavelet = true;
    int lo = 0, hi = 0;  // translation range, inclusive
    int pos = 0;         // start offset in the flat vector
    int len() const { return hi - lo + 1; }
};

struct AxisLayout {
    int j0 = 0, jf = 0;
    int fine_lo = 0, fine_hi = 0;
    std::vector<Band> bands;  // scaling@j0 first, then wavelets j0..jf-1
    int total = 0;

    const Band& wavelet_band(int j) const {
        return bands[static_cast<std::size_t>(1 + (j - j0))];
    }
};

AxisLayout make_layout(int j0, int jf, int lo, int hi) {
    AxisLayout L;
    L.j0 = j0;
    L.jf = jf;
    L.fine_lo = lo;
    L.fine_hi = hi;
    std::vector<Band> wav;
    int clo = lo, chi = hi;
    for (int j = jf; j > j0; --j) {
        int plo = static_cast<int>(std::ceil((clo - kSup) / 2.0));
        int phi = static_cast<int>(std::floor(chi / 2.0));
        wav.push_back({j - 1, true, plo, phi, 0});
        clo = plo;
        chi = phi;
    }
    L.bands.push_back({j0, false, clo, chi, 0});
    for (auto it = wav.rbegin(); it != wav.rend(); ++it) L.bands.push_back(*it);
    int pos = 0;
    for (auto& b : L.bands) {
        b.pos = pos;
        pos += b.len();
    }
    L.total = pos;
    return L;
}

// full multilevel analysis of one signal (input indexed fine_lo..fine_hi)
void transform_1d(const AxisLayout& L, const double* in, double* out) {
    static const auto& h = DaubechiesWavelet::lowpass();
    static const auto g = DaubechiesWavelet::highpass();
    std::vector<double> cur(in, in + (L.fine_hi - L.fine_lo + 1));
    int clo = L.fine_lo, chi = L.fine_hi;
    for (int j = L.jf; j > L.j0; --j) {
        const Band& wb = L.wavelet_band(j - 1);
        std::vector<double> nxt(wb.len(), 0.0);
        for (int k = wb.lo; k <= wb.hi; ++k) {
            double a = 0.0, d = 0.0;
            for (int n = 0; n < kTaps; ++n) {
                int src = 2 * k + n;
                if (src < clo || src > chi) continue;
                double v = cur[src - clo];
                a += h[n] * v;
                d += g[n] * v;
            }
            nxt[k - wb.lo] = a;
            out[wb.pos + (k - wb.lo)] = d;
        }
        cur.swap(nxt);
        clo = wb.lo;
        chi = wb.hi;
    }
    const Band& sb = L.bands[0];
    for (int k = sb.lo; k <= sb.hi; ++k) out[sb.pos + (k - sb.lo)] = cur[k - sb.lo];
}

double parseval_quadrature(const ModelKernel& f) {
    // ||f||^2 = int G(u)^2 [ int bx(x)^2 by(x-u)^2 dx ] du, split at u = 0
    auto inner = [&](double u) {
        double lo = std::max(0.0, u), hi = std::min(1.0, 1.0 + u);
        if (lo >= hi) return 0.0;
        return panel_integrate(
            [&](double x) {
                double bx = f.box_x(x), by = f.box_y(x - u);
                return bx * bx * by * by;
            },
            lo, hi, 24, 12);
    };
    auto outer = [&](double u) {
        double g = f.profile(u);
        return g * g * inner(u);
    };
    return adaptive_integrate(outer, -1.0, 0.0, 1e-13, 1e-9) +
           adaptive_integrate(outer, 0.0, 1.0, 1e-13, 1e-9);
}

}  // namespace

/// ---- analyze ----------------------------------------------------------------

CoefficientTable analyze(const ModelKernel& f, int j_max, const AnalysisOptions& opts) {
    if (j_max < opts.j0 + 1 || j_max > 10)
        throw std::domain_error("analyze: j_max out of range (j0+1 .. 10)");
    int jf = std::max(j_max + std::max(2, opts.fine_extra), f.singular ? 9 : 8);
    const int lo = -kSup, hi = (1 << jf) - 1;
    const int n = hi - lo + 1;
    if (f.singular && 2.0 * kSup / (1 << jf) > f.pure_radius)
        throw std::domain_error("analyze: fine level too coarse for the pure-power radius");

    const auto& w = DaubechiesWavelet::get();
    const auto& nodes = w.rule_nodes();
    const auto& wts = w.rule_weights();
    const int nrule = DaubechiesWavelet::kRuleNodes;
    const double cell = 1.0 / (1 << jf);
    const double center = kSup / 2.0;

    // fine-level projection
    std::vector<std::vector<double>> fine(n, std::vector<double>(n, 0.0));
    const ConnectionTable* conn = f.singular ? &ConnectionTable::get(f.power) : nullptr;
    run_parallel(n, opts.threads, [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) {
            int kx = lo + r;
            double x0 = cell * (kx + center);
            double bx0 = 0, bx1 = 0, bx2 = 0;
            if (conn) {
                double hstep = cell;
                double fp = f.box_x(x0 + hstep), fm = f.box_x(x0 - hstep), fc = f.box_x(x0);
                bx0 = fc;
                bx1 = (fp - fm) / (2.0 * hstep);
                bx2 = (fp - 2.0 * fc + fm) / (2.0 * hstep * hstep);
            }
            for (int s = 0; s < n; ++s) {
                int ky = lo + s;
                int delta = kx - ky;
                if (conn && std::abs(delta) <= kSup) {
                    // singular-line cell: exact |u|^q connection table with a
                    // second-order window Taylor expansion
                    double y0 = cell * (ky + center);
                    double hstep = cell;
                    double gp = f.box_y(y0 + hstep), gm = f.box_y(y0 - hstep), gc = f.box_y(y0);
                    double bx[3] = {bx0, bx1 * cell, 0.5 * bx2 * cell * cell};
                    double by[3] = {gc, (gp - gm) / (2.0 * hstep) * cell,
                                    0.5 * (gp - 2.0 * gc + gm) / (2.0 * hstep * hstep) * cell * cell};
                    double acc = 0.0;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) acc += bx[a] * by[b] * conn->value(a, b, delta);
                    fine[r][s] = cell * std::pow(cell, f.power) * acc;
                } else {
                    double acc = 0.0;
                    for (int i = 0; i < nrule; ++i) {
                        double x = cell * (kx + nodes[i]);
                        double bx = f.box_x(x);
                        if (bx == 0.0) continue;
                        double row_acc = 0.0;
                        for (int k = 0; k < nrule; ++k) {
                            double y = cell * (ky + nodes[k]);
                            row_acc += wts[k] * f.box_y(y) * f.profile(x - y);
                        }
                        acc += wts[i] * bx * row_acc;
                    }
                    fine[r][s] = cell * acc;
                }
            }
        }
    });

    // pyramid: rows (y axis), then columns (x axis)
    AxisLayout L = make_layout(opts.j0, jf, lo, hi);
    std::vector<std::vector<double>> rowt(n, std::vector<double>(L.total, 0.0));
    run_parallel(n, opts.threads, [&](int r0, int r1) {
        for (int r = r0; r < r1; ++r) transform_1d(L, fine[r].data(), rowt[r].data());
    });
    fine.clear();
    fine.shrink_to_fit();
    std::vector<std::vector<double>> full(L.total, std::vector<double>(L.total, 0.0));
    run_parallel(L.total, opts.threads, [&](int c0, int c1) {
        std::vector<double> col(n), out(L.total);
        for (int cidx = c0; cidx < c1; ++cidx) {
            for (int r = 0; r < n; ++r) col[r] = rowt[r][cidx];
            transform_1d(L, col.data(), out.data());
            for (int s = 0; s < L.total; ++s) full[s][cidx] = out[s];
        }
    });
    rowt.clear();
    rowt.shrink_to_fit();

    CoefficientTable table;
    table.dim = 1;
    table.j0 = opts.j0;
    table.j_max = j_max;
    double total = 0.0, kept = 0.0, tail_w = 0.0;
    for (const auto& bx : L.bands) {
        bool keep_x = !bx.wavelet || bx.j <= j_max;
        for (const auto& by : L.bands) {
            bool keep = keep_x && (!by.wavelet || by.j <= j_max);
            double wfac = std::pow(2.0, std::max(bx.j, by.j));
            for (int t1 = 0; t1 < bx.len(); ++t1) {
                const double* rowp = full[bx.pos + t1].data();
                for (int t2 = 0; t2 < by.len(); ++t2) {
                    double v = rowp[by.pos + t2];
                    double v2 = v * v;
                    total += v2;
                    if (keep) {
                        kept += v2;
                        WaveletIndex idx;
                        idx.dim = 1;
                        idx.j1 = bx.j;
                        idx.j2 = by.j;
                        idx.s1 = bx.wavelet ? 1 : 0;
                        idx.s2 = by.wavelet ? 1 : 0;
                        idx.a1 = {bx.lo + t1, 0, 0};
                        idx.a2 = {by.lo + t2, 0, 0};
                        if (v2 > 1e-28) table.entries.emplace(idx, v);
                    } else {
                        tail_w += wfac * wfac * v2;
                    }
                }
            }
        }
    }
    table.total_energy = total;
    table.table_energy = kept;
    table.tail_energy = total - kept;
    table.tail_energy_weighted = tail_w;
    table.quad_l2_sq = parseval_quadrature(f);
    return table;
}

/// ---- direct per-coefficient oracle ------------------------------------------

namespace {

struct AxisSamples {
    std::vector<double> x, wv;  // node position and weight * wavelet value
};

AxisSamples axis_samples(int j, unsigned s, int a, int res_log2) {
    const auto& w = DaubechiesWavelet::get();
    AxisSamples out;
    int panels = kSup << res_log2;
    double scale = std::pow(2.0, j);
    double width = static_cast<double>(kSup) / panels;
    const auto& gl = GaussLegendre::get(2);
    out.x.reserve(panels * 2);
    out.wv.reserve(panels * 2);
    for (int pnl = 0; pnl < panels; ++pnl) {
        for (int qq = 0; qq < 2; ++qq) {
            double t = (pnl + 0.5 * (1.0 + gl.nodes[qq])) * width;
            double xx = (t + a) / scale;
            double val = s ? w.psi(t) : w.phi(t);
            out.x.push_back(xx);
            out.wv.push_back(0.5 * width * gl.weights[qq] * val * std::sqrt(scale) / scale);
        }
    }
    return out;
}

}  // namespace

double direct_coefficient(const ModelKernel& f, const WaveletIndex& idx) {
    if (idx.dim != 1) throw std::invalid_argument("direct_coefficient: 1+1 indices only");
    int res = 4;
    AxisSamples sx = axis_samples(idx.j1, idx.s1, idx.a1[0], res);
    AxisSamples sy = axis_samples(idx.j2, idx.s2, idx.a2[0], res);
    double acc = 0.0;
    for (std::size_t i = 0; i < sx.x.size(); ++i) {
        double xi = sx.x[i], wi = sx.wv[i];
        double bx = f.box_x(xi);
        if (bx == 0.0 || wi == 0.0) continue;
        double row = 0.0;
        for (std::size_t k = 0; k < sy.x.size(); ++k)
            row += sy.wv[k] * f.box_y(sy.x[k]) * f.profile(xi - sy.x[k]);
        acc += wi * bx * row;
    }
    return acc;
}

/// ---- level-decay fits --------------------------------------------------------

namespace {

bool boxes_touch(int j1, int a1, int j2, int a2) {
    double lo1 = std::ldexp(static_cast<double>(a1), -j1);
    double hi1 = std::ldexp(static_cast<double>(a1 + kSup), -j1);
    double lo2 = std::ldexp(static_cast<double>(a2), -j2);
    double hi2 = std::ldexp(static_cast<double>(a2 + kSup), -j2);
    double dist = std::max({0.0, lo2 - hi1, lo1 - hi2});
    return dist <= std::ldexp(static_cast<double>(kSup), -j2);
}

bool box_in_center(int j, int a) {
    // support intersects the central window [0.3, 0.7]
    double lo = std::ldexp(static_cast<double>(a), -j);
    double hi = std::ldexp(static_cast<double>(a + kSup), -j);
    return hi >= 0.3 && lo <= 0.7;
}

}  // namespace

std::vector<LevelMax> touching_max(const CoefficientTable& table) {
    std::map<std::pair<int, int>, double> acc;
    for (const auto& [idx, v] : table.entries) {
        if (!idx.s1 || !idx.s2 || idx.j1 < idx.j2) continue;
        if (!boxes_touch(idx.j1, idx.a1[0], idx.j2, idx.a2[0])) continue;
        auto& slot2 = acc[{idx.j1, idx.j2}];
        slot2 = std::max(slot2, std::abs(v));
    }
    std::vector<LevelMax> out;
    for (const auto& [key, v] : acc) out.push_back({key.first, key.second, v});
    return out;
}

std::vector<LevelMax> touching_max_oracle(const ModelKernel& f, int j1_max, int j2_max, int j0) {
    std::vector<WaveletIndex> jobs;
    for (int j1 = j0 + 1; j1 <= j1_max; ++j1) {
        for (int j2 = j0 + 1; j2 <= std::min(j1, j2_max); ++j2) {
            for (int a2 = -kSup; a2 < (1 << j2); ++a2) {
                if (!box_in_center(j2, a2)) continue;
                for (int a1 = -kSup; a1 < (1 << j1); ++a1) {
                    if (!boxes_touch(j1, a1, j2, a2)) continue;
                    WaveletIndex idx;
                    idx.j1 = j1;
                    idx.j2 = j2;
                    idx.a1 = {a1, 0, 0};
                    idx.a2 = {a2, 0, 0};
                    jobs.push_back(idx);
                }
            }
        }
    }
    std::vector<double> vals(jobs.size(), 0.0);
    run_parallel(static_cast<int>(jobs.size()), 0, [&](int lo, int hi) {
        for (int i = lo; i < hi; ++i) vals[i] = std::abs(direct_coefficient(f, jobs[i]));
    });
    std::map<std::pair<int, int>, double> acc;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        auto& slot2 = acc[{jobs[i].j1, jobs[i].j2}];
        slot2 = std::max(slot2, vals[i]);
    }
    std::vector<LevelMax> out;
    for (const auto& [key, v] : acc) out.push_back({key.first, key.second, v});
    return out;
}

TwoSlopeFit fit_level_decay(const std::vector<LevelMax>& data) {
    // least squares for log2 max = c - beta1 j1 + beta2 j2
    double S = 0, S1 = 0, S2 = 0, S11 = 0, S22 = 0, S12 = 0, Sy = 0, S1y = 0, S2y = 0;
    for (const auto& d : data) {
        if (d.max_coef <= 0.0) continue;
        double y = std::log2(d.max_coef);
        S += 1;
        S1 += d.j1;
        S2 += d.j2;
        S11 += static_cast<double>(d.j1) * d.j1;
        S22 += static_cast<double>(d.j2) * d.j2;
        S12 += static_cast<double>(d.j1) * d.j2;
        Sy += y;
        S1y += d.j1 * y;
        S2y += d.j2 * y;
    }
    if (S < 4) throw std::invalid_argument("fit_level_decay: need >= 4 level pairs");
    std::vector<double> A{S, S1, S2, S1, S11, S12, S2, S12, S22};
    std::vector<double> b{Sy, S1y, S2y};
    solve_dense(A, b, 3);
    TwoSlopeFit fit;
    fit.beta1 = -b[1];
    fit.beta2 = b[2];
    return fit;
}

BoundCheckReport coefficient_bound_check(const CoefficientTable& table, const ModelKernel& f,
                                         int oracle_j_max) {
    BoundCheckReport rep;
    int jtop = std::min(table.j_max, oracle_j_max);
    rep.oracle_max = touching_max_oracle(f, jtop, jtop, table.j0);
    // matched restriction of the table maxima (same levels and center window)
    std::map<std::pair<int, int>, double> acc;
    for (const auto& [idx, v] : table.entries) {
        if (!idx.s1 || !idx.s2 || idx.j1 < idx.j2 || idx.j1 > jtop) continue;
        if (idx.j2 <= table.j0) continue;  // match the oracle's level range
        if (!box_in_center(idx.j2, idx.a2[0])) continue;
        if (!boxes_touch(idx.j1, idx.a1[0], idx.j2, idx.a2[0])) continue;
        auto& slot2 = acc[{idx.j1, idx.j2}];
        slot2 = std::max(slot2, std::abs(v));
    }
    for (const auto& [key, v] : acc) rep.table_max.push_back({key.first, key.second, v});
    if (rep.table_max.size() < 4 || rep.oracle_max.size() < 4) {
        rep.conclusive = false;
        return rep;
    }
    rep.fitted = fit_level_decay(rep.table_max);
    rep.oracle = fit_level_decay(rep.oracle_max);
    auto close = [](double a, double b) {
        return std::abs(a - b) <= std::max(0.15 * std::abs(b), 0.2);
    };
    rep.pass = close(rep.fitted.beta1, rep.oracle.beta1) && close(rep.fitted.beta2, rep.oracle.beta2);
    return rep;
}

/// ---- best-N-term -------------------------------------------------------------

ApproxRateReport best_n_term(const CoefficientTable& table, std::vector<std::size_t> N_list,
                             bool weighted) {
    std::vector<double> mags;
    mags.reserve(table.entries.size());
    double energy = 0.0;
    for (const auto& [idx, v] : table.entries) {
        double m = std::abs(v);
        if (weighted) m *= std::pow(2.0, std::max(idx.j1, idx.j2));
        mags.push_back(m);
        energy += m * m;
    }
    // map order is lexicographic in the index; stable sort keeps that order
    // among equal magnitudes (documented tie-break)
    std::stable_sort(mags.begin(), mags.end(), std::greater<double>());
    std::vector<double> prefix(mags.size() + 1, 0.0);
    for (std::size_t i = 0; i < mags.size(); ++i) prefix[i + 1] = prefix[i] + mags[i] * mags[i];
    double floor_sq = weighted ? table.tail_energy_weighted : table.tail_energy;

    ApproxRateReport rep;
    rep.floor_sigma = std::sqrt(std::max(0.0, floor_sq));
    std::sort(N_list.begin(), N_list.end());
    for (std::size_t N : N_list) {
        std::size_t nn = std::min(N, mags.size());
        double rem = std::max(0.0, energy - prefix[nn]) + floor_sq;
        rep.N.push_back(N);
        rep.sigma.push_back(std::sqrt(rem));
    }
    // fitted decay over the largest decade of N that stays above the
    // truncation floor
    std::size_t fit_hi = 0;
    for (std::size_t i = 0; i < rep.N.size(); ++i)
        if (rep.sigma[i] > 5.0 * rep.floor_sigma && rep.sigma[i] > 0.0) fit_hi = i;
    if (fit_hi >= 2) {
        double nmax = static_cast<double>(rep.N[fit_hi]);
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int cnt = 0;
        for (std::size_t i = 0; i <= fit_hi; ++i) {
            if (rep.N[i] < nmax / 10.0 || rep.sigma[i] <= 0.0) continue;
            double lx = std::log2(static_cast<double>(rep.N[i])), ly = std::log2(rep.sigma[i]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++cnt;
        }
        if (cnt >= 2) rep.fitted_decay_rate = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    }
    return rep;
}

/// ---- Besov threshold -----------------------------------------------------------

std::pair<double, double> besov_threshold(double p) {
    if (p >= -1.0) throw std::domain_error("besov_threshold: formula pole at p >= -1");
    double q_min = -3.0 / (1.0 + p);
    double alpha_max = 3.0 / q_min - 1.5;
    return {q_min, alpha_max};
}

/// ---- coarse 3+3 smoke mode ------------------------------------------------------

namespace {

double gauss_window(double x) { return std::exp(-10.0 * (x - 0.5) * (x - 0.5)); }

// 1D correlation T(z) = int w1(x) g(x) w2(x - z) dx on a uniform z-grid
struct Correlation {
    double z_lo = 0, dz = 0;
    std::vector<double> vals;

    double at(double z) const {
        double t = (z - z_lo) / dz;
        if (t <= 0.0 || t >= static_cast<double>(vals.size() - 1)) return 0.0;
        auto i = static_cast<std::size_t>(t);
        double fr = t - static_cast<double>(i);
        return vals[i] * (1.0 - fr) + vals[i + 1] * fr;
    }
};

Correlation axis_correlation(int j1, bool w1, int a1, int j2, bool w2, int a2) {
    const auto& w = DaubechiesWavelet::get();
    double lo1 = std::ldexp(static_cast<double>(a1), -j1);
    double hi1 = std::ldexp(static_cast<double>(a1 + kSup), -j1);
    double lo2 = std::ldexp(static_cast<double>(a2), -j2);
    double hi2 = std::ldexp(static_cast<double>(a2 + kSup), -j2);
    Correlation corr;
    corr.z_lo = lo1 - hi2;
    double z_hi = hi1 - lo2;
    const int ngrid = 192;
    corr.dz = (z_hi - corr.z_lo) / (ngrid - 1);
    corr.vals.assign(ngrid, 0.0);
    double s1 = std::pow(2.0, j1), s2 = std::pow(2.0, j2);
    for (int i = 0; i < ngrid; ++i) {
        double z = corr.z_lo + i * corr.dz;
        double xlo = std::max(lo1, lo2 + z), xhi = std::min(hi1, hi2 + z);
        if (xlo >= xhi) continue;
        corr.vals[i] = panel_integrate(
            [&](double x) {
                double t1 = s1 * x - a1, t2 = s2 * (x - z) - a2;
                double v1 = w1 ? w.psi(t1) : w.phi(t1);
                double v2 = w2 ? w.psi(t2) : w.phi(t2);
                return std::sqrt(s1) * v1 * gauss_window(x) * std::sqrt(s2) * v2;
            },
            xlo, xhi, kSup << 4, 2);
    }
    return corr;
}

}  // namespace

CoefficientTable analyze_3p3(int p, int j_max, int window) {
    if (p > -4) throw std::domain_error("analyze_3p3: requires p <= -4");
    if (j_max < 1 || j_max > 4) throw std::domain_error("analyze_3p3: j_max must be 1..4");
    int q = -3 - p;
    const Cutoff& cut = profile_cutoff();
    CoefficientTable table;
    table.dim = 3;
    table.j0 = 0;
    table.j_max = j_max;

    for (int j1 = 1; j1 <= j_max; ++j1) {
        for (int j2 = 1; j2 <= j1; ++j2) {
            int c1 = static_cast<int>(std::round(0.5 * (1 << j1))) - kSup / 2;
            int c2 = static_cast<int>(std::round(0.5 * (1 << j2))) - kSup / 2;
            for (unsigned mask : {1u, 7u}) {
                for (int w1 = -window; w1 <= window; ++w1) {
                    for (int w2 = -window; w2 <= window; ++w2) {
                        WaveletIndex idx;
                        idx.dim = 3;
                        idx.j1 = j1;
                        idx.j2 = j2;
                        idx.s1 = mask;
                        idx.s2 = mask;
                        idx.a1 = {c1 + w1, c1 + w2, c1};
                        idx.a2 = {c2 + w1, c2 + w2, c2};
                        std::array<Correlation, 3> corr;
                        for (int ax = 0; ax < 3; ++ax)
                            corr[ax] = axis_correlation(j1, (mask >> ax) & 1u, idx.a1[ax], j2,
                                                        (mask >> ax) & 1u, idx.a2[ax]);
                        const int ng = 48;
                        double acc = 0.0;
                        std::array<double, 3> zlo{}, dz{};
                        for (int ax = 0; ax < 3; ++ax) {
                            zlo[ax] = corr[ax].z_lo;
                            dz[ax] = (corr[ax].dz * (corr[ax].vals.size() - 1)) / ng;
                        }
                        for (int iz = 0; iz < ng; ++iz) {
                            double z1 = zlo[0] + (iz + 0.5) * dz[0];
                            double t1 = corr[0].at(z1);
                            if (t1 == 0.0) continue;
                            for (int iy = 0; iy < ng; ++iy) {
                                double z2 = zlo[1] + (iy + 0.5) * dz[1];
                                double t2 = corr[1].at(z2);
                                if (t2 == 0.0) continue;
                                for (int ix = 0; ix < ng; ++ix) {
                                    double z3 = zlo[2] + (ix + 0.5) * dz[2];
                                    double t3 = corr[2].at(z3);
                                    if (t3 == 0.0) continue;
                                    double r = std::sqrt(z1 * z1 + z2 * z2 + z3 * z3);
                                    acc += t1 * t2 * t3 * std::pow(r, q) * cut(r);
                                }
                            }
                        }
                        double v = acc * dz[0] * dz[1] * dz[2];
                        table.entries.emplace(idx, v);
                        table.table_energy += v * v;
                    }
                }
            }
        }
    }
    table.total_energy = table.table_energy;
    return table;
}

}  // namespace symcalc
