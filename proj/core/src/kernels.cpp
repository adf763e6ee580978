#include "diracbvp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <utility>

#include "diracbvp/error.hpp"
#include "diracbvp/ode.hpp"

namespace diracbvp {

namespace {

constexpr Complex kZero{0.0, 0.0};

void check_channel(const WeightProfile& profile, int idx, const char* what) {
    if (idx < 0 || idx >= profile.n()) fail("IndexOutOfRange", std::string(what) + " outside 0..n-1");
}

// Potential continued past [0, ell] by zero with a C^1 (Hermite) taper of
// width delta: matching value and one-sided slope at the endpoint keeps the
// extension kink-free, which preserves second-order accuracy of the linear
// interpolation between characteristic grid lines near the domain corners.
struct ExtendedQ {
    const PotentialMatrix* Q = nullptr;
    double ell = 0.0;
    double delta = 0.0;
    Eigen::MatrixXcd left, right;   // endpoint values
    Eigen::MatrixXcd dleft, dright; // one-sided endpoint slopes

    static ExtendedQ make(const PotentialMatrix& Q, double ell) {
        ExtendedQ e;
        e.Q = &Q;
        e.ell = ell;
        e.delta = ell / 50.0;
        e.left = Q.eval(0.0);
        e.right = Q.eval(ell);
        const double h = e.delta / 8.0;
        e.dleft = (-3.0 * e.left + 4.0 * Q.eval(h) - Q.eval(2.0 * h)) / (2.0 * h);
        e.dright = (3.0 * e.right - 4.0 * Q.eval(ell - h) + Q.eval(ell - 2.0 * h)) / (2.0 * h);
        return e;
    }

    Complex entry(int j, int p, double u) const {
        if (u >= 0.0 && u <= ell) return Q->entry_eval(j, p, u);
        if (u < 0.0) {
            if (u <= -delta) return kZero;
            const double s = (u + delta) / delta; // 0 at -delta, 1 at 0
            return left(j, p) * (s * s * (3.0 - 2.0 * s)) +
                   delta * dleft(j, p) * (s * s * (s - 1.0));
        }
        if (u >= ell + delta) return kZero;
        const double v = (u - ell) / delta; // 0 at ell, 1 at ell+delta
        return right(j, p) * ((1.0 - v) * (1.0 - v) * (1.0 + 2.0 * v)) +
               delta * dright(j, p) * (v * (1.0 - v) * (1.0 - v));
    }
};

// Abscissa extent and lower edge of the kernel-column domain. The extent is
// fixed by where the characteristic through (ell, 0) of each separated
// channel pair meets the diagonal: inside [0, ell] the pair contributes the
// plain triangle; an anchor left of 0 extends the domain left of 0 with the
// curve itself as lower edge; an anchor right of ell extends it right of ell.
struct ColumnGeometry {
    int n = 0;
    int k = 0;
    double ell = 0.0;
    double u0 = 0.0;
    double du = 0.0;
    int nu = 0;
    std::vector<int> kase;    // 0 = shares the column weight, else 1/2/3 as above
    std::vector<double> a_l0; // diagonal anchor of the curve through (ell, 0)
    Eigen::MatrixXd rho_tab;  // (channel, node)
    Eigen::MatrixXd beta_tab; // (channel, node)
    std::vector<double> lower;

    double node(int i) const { return u0 + du * double(i); }
};

double lower_edge_exact(const WeightProfile& pr, const ColumnGeometry& g, double u) {
    double lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.n; ++j) {
        switch (g.kase[j]) {
        case 1:
            if (u >= 0.0 && u <= g.ell) lo = std::min(lo, 0.0);
            break;
        case 2:
            if (u >= g.a_l0[j] && u <= g.ell)
                lo = std::min(lo, pr.rho_inverse(g.k, pr.rho(j, u) - pr.rho(j, g.ell)));
            break;
        case 3:
            if (u >= 0.0 && u <= g.ell)
                lo = std::min(lo, 0.0);
            else if (u > g.ell && u <= g.a_l0[j])
                lo = std::min(lo, pr.rho_inverse(g.k, pr.rho(j, u) - pr.rho(j, g.ell)));
            break;
        default:
            break;
        }
    }
    if (!std::isfinite(lo)) lo = u; // no separated partner: edge collapses to the diagonal
    return std::min(lo, u);
}

ColumnGeometry build_geometry(const WeightProfile& pr, int k, int grid) {
    ColumnGeometry g;
    g.n = pr.n();
    g.k = k;
    g.ell = pr.ell();
    g.kase.assign(g.n, 0);
    g.a_l0.assign(g.n, 0.0);
    const int kb = pr.block_of(k);
    double am = 0.0, ap = g.ell;
    for (int j = 0; j < g.n; ++j) {
        if (pr.block_of(j) == kb) continue;
        const double a0 = pr.diff_inverse(j, k, pr.rho(j, g.ell));
        g.a_l0[j] = a0;
        if (a0 < 0.0) {
            g.kase[j] = 2;
            am = std::min(am, a0);
        } else if (a0 > g.ell) {
            g.kase[j] = 3;
            ap = std::max(ap, a0);
        } else {
            g.kase[j] = 1;
        }
    }
    g.u0 = am;
    g.nu = grid;
    g.du = (ap - am) / double(grid);
    g.rho_tab.resize(g.n, grid + 1);
    g.beta_tab.resize(g.n, grid + 1);
    g.lower.resize(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        const double u = g.node(i);
        for (int p = 0; p < g.n; ++p) {
            g.rho_tab(p, i) = pr.rho(p, u);
            g.beta_tab(p, i) = pr.beta(p, u);
        }
    }
    for (int i = 0; i <= grid; ++i) g.lower[i] = lower_edge_exact(pr, g, g.node(i));
    return g;
}

// Per-row sweep geometry: the characteristic-label grid, the anchor of each
// characteristic (diagonal point for separated rows, lower-edge point for
// rows sharing the column weight), and data frozen at the anchors.
struct RowGeom {
    bool cross = false;
    double c_lo = 0.0;
    double dc = 0.0;
    int nc = 0;
    std::vector<double> anchor_u;
    std::vector<Complex> start;
    Eigen::MatrixXd anchor_cp; // (level, channel): label of channel p's row at the anchor
    Eigen::MatrixXcd anchor_q; // (level, channel): extended Q_{jp} at the anchor
};

double same_block_anchor(const WeightProfile& pr, const ColumnGeometry& g, double c) {
    const double a_flat = pr.rho_inverse(g.k, c);
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < g.n; ++j) {
        double cand = std::numeric_limits<double>::infinity();
        switch (g.kase[j]) {
        case 1:
            cand = a_flat;
            break;
        case 2:
            cand = pr.diff_inverse(j, g.k, pr.rho(j, g.ell) - c);
            break;
        case 3:
            cand = (a_flat <= g.ell) ? a_flat : pr.diff_inverse(j, g.k, pr.rho(j, g.ell) - c);
            break;
        default:
            break;
        }
        best = std::min(best, cand);
    }
    if (!std::isfinite(best)) best = a_flat;
    return best;
}

RowGeom build_row(const WeightProfile& pr, const ColumnGeometry& g, const ExtendedQ& extq, int j,
                  int grid) {
    RowGeom r;
    r.nc = grid;
    r.cross = pr.block_of(j) != pr.block_of(g.k);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= g.nu; ++i) {
        const double cd = g.rho_tab(j, i) - g.rho_tab(g.k, i);
        const double cl = g.rho_tab(j, i) - pr.rho(g.k, g.lower[i]);
        lo = std::min(lo, std::min(cd, cl));
        hi = std::max(hi, std::max(cd, cl));
    }
    double width = hi - lo;
    if (!(width > 1e-12 * (1.0 + std::abs(lo) + std::abs(hi)))) {
        // collapsed label range (single-block column with zero coupling)
        width = std::max(1.0, std::abs(pr.b(g.k)));
        hi = lo + width;
    }
    const double pad = 0.01 * width;
    r.c_lo = lo - pad;
    r.dc = (width + 2.0 * pad) / double(grid);
    r.anchor_u.resize(grid + 1);
    r.start.resize(grid + 1);
    r.anchor_cp.resize(grid + 1, g.n);
    r.anchor_q.resize(grid + 1, g.n);
    for (int q = 0; q <= grid; ++q) {
        const double c = r.c_lo + r.dc * double(q);
        const double a_exact =
            r.cross ? pr.diff_inverse(j, g.k, c) : same_block_anchor(pr, g, c);
        if (r.cross) {
            const double bj = pr.beta(j, a_exact), bk = pr.beta(g.k, a_exact);
            r.start[q] = extq.entry(j, g.k, a_exact) / (bj - bk);
        } else {
            r.start[q] = kZero;
        }
        r.anchor_u[q] = a_exact;
        for (int p = 0; p < g.n; ++p) {
            r.anchor_cp(q, p) = pr.rho(p, a_exact) - pr.rho(j, a_exact) + c;
            r.anchor_q(q, p) = extq.entry(j, p, a_exact);
        }
    }
    return r;
}

// linear interpolation across characteristic lines at an exact grid node
inline Complex tab_node(const RowGeom& rg, const Eigen::MatrixXcd& tab, double c, int i) {
    double q = (c - rg.c_lo) / rg.dc;
    q = std::clamp(q, 0.0, double(rg.nc));
    const int iq = std::min(int(q), rg.nc - 1);
    const double f = q - double(iq);
    return tab(iq, i) * (1.0 - f) + tab(iq + 1, i) * f;
}

// bilinear interpolation at a general abscissa
inline Complex tab_general(const ColumnGeometry& g, const RowGeom& rg, const Eigen::MatrixXcd& tab,
                           double c, double u) {
    double s = (u - g.u0) / g.du;
    s = std::clamp(s, 0.0, double(g.nu));
    const int i = std::min(int(s), g.nu - 1);
    const double f = s - double(i);
    return tab_node(rg, tab, c, i) * (1.0 - f) + tab_node(rg, tab, c, i + 1) * f;
}

// One fixed-point sweep of row j: along each characteristic, the new value is
// the anchor value minus the running trapezoid integral of
// sum_p Q_{jp}(u) R_{pk}(u, .) taken from the anchor.
void sweep_row(const ColumnGeometry& g, const std::vector<RowGeom>& rows,
               const std::vector<Eigen::MatrixXcd>& qtab, int j,
               const std::vector<Eigen::MatrixXcd>& src, Eigen::MatrixXcd& dst,
               std::vector<Complex>& gbuf) {
    const RowGeom& rg = rows[j];
    const Eigen::MatrixXcd& qrow = qtab[j];
    for (int q = 0; q <= rg.nc; ++q) {
        const double c = rg.c_lo + rg.dc * double(q);
        for (int i = 0; i <= g.nu; ++i) {
            Complex s = kZero;
            for (int p = 0; p < g.n; ++p) {
                const Complex qjp = qrow(p, i);
                if (qjp == kZero) continue;
                const double cp = g.rho_tab(p, i) - g.rho_tab(j, i) + c;
                s += qjp * tab_node(rows[p], src[p], cp, i);
            }
            gbuf[i] = s;
        }
        const double a = rg.anchor_u[q];
        Complex ga = kZero;
        for (int p = 0; p < g.n; ++p) {
            const Complex qa = rg.anchor_q(q, p);
            if (qa == kZero) continue;
            ga += qa * tab_general(g, rows[p], src[p], rg.anchor_cp(q, p), a);
        }
        const double spos = (a - g.u0) / g.du;
        if (spos >= double(g.nu)) {
            // anchor at or beyond the last node: every node is on the down side
            Complex acc = kZero;
            const double hb = a - g.node(g.nu);
            if (hb > 0.0) acc += 0.5 * hb * (ga + gbuf[g.nu]);
            dst(q, g.nu) = rg.start[q] + acc;
            for (int i = g.nu; i > 0; --i) {
                acc += 0.5 * g.du * (gbuf[i] + gbuf[i - 1]);
                dst(q, i - 1) = rg.start[q] + acc;
            }
        } else {
            const int iup = std::max(0, int(std::ceil(spos - 1e-12)));
            // up side (the first panel spans more than one step when a < u0)
            {
                Complex acc = kZero;
                const double ha = g.node(iup) - a;
                if (ha > 0.0) acc += 0.5 * ha * (ga + gbuf[iup]);
                dst(q, iup) = rg.start[q] - acc;
                for (int i = iup; i < g.nu; ++i) {
                    acc += 0.5 * g.du * (gbuf[i] + gbuf[i + 1]);
                    dst(q, i + 1) = rg.start[q] - acc;
                }
            }
            if (iup > 0) {
                const int idn = iup - 1;
                Complex acc = kZero;
                const double hb = a - g.node(idn);
                if (hb > 0.0) acc += 0.5 * hb * (ga + gbuf[idn]);
                dst(q, idn) = rg.start[q] + acc;
                for (int i = idn; i > 0; --i) {
                    acc += 0.5 * g.du * (gbuf[i] + gbuf[i - 1]);
                    dst(q, i - 1) = rg.start[q] + acc;
                }
            }
        }
    }
}

double factorial_envelope(double c0, double rate, int depth) {
    if (!(rate > 0.0) || c0 == 0.0) return 0.0;
    return c0 * std::exp(double(depth) * std::log(rate) - std::lgamma(double(depth) + 1.0));
}

} // namespace

double CharacteristicMaps::gamma(double x, double t, double u) const {
    return profile->rho_inverse(k, profile->rho(j, u) - profile->rho(j, x) + profile->rho(k, t));
}

double CharacteristicMaps::a(double x, double t) const {
    if (profile->beta_equiv(j, k))
        fail("EqualWeights", "diagonal anchor undefined for identical channel weights");
    return profile->diff_inverse(j, k, profile->rho(j, x) - profile->rho(k, t));
}

CharacteristicMaps characteristic_maps(const WeightProfile& profile, int j, int k) {
    check_channel(profile, j, "row index");
    check_channel(profile, k, "column index");
    return CharacteristicMaps{std::make_shared<WeightProfile>(profile), j, k};
}

double KernelGrid::lower_boundary(double u) const {
    if (lower_.empty()) return 0.0;
    double s = (u - u0_) / du_;
    if (s <= 0.0) return lower_.front();
    if (s >= double(nu_)) return lower_.back();
    const int i = std::min(int(s), nu_ - 1);
    const double f = s - double(i);
    return lower_[std::size_t(i)] * (1.0 - f) + lower_[std::size_t(i) + 1] * f;
}

bool KernelGrid::contains(double x, double t, double slack) const {
    if (x < a_minus() - slack || x > a_plus() + slack) return false;
    if (t > x + slack) return false;
    return t >= lower_boundary(x) - slack;
}

Complex KernelGrid::eval_level(int j, double c, double u) const {
    if (j < 0 || j >= n_) fail("IndexOutOfRange", "kernel row outside 0..n-1");
    const Row& r = rows_[std::size_t(j)];
    const int nc = int(r.v.rows()) - 1;
    double s = (u - u0_) / du_;
    s = std::clamp(s, 0.0, double(nu_));
    const int i = std::min(int(s), nu_ - 1);
    const double fu = s - double(i);
    double q = (c - r.c_lo) / r.dc;
    q = std::clamp(q, 0.0, double(nc));
    const int iq = std::min(int(q), nc - 1);
    const double fq = q - double(iq);
    const Complex lowv = r.v(iq, i) * (1.0 - fq) + r.v(iq + 1, i) * fq;
    const Complex hiv = r.v(iq, i + 1) * (1.0 - fq) + r.v(iq + 1, i + 1) * fq;
    return lowv * (1.0 - fu) + hiv * fu;
}

Complex KernelGrid::eval(int j, double x, double t) const {
    if (j < 0 || j >= n_) fail("IndexOutOfRange", "kernel row outside 0..n-1");
    return eval_level(j, profile_->rho(j, x) - profile_->rho(k_, t), x);
}

Eigen::VectorXcd KernelGrid::eval_column(double x, double t) const {
    Eigen::VectorXcd out(n_);
    const double rk = profile_->rho(k_, t);
    for (int j = 0; j < n_; ++j) out[j] = eval_level(j, profile_->rho(j, x) - rk, x);
    return out;
}

std::vector<KernelGrid::Sample> KernelGrid::samples(int stride) const {
    if (stride < 1) fail("BadRepresentation", "sample stride must be >= 1");
    std::vector<Sample> out;
    for (int j = 0; j < n_; ++j) {
        const Row& r = rows_[std::size_t(j)];
        const int nc = int(r.v.rows()) - 1;
        for (int q = 0; q <= nc; q += stride) {
            const double c = r.c_lo + r.dc * double(q);
            for (int i = 0; i <= nu_; i += stride) {
                const double u = u0_ + du_ * double(i);
                const double t = profile_->rho_inverse(k_, profile_->rho(j, u) - c);
                if (!contains(u, t, 1e-7 * (1.0 + std::abs(u)))) continue;
                out.push_back(Sample{j, u, t, r.v(q, i)});
            }
        }
    }
    return out;
}

KernelGrid solve_goursat(const WeightProfile& profile, const PotentialMatrix& Q, int k,
                         int grid_size, int max_iter, double tol) {
    const int n = profile.n();
    check_channel(profile, k, "column index");
    if (Q.n() != n) fail("OrderMismatch", "potential order differs from weight count");
    if (grid_size < 8) fail("BadRepresentation", "kernel grid needs at least 8 intervals");
    if (max_iter < 1) fail("BadRepresentation", "need at least one sweep");
    if (!(tol >= 0.0)) fail("BadRepresentation", "tolerance must be nonnegative");
    const auto zb = validate_zero_block_diagonal(Q, profile);
    if (!zb.ok) {
        std::ostringstream msg;
        msg << "coupling between identical weights at entries";
        for (auto [a, b] : zb.offenders) msg << " (" << a << "," << b << ")";
        fail("BlockDiagonalityViolated", msg.str());
    }

    ColumnGeometry g = build_geometry(profile, k, grid_size);
    const ExtendedQ extq = ExtendedQ::make(Q, profile.ell());

    std::vector<Eigen::MatrixXcd> qtab(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        qtab[std::size_t(j)].resize(n, g.nu + 1);
        for (int p = 0; p < n; ++p)
            for (int i = 0; i <= g.nu; ++i)
                qtab[std::size_t(j)](p, i) = extq.entry(j, p, g.node(i));
    }

    std::vector<RowGeom> rows;
    rows.reserve(std::size_t(n));
    for (int j = 0; j < n; ++j) rows.push_back(build_row(profile, g, extq, j, grid_size));

    // a-priori contraction data (sup norms sampled on the abscissa grid)
    Eigen::MatrixXd supq = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < n; ++j)
        for (int p = 0; p < n; ++p)
            supq(j, p) = qtab[std::size_t(j)].row(p).cwiseAbs().maxCoeff();
    double qt_k = 0.0;
    for (int p = 0; p < n; ++p) {
        if (profile.block_of(p) == profile.block_of(k)) continue;
        double m = 0.0;
        for (int i = 0; i <= g.nu; ++i)
            m = std::max(m, std::abs(qtab[std::size_t(p)](k, i)) /
                                std::abs(g.beta_tab(p, i) - g.beta_tab(k, i)));
        qt_k = std::max(qt_k, m);
    }
    const double q_row = supq.row(k).sum();
    double tau = 0.0;
    for (int j = 0; j < n; ++j) {
        if (profile.block_of(j) == profile.block_of(k)) continue;
        tau = std::max(tau, q_row * supq(j, k) + supq.row(j).sum());
    }
    tau /= profile.theta();
    double span = 0.0;
    for (int i = 0; i <= g.nu; ++i)
        span = std::max(span, std::abs(g.rho_tab(k, i) - profile.rho(k, g.lower[std::size_t(i)])));

    std::vector<Eigen::MatrixXcd> cur(static_cast<std::size_t>(n));
    std::vector<Eigen::MatrixXcd> nxt(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        cur[std::size_t(j)] = Eigen::MatrixXcd::Zero(grid_size + 1, g.nu + 1);
        nxt[std::size_t(j)] = Eigen::MatrixXcd::Zero(grid_size + 1, g.nu + 1);
    }
    std::vector<Complex> gbuf(std::size_t(g.nu) + 1);
    std::vector<double> changes;
    int iterations = 0;
    bool converged = false;
    for (int m = 1; m <= max_iter; ++m) {
        for (int j = 0; j < n; ++j)
            if (rows[std::size_t(j)].cross) sweep_row(g, rows, qtab, j, cur, nxt[std::size_t(j)], gbuf);
        // rows sharing the column weight read the freshly swept separated
        // rows (their couplings to same-weight rows are structurally zero)
        for (int j = 0; j < n; ++j)
            if (!rows[std::size_t(j)].cross) sweep_row(g, rows, qtab, j, nxt, nxt[std::size_t(j)], gbuf);
        double change = 0.0;
        for (int j = 0; j < n; ++j)
            change = std::max(change,
                              (nxt[std::size_t(j)] - cur[std::size_t(j)]).cwiseAbs().maxCoeff());
        changes.push_back(change);
        cur.swap(nxt);
        iterations = m;
        if (change <= tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "kernel column " << k << " still changing by " << changes.back() << " after "
            << max_iter << " sweeps (tol " << tol << ", a-priori envelope "
            << factorial_envelope(std::max(qt_k, qt_k * q_row * (g.node(g.nu) - g.u0)), tau * span,
                                  max_iter)
            << ")";
        fail("NoConvergence", msg.str());
    }

    KernelGrid out;
    out.profile_ = std::make_shared<WeightProfile>(profile);
    out.k_ = k;
    out.n_ = n;
    out.u0_ = g.u0;
    out.du_ = g.du;
    out.nu_ = g.nu;
    out.lower_ = std::move(g.lower);
    out.rows_.resize(std::size_t(n));
    for (int j = 0; j < n; ++j) {
        out.rows_[std::size_t(j)].c_lo = rows[std::size_t(j)].c_lo;
        out.rows_[std::size_t(j)].dc = rows[std::size_t(j)].dc;
        out.rows_[std::size_t(j)].v = std::move(cur[std::size_t(j)]);
    }
    out.iterations_ = iterations;
    out.changes_ = std::move(changes);
    out.tau_ = tau;
    out.span_ = span;
    out.c0_ = std::max(qt_k, qt_k * q_row * (g.node(g.nu) - g.u0));
    return out;
}

TransformCheck verify_transform(const WeightProfile& profile, const PotentialMatrix& Q,
                                const Eigen::VectorXcd& A, const std::vector<Complex>& lambdas,
                                const std::vector<KernelGrid>& kernels, int grid_size) {
    const int n = profile.n();
    if (int(kernels.size()) != n) fail("KernelMissing", "need one solved kernel column per channel");
    for (int k = 0; k < n; ++k) {
        const KernelGrid& kg = kernels[std::size_t(k)];
        if (kg.column() != k)
            fail("KernelMissing", "slot " + std::to_string(k) + " holds column " +
                                      std::to_string(kg.column()));
        if (kg.channels() != n) fail("KernelMissing", "kernel channel count mismatch");
        const WeightProfile& wp = kg.weights();
        bool same = wp.n() == n && std::abs(wp.ell() - profile.ell()) <= 1e-12 * (1.0 + profile.ell());
        for (int p = 0; same && p < n; ++p)
            same = std::abs(wp.b(p) - profile.b(p)) <= 1e-10 * (1.0 + std::abs(profile.b(p)));
        if (!same) fail("KernelMissing", "kernel column built for different weights");
    }
    if (profile.block_count() != n)
        fail("SimpleSpectrumRequired",
             "triangular check needs pairwise separated channel weights (every block of size 1)");
    if (A.size() != n) fail("BadRepresentation", "start vector size differs from channel count");
    for (int j = 0; j < n; ++j)
        if (!(std::abs(A[j]) > 0.0)) fail("BadRepresentation", "start vector entries must be nonzero");
    if (lambdas.empty()) fail("BadRepresentation", "empty probe set");
    if (grid_size < 8) fail("BadRepresentation", "verification grid needs at least 8 intervals");

    const int N = grid_size;
    const double ell = profile.ell();
    const double h = ell / double(N);
    std::vector<double> xs(std::size_t(N) + 1);
    for (int q = 0; q <= N; ++q) xs[std::size_t(q)] = h * double(q);
    xs.back() = ell;
    Eigen::MatrixXd rv(n, N + 1), bv(n, N + 1);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q <= N; ++q) {
            rv(p, q) = profile.rho(p, xs[std::size_t(q)]);
            bv(p, q) = profile.beta(p, xs[std::size_t(q)]);
        }

    const auto idx = [](int i, int q) { return std::size_t(i) * (std::size_t(i) + 1) / 2 + std::size_t(q); };
    const std::size_t total = idx(N, N) + 1;

    // kernel values R(x_i, x_q), entered through the characteristic labels
    std::vector<Eigen::MatrixXcd> rtab(total);
    for (int i = 0; i <= N; ++i)
        for (int q = 0; q <= i; ++q) {
            Eigen::MatrixXcd m(n, n);
            for (int col = 0; col < n; ++col)
                for (int row = 0; row < n; ++row)
                    m(row, col) =
                        kernels[std::size_t(col)].eval_level(row, rv(row, i) - rv(col, q), xs[std::size_t(i)]);
            rtab[idx(i, q)] = std::move(m);
        }

    // second-kind Volterra solve for the diagonal corrector's boundary trace:
    // G(x) + int_0^x R(x,s) B(s) G(s) ds = -R(x,0) A
    std::vector<Eigen::VectorXcd> G(std::size_t(N) + 1);
    G[0] = -(rtab[idx(0, 0)] * A);
    Eigen::MatrixXcd M(n, n);
    for (int i = 1; i <= N; ++i) {
        Eigen::VectorXcd rhs = -(rtab[idx(i, 0)] * A);
        Eigen::VectorXcd bg(n);
        for (int q = 0; q < i; ++q) {
            const double w = (q == 0) ? 0.5 * h : h;
            for (int p = 0; p < n; ++p) bg[p] = bv(p, q) * G[std::size_t(q)][p];
            rhs.noalias() -= w * (rtab[idx(i, q)] * bg);
        }
        M = Eigen::MatrixXcd::Identity(n, n);
        for (int p = 0; p < n; ++p) M.col(p) += (0.5 * h * bv(p, i)) * rtab[idx(i, i)].col(p);
        G[std::size_t(i)] = M.partialPivLu().solve(rhs);
    }
    Eigen::MatrixXcd gt(n, N + 1);
    for (int i = 0; i <= N; ++i)
        for (int j = 0; j < n; ++j) gt(j, i) = G[std::size_t(i)][j] / A[j];

    // diagonal corrector P_j(x, t) = g_j(xi) with rho_j(xi) = rho_j(x) - rho_j(t)
    Eigen::MatrixXcd pt(n, Eigen::Index(total));
    for (int m = 0; m <= N; ++m)
        for (int q = 0; q <= m; ++q) {
            for (int j = 0; j < n; ++j) {
                const double xi = profile.rho_inverse(j, rv(j, m) - rv(j, q));
                double s = std::clamp(xi / h, 0.0, double(N));
                const int i0 = std::min(int(s), N - 1);
                const double f = s - double(i0);
                pt(j, Eigen::Index(idx(m, q))) = gt(j, i0) * (1.0 - f) + gt(j, i0 + 1) * f;
            }
        }

    // assembled kernel K(x_i, x_q) = R + P + int_{x_q}^{x_i} R(x_i, s) B(s) P(s, x_q) ds
    std::vector<Eigen::MatrixXcd> ktab(total);
    for (int i = 0; i <= N; ++i)
        for (int q = 0; q <= i; ++q) {
            Eigen::MatrixXcd km = rtab[idx(i, q)];
            for (int p = 0; p < n; ++p) km(p, p) += pt(p, Eigen::Index(idx(i, q)));
            if (i > q) {
                for (int m = q; m <= i; ++m) {
                    const double w = (m == q || m == i) ? 0.5 * h : h;
                    const Eigen::MatrixXcd& rim = rtab[idx(i, m)];
                    for (int p = 0; p < n; ++p)
                        km.col(p) += (w * bv(p, m) * pt(p, Eigen::Index(idx(m, q)))) * rim.col(p);
                }
            }
            ktab[idx(i, q)] = std::move(km);
        }

    TransformCheck report;
    report.lambdas = lambdas;
    report.grid_size = N;
    const std::vector<double> qbreaks = Q.interior_breakpoints(0.0, ell);
    const std::vector<double> wbreaks = profile.interior_breakpoints(0.0, ell);
    Eigen::MatrixXcd qbuf(n, n);
    for (const Complex lambda : lambdas) {
        // direct solution of Y' = (i lambda B - Q) Y, Y(0) = A, on the grid
        std::vector<Eigen::VectorXcd> Y(std::size_t(N) + 1);
        Eigen::MatrixXcd y = A;
        Y[0] = A;
        OdeOptions opt;
        opt.tol = 1e-11;
        auto rhsf = [&](double x, const Eigen::MatrixXcd& yy, Eigen::MatrixXcd& dy) {
            Q.eval_into(x, qbuf);
            dy.noalias() = -(qbuf * yy);
            for (int p = 0; p < n; ++p)
                dy(p, 0) += Complex(0.0, 1.0) * lambda * profile.beta(p, x) * yy(p, 0);
        };
        for (int q = 0; q < N; ++q) {
            std::vector<double> forced;
            for (double b : qbreaks)
                if (b > xs[std::size_t(q)] && b < xs[std::size_t(q) + 1]) forced.push_back(b);
            for (double b : wbreaks)
                if (b > xs[std::size_t(q)] && b < xs[std::size_t(q) + 1]) forced.push_back(b);
            integrate_matrix_ode(rhsf, y, xs[std::size_t(q)], xs[std::size_t(q) + 1], forced, opt);
            Y[std::size_t(q) + 1] = y;
        }
        Eigen::MatrixXcd ea(n, N + 1);
        for (int p = 0; p < n; ++p)
            for (int q = 0; q <= N; ++q)
                ea(p, q) = A[p] * std::exp(Complex(0.0, 1.0) * lambda * rv(p, q));
        double rmax = 0.0;
        Eigen::VectorXcd conv(n), bea(n);
        for (int i = 0; i <= N; ++i) {
            conv.setZero();
            if (i > 0) {
                for (int q = 0; q <= i; ++q) {
                    const double w = (q == 0 || q == i) ? 0.5 * h : h;
                    for (int p = 0; p < n; ++p) bea[p] = bv(p, q) * ea(p, q);
                    conv.noalias() += w * (ktab[idx(i, q)] * bea);
                }
            }
            const double d = (Y[std::size_t(i)] - ea.col(i) - conv).cwiseAbs().maxCoeff();
            rmax = std::max(rmax, d);
        }
        report.residuals.push_back(rmax);
        report.max_residual = std::max(report.max_residual, rmax);
    }
    return report;
}

} // namespace diracbvp
