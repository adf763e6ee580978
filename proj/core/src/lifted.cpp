#include "diracbvp/lifted.hpp"

#include <algorithm>

#include "diracbvp/error.hpp"
#include "diracbvp/ode.hpp"

namespace diracbvp {

namespace {

// signature of the permutation sorting (q with q[slot] replaced by s);
// the other entries are already increasing, so the sign counts how many of
// them s must pass
double replacement_sign(const detsums::Tuple& q, int slot, int s) {
    int crossings = 0;
    for (int i = 0; i < static_cast<int>(q.size()); ++i) {
        if (i == slot) continue;
        if (i < slot && q[i] > s) ++crossings;
        if (i > slot && q[i] < s) ++crossings;
    }
    return (crossings % 2 == 0) ? 1.0 : -1.0;
}

} // namespace

int LiftedSystem::index_of(const detsums::Tuple& t) const {
    auto it = std::lower_bound(tuples.begin(), tuples.end(), t);
    if (it == tuples.end() || *it != t) fail("OrderMismatch", "tuple not in the lifted index set");
    return static_cast<int>(it - tuples.begin());
}

Eigen::VectorXd LiftedSystem::lifted_beta(double x) const {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        double s = 0.0;
        for (int k : tuples[i]) s += bvp->profile.beta(k, x);
        v(i) = s;
    }
    return v;
}

Eigen::MatrixXcd LiftedSystem::lifted_Q(double x) const {
    Eigen::MatrixXcd out(dim, dim);
    lifted_Q_into(x, out);
    return out;
}

void LiftedSystem::lifted_Q_into(double x, Eigen::MatrixXcd& out) const {
    out.setZero();
    for (const auto& link : links)
        out(link.row, link.col) += link.sign * bvp->Q.entry_eval(link.from, link.to, x);
}

std::vector<double> LiftedSystem::lifted_b() const {
    std::vector<double> b(dim, 0.0);
    for (int i = 0; i < dim; ++i)
        for (int k : tuples[i]) b[i] += bvp->profile.b(k);
    return b;
}

bool LiftedSystem::lifted_beta_equiv(int q, int r) const {
    // beta_q == beta_r structurally iff the multisets of weight blocks agree
    // entrywise after removing the common indices; with increasing tuples it
    // suffices to match blockwise multiplicities.
    std::vector<int> cq(bvp->profile.block_count(), 0), cr(cq);
    for (int k : tuples[q]) ++cq[bvp->profile.block_of(k)];
    for (int k : tuples[r]) ++cr[bvp->profile.block_of(k)];
    return cq == cr;
}

LiftedSystem build_lifted_system(const DiracBVP& bvp, int m) {
    if (m < 1 || m > bvp.n()) fail("OrderMismatch", "minor order must lie in 1..n");
    auto zb = validate_zero_block_diagonal(bvp.Q, bvp.profile);
    if (!zb.ok)
        fail("BlockDiagonalityViolated",
             "the minor system requires structurally zero entries on equal-weight blocks");

    LiftedSystem sys;
    sys.bvp = &bvp;
    sys.m = m;
    sys.tuples = detsums::increasing_tuples(bvp.n(), m);
    sys.dim = static_cast<int>(sys.tuples.size());

    for (int qi = 0; qi < sys.dim; ++qi) {
        const auto& q = sys.tuples[qi];
        for (int slot = 0; slot < m; ++slot) {
            for (int s = 0; s < bvp.n(); ++s) {
                if (detsums::contains(q, s)) continue;
                detsums::Tuple r = q;
                r[slot] = s;
                std::sort(r.begin(), r.end());
                LiftedSystem::Link link;
                link.row = qi;
                link.col = sys.index_of(r);
                link.from = q[slot];
                link.to = s;
                link.sign = replacement_sign(q, slot, s);
                if (!bvp.Q.entry_is_zero(link.from, link.to)) sys.links.push_back(link);
            }
        }
    }
    return sys;
}

Eigen::MatrixXcd lifted_minors_at_ell(const LiftedSystem& sys, Complex lambda, double tol) {
    const DiracBVP& bvp = *sys.bvp;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(sys.dim, sys.dim);
    Eigen::MatrixXcd M(sys.dim, sys.dim);
    auto rhs = [&](double x, const Eigen::MatrixXcd& v, Eigen::MatrixXcd& out) {
        sys.lifted_Q_into(x, M);
        M = -M;
        Eigen::VectorXd beta = sys.lifted_beta(x);
        for (int i = 0; i < sys.dim; ++i) M(i, i) += Complex(0.0, 1.0) * lambda * beta(i);
        out.noalias() = M * v;
    };
    OdeOptions opt;
    opt.tol = tol;
    std::vector<double> forced = bvp.profile.interior_breakpoints(0.0, bvp.ell());
    for (double x : bvp.Q.interior_breakpoints(0.0, bvp.ell())) forced.push_back(x);
    integrate_matrix_ode(rhs, y, 0.0, bvp.ell(), forced, opt);
    return y;
}

Complex minor_of_fundamental(const FundamentalTrajectory& traj, const detsums::Tuple& q,
                             const detsums::Tuple& p) {
    if (q.size() != p.size()) fail("OrderMismatch", "row and column tuples differ in length");
    auto increasing = [](const detsums::Tuple& t) {
        for (std::size_t i = 1; i < t.size(); ++i)
            if (t[i - 1] >= t[i]) return false;
        return true;
    };
    if (!increasing(q) || !increasing(p))
        fail("OrderMismatch", "index tuples must be strictly increasing");
    const auto& phi = traj.at_ell();
    int n = static_cast<int>(phi.rows());
    for (int v : q)
        if (v < 0 || v >= n) fail("IndexOutOfRange", "row index outside 0..n-1");
    for (int v : p)
        if (v < 0 || v >= n) fail("IndexOutOfRange", "column index outside 0..n-1");
    return detsums::minor_det(phi, q, p);
}

} // namespace diracbvp
