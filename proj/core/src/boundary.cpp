#include "diracbvp/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "diracbvp/error.hpp"
#include "diracbvp/ode.hpp"

namespace diracbvp {

namespace {

double pair_scale(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D) {
    double s = std::max(C.cwiseAbs().maxCoeff(), D.cwiseAbs().maxCoeff());
    return s > 0.0 ? s : 1.0;
}

Eigen::MatrixXcd mix_columns(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                             const Eigen::VectorXd& cw, const Eigen::VectorXd& dw) {
    Eigen::MatrixXcd out(C.rows(), C.cols());
    for (int k = 0; k < C.cols(); ++k) out.col(k) = cw(k) * C.col(k) + dw(k) * D.col(k);
    return out;
}

} // namespace

RegularityReport regularity(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                            const WeightProfile& profile) {
    validate_boundary_pair({C, D});
    if (C.rows() != profile.n()) fail("DimensionMismatch", "boundary pair does not match profile");
    auto sig = profile.signature_and_projectors();

    RegularityReport rep;
    rep.J_plus = mix_columns(C, D, sig.P_minus, sig.P_plus).determinant();
    rep.J_minus = mix_columns(C, D, sig.P_plus, sig.P_minus).determinant();
    rep.zero_tolerance = 1e-10 * std::pow(pair_scale(C, D), profile.n());

    double lo = std::min(std::abs(rep.J_plus), std::abs(rep.J_minus));
    rep.regular = std::abs(rep.J_plus) >= rep.zero_tolerance &&
                  std::abs(rep.J_minus) >= rep.zero_tolerance;
    rep.warning = lo >= rep.zero_tolerance / 100.0 && lo < rep.zero_tolerance * 100.0;
    return rep;
}

BoundaryPair canonicalize(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                          const WeightProfile& profile) {
    auto rep = regularity(C, D, profile);
    if (!rep.regular)
        fail("NotRegular", "canonical form needs both regularity determinants nonzero");
    auto sig = profile.signature_and_projectors();
    Eigen::MatrixXcd T = mix_columns(C, D, sig.P_minus, sig.P_plus);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(T);
    return BoundaryPair{lu.solve(C), lu.solve(D)};
}

bool is_canonical(const BoundaryPair& bc, const WeightProfile& profile, double tol) {
    const int n = profile.n(), nm = profile.n_minus(), np = n - nm;
    if (bc.C.rows() != n || bc.D.rows() != n) return false;
    double scale = pair_scale(bc.C, bc.D) * tol;
    Eigen::MatrixXcd cneg(n, nm), dpos(n, np);
    cneg.setZero();
    cneg.topRows(nm) = Eigen::MatrixXcd::Identity(nm, nm);
    dpos.setZero();
    dpos.bottomRows(np) = Eigen::MatrixXcd::Identity(np, np);
    return (bc.C.leftCols(nm) - cneg).cwiseAbs().maxCoeff() <= scale &&
           (bc.D.rightCols(np) - dpos).cwiseAbs().maxCoeff() <= scale;
}

struct GaugeResult::Data {
    std::vector<double> grid;
    std::vector<Eigen::MatrixXcd> W, Wp;
    std::vector<int> block_of;
    int n = 0;
};

namespace {

Eigen::MatrixXcd hermite_eval(const GaugeResult::Data& d, double x) {
    const auto& xs = d.grid;
    if (x <= xs.front()) return d.W.front();
    if (x >= xs.back()) return d.W.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double h = xs[i + 1] - xs[i];
    double t = (x - xs[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t, h01 = -2 * t3 + 3 * t2,
           h11 = t3 - t2;
    return h00 * d.W[i] + (h * h10) * d.Wp[i] + h01 * d.W[i + 1] + (h * h11) * d.Wp[i + 1];
}

// in-block part of a full matrix, per the weight blocks
void keep_in_block(const std::vector<int>& block_of, Eigen::MatrixXcd& m, bool keep_inside) {
    for (int j = 0; j < m.rows(); ++j)
        for (int k = 0; k < m.cols(); ++k) {
            bool inside = block_of[j] == block_of[k];
            if (inside != keep_inside) m(j, k) = Complex(0.0, 0.0);
        }
}

} // namespace

Eigen::MatrixXcd GaugeResult::W_at(double x) const { return hermite_eval(*data, x); }

Eigen::MatrixXcd GaugeResult::W_inverse_at(double x) const {
    Eigen::MatrixXcd w = hermite_eval(*data, x);
    return w.partialPivLu().inverse();
}

const Eigen::MatrixXcd& GaugeResult::W_ell() const { return data->W.back(); }

GaugeResult gauge_transform(const DiracBVP& bvp, int grid_nodes) {
    const int n = bvp.n();
    const double ell = bvp.ell();

    auto data = std::make_shared<GaugeResult::Data>();
    data->n = n;
    data->block_of.resize(n);
    for (int k = 0; k < n; ++k) data->block_of[k] = bvp.profile.block_of(k);

    GaugeResult g;
    if (validate_zero_block_diagonal(bvp.Q, bvp.profile).ok) {
        data->grid = {0.0, ell};
        data->W.assign(2, Eigen::MatrixXcd::Identity(n, n));
        data->Wp.assign(2, Eigen::MatrixXcd::Zero(n, n));
        g.data = data;
        g.trivial = true;
        g.Q_tilde = bvp.Q;
        g.D_tilde = bvp.bc.D;
        return g;
    }

    if (grid_nodes < 64) grid_nodes = 64;
    std::vector<double> grid;
    grid.reserve(std::size_t(grid_nodes) + 1);
    for (int i = 0; i <= grid_nodes; ++i) grid.push_back(ell * double(i) / double(grid_nodes));
    for (double x : bvp.Q.interior_breakpoints(0.0, ell)) grid.push_back(x);
    for (double x : bvp.profile.interior_breakpoints(0.0, ell)) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double a, double b) { return b - a < 1e-14 * ell; }),
               grid.end());
    grid.back() = ell;

    Eigen::MatrixXcd qbuf(n, n);
    auto rhs = [&](double x, const Eigen::MatrixXcd& w, Eigen::MatrixXcd& out) {
        bvp.Q.eval_into(x, qbuf);
        keep_in_block(data->block_of, qbuf, true);
        out.noalias() = -qbuf * w;
    };

    OdeOptions opt;
    opt.tol = 1e-12;
    Eigen::MatrixXcd w = Eigen::MatrixXcd::Identity(n, n), wp(n, n);
    data->grid = grid;
    data->W.reserve(grid.size());
    data->Wp.reserve(grid.size());
    try {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (i > 0) integrate_matrix_ode(rhs, w, grid[i - 1], grid[i], {}, opt);
            rhs(grid[i], w, wp);
            data->W.push_back(w);
            data->Wp.push_back(wp);
        }
    } catch (const Error& e) {
        fail("IntegrationFailure", std::string("gauge factor: ") + e.what());
    }

    // Q_tilde(x) = W^{-1}(x) (Q(x) - Q_diag(x)) W(x); in-block entries vanish
    // identically because W is block-diagonal.
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) mask(j, k) = data->block_of[j] == data->block_of[k];

    PotentialMatrix qsrc = bvp.Q;
    std::vector<int> blocks = data->block_of;
    auto data_ref = data;
    auto eval = [data_ref, qsrc, blocks](double x) {
        Eigen::MatrixXcd q = qsrc.eval(x);
        keep_in_block(blocks, q, false);
        Eigen::MatrixXcd w = hermite_eval(*data_ref, x);
        Eigen::MatrixXcd out = w.partialPivLu().solve(q * w);
        keep_in_block(blocks, out, false); // structural zeros exactly
        return out;
    };
    std::vector<double> breaks = bvp.Q.interior_breakpoints(0.0, ell);
    for (double x : bvp.profile.interior_breakpoints(0.0, ell)) breaks.push_back(x);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    g.data = data;
    g.Q_tilde = PotentialMatrix::from_callable(n, eval, mask, breaks);
    g.D_tilde = bvp.bc.D * data->W.back();
    return g;
}

PotentialMatrix adjoint_potential(const DiracBVP& bvp) {
    const int n = bvp.n();
    auto sig = bvp.profile.signature_and_projectors();
    Eigen::VectorXd s = sig.S;

    if (!bvp.Q.has_callable()) {
        std::vector<ScalarFunction> entries(std::size_t(n) * n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) {
                if (bvp.Q.entry_is_zero(k, j)) continue;
                Complex factor = Complex(-s(j) * s(k), 0.0);
                entries[std::size_t(j) * n + k] = bvp.Q.entry(k, j).conjugated().scaled(factor);
            }
        return PotentialMatrix::from_entries(n, std::move(entries));
    }

    PotentialMatrix qsrc = bvp.Q;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> mask(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) mask(j, k) = qsrc.entry_is_zero(k, j);
    auto eval = [qsrc, s](double x) {
        Eigen::MatrixXcd q = qsrc.eval(x).adjoint();
        for (int j = 0; j < q.rows(); ++j)
            for (int k = 0; k < q.cols(); ++k) q(j, k) *= -s(j) * s(k);
        return q;
    };
    return PotentialMatrix::from_callable(n, eval, mask,
                                          bvp.Q.interior_breakpoints(0.0, bvp.ell()));
}

BoundaryPair adjoint_boundary_pair(const BoundaryPair& bc, const WeightProfile& profile) {
    if (!is_canonical(bc, profile))
        fail("NotCanonical", "adjoint boundary pair is defined from the canonical form");
    const int n = profile.n(), nm = profile.n_minus(), np = n - nm;
    const Eigen::MatrixXcd& C = bc.C;
    const Eigen::MatrixXcd& D = bc.D;

    BoundaryPair star;
    star.C = Eigen::MatrixXcd::Zero(n, n);
    star.D = Eigen::MatrixXcd::Zero(n, n);

    // blocks of the canonical pair
    Eigen::MatrixXcd C12 = C.block(0, nm, nm, np);
    Eigen::MatrixXcd C22 = C.block(nm, nm, np, np);
    Eigen::MatrixXcd D11 = D.block(0, 0, nm, nm);
    Eigen::MatrixXcd D21 = D.block(nm, 0, np, nm);

    star.C.block(0, 0, nm, nm) = D11.adjoint();
    star.C.block(nm, 0, np, nm) = C12.adjoint();
    star.C.block(nm, nm, np, np) = Eigen::MatrixXcd::Identity(np, np);

    star.D.block(0, 0, nm, nm) = Eigen::MatrixXcd::Identity(nm, nm);
    star.D.block(0, nm, nm, np) = D21.adjoint();
    star.D.block(nm, nm, np, np) = C22.adjoint();
    return star;
}

AdjointProblem adjoint_problem(const DiracBVP& bvp) {
    BoundaryPair star = adjoint_boundary_pair(bvp.bc, bvp.profile);
    AdjointProblem adj;
    adj.Q_star = adjoint_potential(bvp);
    adj.C_star = std::move(star.C);
    adj.D_star = std::move(star.D);
    return adj;
}

} // namespace diracbvp
