#pragma once

#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"
#include "diracbvp/detsums.hpp"
#include "diracbvp/fundamental.hpp"

namespace diracbvp {

// First-order system satisfied by the order-m minors of the fundamental
// matrix when Q is zero-block-diagonal. For a fixed column tuple p, the
// vector F_p(x) = (Phi(x)[q, p])_q over all row tuples q obeys
//   F_p' = (i lambda LB - LQ) F_p,   F_p(0) = (delta_{q,p})_q,
// with LB = diag(beta_{q_1}+...+beta_{q_m}) and LQ the signed single-entry
// replacement coupling below. Tuples are listed lexicographically.
struct LiftedSystem {
    const DiracBVP* bvp = nullptr;
    int m = 0;
    int dim = 0;                        // C(n, m)
    std::vector<detsums::Tuple> tuples; // lexicographic, 0-based

    // replacement q -> r where r = sort(q with q[slot] := s), s not in q;
    // LQ_{q,r} = sign * Q_{q[slot], s}
    struct Link {
        int row, col;  // tuple indices q, r
        int from, to;  // matrix entry Q_{from, to}
        double sign;   // signature of the sorting permutation
    };
    std::vector<Link> links;

    int index_of(const detsums::Tuple& t) const;
    Eigen::VectorXd lifted_beta(double x) const;
    Eigen::MatrixXcd lifted_Q(double x) const;
    void lifted_Q_into(double x, Eigen::MatrixXcd& out) const;
    // sums rho_{q_1}(ell) + ... + rho_{q_m}(ell) per tuple
    std::vector<double> lifted_b() const;
    // structural identity of the lifted weights beta_q and beta_r
    bool lifted_beta_equiv(int q, int r) const;
};

// requires zero-block-diagonal Q (throws BlockDiagonalityViolated)
LiftedSystem build_lifted_system(const DiracBVP& bvp, int m);

// Integrates all minors at once from the identity initial data; column j
// holds F_p for p = tuples[j], so entry (i, j) is Phi(ell)[tuples[i], tuples[j]].
Eigen::MatrixXcd lifted_minors_at_ell(const LiftedSystem& sys, Complex lambda, double tol = 1e-10);

// Direct submatrix determinant Phi(ell)[q, p] from a computed trajectory.
Complex minor_of_fundamental(const FundamentalTrajectory& traj, const detsums::Tuple& q,
                             const detsums::Tuple& p);

} // namespace diracbvp
