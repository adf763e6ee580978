#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"

namespace diracbvp {

// Regularity of the boundary pair w.r.t. the weight signature: both
// determinants det(C P_- + D P_+) and det(C P_+ + D P_-) must be nonzero.
// A determinant counts as zero below 1e-10 * scale^n, where scale is the
// largest entry of (C D); values within 100x of the cutoff raise the
// warning flag so marginal verdicts are never silent.
struct RegularityReport {
    Complex J_plus{0.0, 0.0};  // det(C P_- + D P_+)
    Complex J_minus{0.0, 0.0}; // det(C P_+ + D P_-)
    bool regular = false;
    bool warning = false;
    double zero_tolerance = 0.0;
};

RegularityReport regularity(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                            const WeightProfile& profile);

// Left-multiplies by (C P_- + D P_+)^{-1}, producing the triangular pair
//   C' = [[I, C12], [0, C22]],  D' = [[D11, 0], [D21, I]]
// with blocks relative to the negative/positive weight split. Same kernel,
// same eigenvalues. Throws NotRegular when J_plus is (numerically) zero.
BoundaryPair canonicalize(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                          const WeightProfile& profile);

bool is_canonical(const BoundaryPair& bc, const WeightProfile& profile, double tol = 1e-12);

// Gauge transform removing the block-diagonal part of the potential:
// W solves W' + Q_diag W = 0, W(0) = I (block-diagonal throughout), and
//   Q_tilde = W^{-1} (Q - Q_diag) W,  D_tilde = D W(ell)
// leave the characteristic determinant unchanged. W is stored densely and
// evaluated between nodes by cubic Hermite interpolation (W' is known
// exactly from the ODE at the nodes).
struct GaugeResult {
    PotentialMatrix Q_tilde;  // zero-block-diagonal by construction
    Eigen::MatrixXcd D_tilde; // D W(ell)
    bool trivial = false;     // Q was already zero-block-diagonal

    Eigen::MatrixXcd W_at(double x) const;
    Eigen::MatrixXcd W_inverse_at(double x) const;
    const Eigen::MatrixXcd& W_ell() const;

    struct Data;
    std::shared_ptr<const Data> data;
};

GaugeResult gauge_transform(const DiracBVP& bvp, int grid_nodes = 4096);

// Formal adjoint data: Q_star = -S Q^dagger S and, for canonical-form
// boundary pairs, the adjoint pair
//   C_star = [[D11^dagger, 0], [C12^dagger, I]],
//   D_star = [[I, D21^dagger], [0, C22^dagger]].
struct AdjointProblem {
    PotentialMatrix Q_star;
    Eigen::MatrixXcd C_star, D_star;
};

// requires canonical (C, D); throws NotCanonical otherwise
AdjointProblem adjoint_problem(const DiracBVP& bvp);

// the boundary-pair part alone; requires canonical (C, D)
BoundaryPair adjoint_boundary_pair(const BoundaryPair& bc, const WeightProfile& profile);

// the potential part alone; valid for any problem
PotentialMatrix adjoint_potential(const DiracBVP& bvp);

} // namespace diracbvp
