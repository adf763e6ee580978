#include "diracbvp/bvp.hpp"

#include <atomic>

#include "diracbvp/error.hpp"

namespace diracbvp {

void validate_boundary_pair(const BoundaryPair& bc) {
    const auto n = bc.C.rows();
    if (bc.C.cols() != n || bc.D.rows() != n || bc.D.cols() != n)
        fail("DimensionMismatch", "C and D must be square of equal size");
    Eigen::MatrixXcd cd(n, 2 * n);
    cd << bc.C, bc.D;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(cd);
    double scale = cd.cwiseAbs().maxCoeff();
    qr.setThreshold(1e-12 * (scale > 0 ? scale : 1.0));
    if (qr.rank() < n) fail("RankDeficientPair", "rank(C | D) < n");
}

DiracBVP assemble_bvp(std::vector<ScalarFunction> weights, PotentialMatrix Q, Eigen::MatrixXcd C,
                      Eigen::MatrixXcd D, double ell, int theta_check_grid) {
    static std::atomic<std::uint64_t> next_id{1};

    const int n = static_cast<int>(weights.size());
    if (Q.n() != n || C.rows() != n || D.rows() != n)
        fail("DimensionMismatch", "weights, Q, C, D sizes disagree");

    DiracBVP bvp;
    bvp.profile = build_weight_profile(std::move(weights), ell, theta_check_grid);

    const std::vector<int>& perm = bvp.profile.permutation();
    bool identity = true;
    for (int i = 0; i < n; ++i) identity = identity && perm[i] == i;

    if (identity || Q.has_callable()) {
        if (!identity)
            fail("BadRepresentation", "callable potential cannot be reordered; pass canonical order");
        bvp.Q = std::move(Q);
        bvp.bc = BoundaryPair{std::move(C), std::move(D)};
    } else {
        PotentialMatrix qp(n);
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) qp.set_entry(j, k, Q.entry(perm[j], perm[k]));
        Eigen::MatrixXcd cp(n, n), dp(n, n);
        for (int k = 0; k < n; ++k) {
            cp.col(k) = C.col(perm[k]);
            dp.col(k) = D.col(perm[k]);
        }
        bvp.Q = std::move(qp);
        bvp.bc = BoundaryPair{std::move(cp), std::move(dp)};
    }
    validate_boundary_pair(bvp.bc);
    bvp.id = next_id.fetch_add(1);
    return bvp;
}

} // namespace diracbvp
