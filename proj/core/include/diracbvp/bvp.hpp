#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/potential.hpp"
#include "diracbvp/weight_profile.hpp"

namespace diracbvp {

// Boundary pair (C, D) defining U(y) = C y(0) + D y(ell) = 0.
struct BoundaryPair {
    Eigen::MatrixXcd C;
    Eigen::MatrixXcd D;
};

// throws RankDeficientPair unless rank(C | D) = n
void validate_boundary_pair(const BoundaryPair& bc);

// Full first-order boundary value problem
//   -i B(x)^{-1} (y' + Q(x) y) = lambda y,   C y(0) + D y(ell) = 0,
// held in canonical weight order. assemble() accepts data in any entry
// order and applies the profile's sorting permutation to Q (conjugation)
// and to the columns of C and D, which leaves U(y) and the characteristic
// determinant unchanged.
struct DiracBVP {
    WeightProfile profile;
    PotentialMatrix Q;
    BoundaryPair bc;
    // declared commensurability: b_k = multipliers[k] * unit exactly.
    // Never inferred from floating data; classification uses it if present.
    struct Commensurable {
        double unit = 0.0;
        std::vector<long long> multipliers;
    };
    std::optional<Commensurable> commensurable;

    std::uint64_t id = 0; // instance tag for trajectory caching

    int n() const { return profile.n(); }
    double ell() const { return profile.ell(); }
};

DiracBVP assemble_bvp(std::vector<ScalarFunction> weights, PotentialMatrix Q, Eigen::MatrixXcd C,
                      Eigen::MatrixXcd D, double ell, int theta_check_grid = 2048);

} // namespace diracbvp
