#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"

namespace testutil {

using diracbvp::Complex;
using diracbvp::ScalarFunction;

inline ScalarFunction cst(double v) { return ScalarFunction::constant(Complex(v, 0.0)); }
inline ScalarFunction cst(Complex v) { return ScalarFunction::constant(v); }

// cubic with given complex coefficients on [0, ell]
inline ScalarFunction cubic(double ell, Complex c0, Complex c1, Complex c2, Complex c3) {
    return ScalarFunction::piecewise_polynomial({0.0, ell}, {{c0, c1, c2, c3}});
}

inline Eigen::MatrixXcd random_matrix(int n, std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Complex(u(rng), u(rng));
    return m;
}

// random cubic-coefficient potential, zero on the diagonal, bounded entries
inline diracbvp::PotentialMatrix random_offdiag_potential(int n, double ell, std::mt19937& rng,
                                                          double amplitude = 0.5) {
    std::uniform_real_distribution<double> u(-amplitude, amplitude);
    std::vector<ScalarFunction> entries(std::size_t(n) * n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            if (j == k) continue;
            entries[std::size_t(j) * n + k] =
                cubic(ell, Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                      Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
        }
    return diracbvp::PotentialMatrix::from_entries(n, std::move(entries));
}

// two-channel transport problem with B = diag(-1, 1) on [0, 1]
inline diracbvp::DiracBVP two_channel(diracbvp::PotentialMatrix Q, Eigen::MatrixXcd C,
                                      Eigen::MatrixXcd D) {
    return diracbvp::assemble_bvp({cst(-1.0), cst(1.0)}, std::move(Q), std::move(C), std::move(D),
                                  1.0);
}

inline Eigen::MatrixXcd dirichlet_C() {
    Eigen::MatrixXcd C(2, 2);
    C << 1, 1, 0, 0;
    return C;
}
inline Eigen::MatrixXcd dirichlet_D() {
    Eigen::MatrixXcd D(2, 2);
    D << 0, 0, 1, 1;
    return D;
}

} // namespace testutil
