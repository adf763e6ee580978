#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"

namespace diracbvp {

struct FundamentalTrajectory {
    Complex lambda{0.0, 0.0};
    std::vector<double> grid;             // 0 = x_0 < ... < x_N = ell
    std::vector<Eigen::MatrixXcd> values; // Phi(x_i, lambda)
    std::vector<Complex> dets;            // det Phi(x_i, lambda)

    const Eigen::MatrixXcd& at_ell() const { return values.back(); }
};

// Integrates Phi' = (i lambda B - Q) Phi, Phi(0) = I, sampling on a uniform
// (steps+1)-node grid merged with the coefficient breakpoints. Results are
// served from a small process-wide cache keyed by (bvp id, lambda, steps,
// tol); the cache is safe for concurrent insert-or-get.
FundamentalTrajectory solve_fundamental(const DiracBVP& bvp, Complex lambda, int steps = 512,
                                        double tol = 1e-10);

// Endpoint value Phi(ell, lambda) without intermediate storage.
Eigen::MatrixXcd fundamental_at_ell(const DiracBVP& bvp, Complex lambda, double tol = 1e-10);

// (Phi(ell,lambda), dPhi/dlambda(ell,lambda)); the derivative solves the
// augmented system Psi' = (i lambda B - Q) Psi + i B Phi, Psi(0) = 0.
std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
fundamental_with_dlambda(const DiracBVP& bvp, Complex lambda, double tol = 1e-10);

// Continues an already-computed value across [a, b] in place; used for
// subinterval consistency checks (Phi(b) = Phi_{[a,b]} Phi(a)).
void propagate_fundamental(const DiracBVP& bvp, Complex lambda, Eigen::MatrixXcd& y, double a,
                           double b, double tol = 1e-10);

// Q = 0 solution diag(e^{i lambda rho_k(x)}).
Eigen::MatrixXcd unperturbed_fundamental(const WeightProfile& profile, Complex lambda, double x);

// Rescaled trajectory Z = e^{-i lambda rho_r(x)} Phi(x, lambda), which solves
// Z' = (i lambda (B - beta_r I) - Q) Z. Keeps the dominant exponential out of
// floating range when |Im lambda| * max|b_k| is large.
FundamentalTrajectory solve_fundamental_rescaled(const DiracBVP& bvp, Complex lambda, int ref,
                                                 int steps = 512, double tol = 1e-10);

// max over the grid of |det Phi(x,lambda) - exp(i lambda sum_k rho_k(x) - int_0^x tr Q)|
double liouville_residual(const FundamentalTrajectory& traj, const DiracBVP& bvp);

} // namespace diracbvp
