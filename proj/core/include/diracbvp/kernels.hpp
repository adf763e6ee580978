#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/potential.hpp"
#include "diracbvp/weight_profile.hpp"

namespace diracbvp {

// Characteristic geometry for one ordered channel pair (j, k), built on the
// extended weights (constant continuation outside [0, ell]).
//
//   gamma(x, t, u) -- height at abscissa u of the curve through (x, t) whose
//                     slope field is dv/du = beta_j(u) / beta_k(v); explicitly
//                     rho_k^{-1}(rho_j(u) - rho_j(x) + rho_k(t)).
//   a(x, t)        -- abscissa where that curve meets the diagonal {v = u}:
//                     (rho_j - rho_k)^{-1}(rho_j(x) - rho_k(t)). Defined only
//                     when the two channel weights are separated.
struct CharacteristicMaps {
    std::shared_ptr<const WeightProfile> profile;
    int j = 0;
    int k = 0;

    double gamma(double x, double t, double u) const;
    // throws EqualWeights when beta_j and beta_k are structurally identical
    double a(double x, double t) const;
};

CharacteristicMaps characteristic_maps(const WeightProfile& profile, int j, int k);

// One column k of the lower-triangular similarity kernel R: the n channel
// components R_{jk} on the extended domain
//
//   Omega_k = { (x, t) : a_minus <= x <= a_plus, lower_boundary(x) <= t <= x }.
//
// Row j is stored along its own characteristic family: values sit on a
// uniform grid in (c, u), where u is the abscissa and c = rho_j(x) - rho_k(t)
// labels the characteristic through (x, t). eval() interpolates bilinearly
// in (c, u), i.e. linearly between characteristic grid lines.
class KernelGrid {
public:
    int column() const { return k_; }
    int channels() const { return n_; }
    const WeightProfile& weights() const { return *profile_; }

    double a_minus() const { return u0_; }
    double a_plus() const { return u0_ + du_ * double(nu_); }
    // lower edge of the domain (piecewise-linear through exactly computed
    // nodes); equals 0 on [0, ell] when every cross pair has opposite signs
    double lower_boundary(double u) const;
    bool contains(double x, double t, double slack = 1e-9) const;

    Complex eval(int j, double x, double t) const;
    Eigen::VectorXcd eval_column(double x, double t) const;
    // same value, entered through the characteristic label c = rho_j(x) - rho_k(t)
    Complex eval_level(int j, double c, double u) const;

    int iterations() const { return iterations_; }
    // sup-norm change of the final sweep (the fixed-point defect surrogate)
    double residual() const { return changes_.empty() ? 0.0 : changes_.back(); }
    const std::vector<double>& changes() const { return changes_; }

    // a-priori contraction data: the sweep-m change is bounded by
    // initial_bound() * contraction_rate()^m * char_span()^m / m!
    double contraction_rate() const { return tau_; }
    double char_span() const { return span_; }
    double initial_bound() const { return c0_; }

    struct Sample {
        int j = 0;
        double x = 0.0;
        double t = 0.0;
        Complex value{0.0, 0.0};
    };
    // tabular dump of the stored nodes (x, t, R_{jk}(x, t)), in-domain only
    std::vector<Sample> samples(int stride = 1) const;

private:
    friend KernelGrid solve_goursat(const WeightProfile&, const PotentialMatrix&, int, int, int,
                                    double);

    struct Row {
        double c_lo = 0.0;
        double dc = 0.0;
        Eigen::MatrixXcd v; // (level q, node i)
    };

    std::shared_ptr<const WeightProfile> profile_;
    int k_ = 0;
    int n_ = 0;
    double u0_ = 0.0;
    double du_ = 0.0;
    int nu_ = 0;
    std::vector<double> lower_;
    std::vector<Row> rows_;
    int iterations_ = 0;
    std::vector<double> changes_;
    double tau_ = 0.0;
    double span_ = 0.0;
    double c0_ = 0.0;
};

// Solves the Goursat fixed-point system for kernel column k by successive
// approximation:
//
//   R_{jk}(x,t) = Qt_{jk}(a_{jk}(x,t))
//                 - int_{a_{jk}(x,t)}^{x} sum_p Q_{jp}(u) R_{pk}(u, gamma_{jk}^{x,t}(u)) du
//
// with Qt_{jk} = Q_{jk} / (beta_j - beta_k) for separated channels, while
// rows sharing the column's weight carry the homogeneous value on the lower
// domain edge. Q is extended past [0, ell] by zero through a C^1 taper of
// width ell/50. Quadrature is composite trapezoid on the fixed abscissa
// grid; previous-sweep values enter through linear interpolation between
// characteristic grid lines. grid_size fixes both the abscissa and the
// characteristic-label resolution. tol is the absolute sup-norm change at
// which the sweep loop stops.
//
// errors: IndexOutOfRange, BadRepresentation, BlockDiagonalityViolated,
//         NoConvergence (max_iter sweeps exhausted; the message reports the
//         a-priori factorial envelope at that depth)
KernelGrid solve_goursat(const WeightProfile& profile, const PotentialMatrix& Q, int k,
                         int grid_size = 200, int max_iter = 64, double tol = 1e-12);

struct TransformCheck {
    std::vector<Complex> lambdas;
    std::vector<double> residuals; // max over x of the componentwise defect, per lambda
    double max_residual = 0.0;
    int grid_size = 0;
};

// Checks the triangular representation of the perturbed exponential solution:
// with Y_A solving Y' = (i lambda B - Q) Y, Y(0) = A, and
// e_A(x, lambda) = (A_p e^{i lambda rho_p(x)})_p, verifies
//
//   Y_A(x, lambda) = e_A(x, lambda) + int_0^x K_A(x, t) B(t) e_A(t, lambda) dt
//
// for every lambda in the probe set, with the lambda-independent kernel K_A
// assembled from the solved columns: K_A = R + P + int R B P, where the
// diagonal corrector P enforces the zero initial moment sum_k K_{jk}(x,0) A_k = 0
// through a second-kind Volterra solve. Requires one KernelGrid per column
// and weights with pairwise separated channels (every block of size 1); A
// must have all entries nonzero.
//
// errors: KernelMissing, SimpleSpectrumRequired, BadRepresentation
TransformCheck verify_transform(const WeightProfile& profile, const PotentialMatrix& Q,
                                const Eigen::VectorXcd& A, const std::vector<Complex>& lambdas,
                                const std::vector<KernelGrid>& kernels, int grid_size = 200);

} // namespace diracbvp
