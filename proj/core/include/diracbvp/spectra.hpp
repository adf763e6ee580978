#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"
#include "diracbvp/exppoly.hpp"
#include "diracbvp/winding.hpp"

namespace diracbvp {

// characteristic determinant det(C + D Phi(ell, lambda))
Complex delta(const DiracBVP& bvp, Complex lambda, double tol = 1e-10);

struct DeltaDerivative {
    Complex value{0.0, 0.0};
    Complex derivative{0.0, 0.0}; // d/dlambda, from tr(adj(A) * d A/dlambda)
};

DeltaDerivative delta_with_derivative(const DiracBVP& bvp, Complex lambda, double tol = 1e-10);

// Unperturbed determinant as an exponential sum: one term per subset P of
// weight indices, with coefficient det(C (I-P) + D P) (column mixing) and
// frequency sum_{k in P} b_k. Coefficients below 1e-14 * coefficient scale
// are dropped; equal frequencies merge. Throws BadRepresentation above
// n = 16 (the expansion has 2^n terms).
ExponentialPolynomial delta0_expansion(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                                       const WeightProfile& profile);

struct Eigenvalue {
    Complex lambda{0.0, 0.0};
    int multiplicity = 1;
    double residual = 0.0; // |Delta(lambda)| after refinement
};

struct SpectrumReport {
    double re_lo = 0.0, re_hi = 0.0, strip = 0.0;
    std::vector<Eigenvalue> eigenvalues; // sorted by Re, then Im
    bool regular_warning = false;        // boundary pair singular or near-singular
    std::string note;
};

// All eigenvalues with Re in [re_lo, re_hi], |Im| <= strip, found by contour
// counting of the characteristic determinant with Newton refinement on the
// analytic derivative. Counts are unreliable for non-regular boundary pairs;
// the report says so instead of failing.
SpectrumReport zeros_in_window(const DiracBVP& bvp, double re_lo, double re_hi, double strip,
                               double tol = 1e-10);

struct PairedZero {
    Complex a{0.0, 0.0}, b{0.0, 0.0};
    double deviation = 0.0; // |a - b|
};

struct BandDeviation {
    int band = 0; // base * 2^band <= |Re a| < base * 2^(band+1)
    double max_deviation = 0.0;
    int count = 0;
};

struct SpectrumPairing {
    std::vector<PairedZero> pairs;
    std::vector<Complex> unmatched_a, unmatched_b;
    bool count_mismatch = false;
    std::string note;
    std::vector<BandDeviation> bands; // dyadic summary of pair deviations
    // smallest pair |Re| from which every deviation stays below the onset
    // threshold; an observation about the computed window, not a bound
    double empirical_onset = std::numeric_limits<double>::quiet_NaN();
};

// Greedy in-order pairing of two multiplicity-expanded, Re-sorted zero lists
// (typically: computed spectrum vs. unperturbed model). Leftovers are listed,
// never dropped silently.
SpectrumPairing pair_spectra(const std::vector<Eigenvalue>& a, const std::vector<Eigenvalue>& b,
                             double onset_threshold = 0.05, double band_base = 1.0);

struct VectorTrajectory {
    Complex lambda{0.0, 0.0};
    std::vector<double> grid;
    std::vector<Eigen::VectorXcd> values;
    bool nontrivial = false;
};

// Eigenfunction candidate Y_p(x) = Phi(x, lambda) * adj(C + D Phi(ell))
// column p. At a simple eigenvalue the adjugate has rank one, so every
// nontrivial column spans the eigenspace. Throws NotAnEigenvalue when
// |Delta(lambda)| exceeds delta_tol * (1 + max|A|)^n.
VectorTrajectory eigenvector(const DiracBVP& bvp, Complex lambda, int p, int steps = 512,
                             double tol = 1e-10, double delta_tol = 1e-6);

} // namespace diracbvp
