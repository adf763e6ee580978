#pragma once

#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"
#include "diracbvp/inner_products.hpp"
#include "diracbvp/spectra.hpp"

namespace diracbvp {

// Characteristic matrix of the weight-only (zero potential) problem:
//   A0(lambda) = C + D diag(e^{i lambda b_k}).
Eigen::MatrixXcd unperturbed_characteristic_matrix(const WeightProfile& profile,
                                                   const Eigen::MatrixXcd& C,
                                                   const Eigen::MatrixXcd& D, Complex lambda);

// Candidate eigenfunction built from column p of the adjugate of A0(lambda):
// component k is adj(A0)_{kp} e^{i lambda rho_k(x)}. At a simple zero of the
// reduced determinant every nonzero column spans the eigenspace.
WeightedVectorFunction unperturbed_mode(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                        const Eigen::MatrixXcd& D, Complex lambda, int p,
                                        int grid_intervals = 2048);

// Same construction for the adjoint problem (adjoint potential is again zero;
// the boundary pair is the adjoint of the canonical pair (C, D)), evaluated at
// spectral parameter mu. Requires (C, D) canonical.
WeightedVectorFunction adjoint_unperturbed_mode(const WeightProfile& profile,
                                                const Eigen::MatrixXcd& C,
                                                const Eigen::MatrixXcd& D, Complex mu, int q,
                                                int grid_intervals = 2048);

// Exact-pairing diagnostic at a simple zero lambda of the reduced determinant
// Delta0 = det A0: the quadrature value of the weighted pairing between mode p
// and adjoint mode q (at conj(lambda)) against its closed form
//   -i E(lambda) e^{i b_q^- lambda} adj(A0)_{qp} Delta0'(lambda),
// where E(lambda) = e^{-i (b_1 + ... + b_n) lambda}, b_q^- = min(b_q, 0), and
//   Delta0'(lambda) = i b_- Delta0 + i sum_k |b_k| e^{i lambda b_k^+} adj(A0)_{kk}.
struct PairingIdentity {
    Complex lhs{0.0, 0.0};          // quadrature value of the weighted pairing
    Complex rhs{0.0, 0.0};          // closed form above
    double residual = 0.0;          // |lhs - rhs|
    Complex delta0{0.0, 0.0};       // det A0(lambda)
    Complex delta0_prime{0.0, 0.0}; // adjugate-trace derivative formula
    Complex a_qp{0.0, 0.0};         // adj(A0)_{qp}(lambda)
};

// Requires (C, D) canonical (NotCanonical) and lambda a simple zero of the
// reduced determinant (NotSimpleZero).
PairingIdentity pairing_identity(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                 const Eigen::MatrixXcd& D, Complex lambda, int p, int q,
                                 int grid_intervals = 2048);

double pairing_identity_residual(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                 const Eigen::MatrixXcd& D, Complex lambda, int p, int q,
                                 int grid_intervals = 2048);

// One eigenvalue with a candidate eigenfunction and adjoint eigenfunction.
struct RawEigenpair {
    Complex lambda{0.0, 0.0};
    int multiplicity = 1;
    WeightedVectorFunction f;
    WeightedVectorFunction f_star;
};

// Normalized pair: f is kept as given, f_star is rescaled so the weighted
// pairing (f, f_star) equals 1. pairing_value records the raw pairing.
struct BiorthogonalPair {
    Complex lambda{0.0, 0.0};
    WeightedVectorFunction f;
    WeightedVectorFunction f_star;
    Complex pairing_value{0.0, 0.0};
};

struct BiorthogonalSet {
    std::vector<BiorthogonalPair> pairs;
    std::vector<Complex> excluded; // multiple eigenvalues, skipped (no simple pairing)
    Eigen::MatrixXcd cross;        // cross(j, k) = (f_j, f_star_k) after normalization
    double max_off_diagonal = 0.0; // max over j != k of |cross(j, k)|
};

// Rescales each f_star so (f, f_star) = 1 and reports the full cross-pairing
// table. Entries with multiplicity > 1 are excluded, not normalized. Throws
// DegeneratePairing when a simple pair has |(f, f_star)| < 1e-12.
BiorthogonalSet biorthogonal_normalize(const std::vector<RawEigenpair>& raw);

// max over the window of ||f_m|| * ||f_star_m|| — finite uniform-minimality
// diagnostic; bounded windows stabilizing under growth are the evidence.
double uniform_minimality_index(const std::vector<BiorthogonalPair>& pairs);

// PROXY diagnostic: ratio of extreme eigenvalue magnitudes of the finite Gram
// matrix G_{jk} = (f_j, f_k). Boundedness over growing windows is evidence,
// not proof, of the Riesz-basis property.
double gram_condition(const std::vector<WeightedVectorFunction>& vectors);
double gram_condition(const std::vector<WeightedVectorFunction>& vectors,
                      const WeightTable& table);

struct RieszDiagnosticsRow {
    int index = 0;
    Complex lambda{0.0, 0.0};
    double norm_f = 0.0;
    double norm_f_star = 0.0;
    double product = 0.0;
};

struct RieszDiagnostics {
    BiorthogonalSet set;
    double minimality_index = 0.0;
    double gram_cond = 0.0; // proxy, see gram_condition
    std::vector<RieszDiagnosticsRow> rows;
};

// Full weight-only diagnostics over an eigenvalue window: builds unit-norm
// modes and adjoint modes from the adjugate columns (largest column selected),
// normalizes them biorthogonally, and evaluates the minimality index and the
// Gram-condition proxy. Multiple eigenvalues and values failing the
// simple-zero gate are reported as excluded. Requires (C, D) canonical.
RieszDiagnostics unperturbed_riesz_diagnostics(const WeightProfile& profile,
                                               const Eigen::MatrixXcd& C,
                                               const Eigen::MatrixXcd& D,
                                               const std::vector<Eigenvalue>& eigenvalues,
                                               int grid_intervals = 2048);

} // namespace diracbvp
