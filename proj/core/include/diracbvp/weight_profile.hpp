#pragma once

#include <vector>

#include <Eigen/Dense>

#include "diracbvp/scalar_function.hpp"

namespace diracbvp {

// Diagonal weight entry: real-valued, sign-definite, bounded away from 0.
struct WeightFunction {
    ScalarFunction f;

    double eval(double x) const { return f.eval(x).real(); }
    double rho(double x) const { return f.primitive(x).real(); }
};

struct SignatureData {
    Eigen::VectorXd S;       // diag of sign(beta_k)
    Eigen::VectorXd P_plus;  // diag indicator of positive entries
    Eigen::VectorXd P_minus; // diag indicator of negative entries
};

// Validated, canonically ordered weight family:
//   beta_1 <= ... <= beta_{n_minus} < 0 < beta_{n_minus+1} <= ... <= beta_n
// pointwise, with adjacent entries either structurally identical or
// uniformly separated by theta. rho_k is the exact antiderivative of
// beta_k from 0; outside [0, ell] both extend by constant continuation of
// the endpoint slope (the extension the kernel construction relies on).
class WeightProfile {
public:
    int n() const { return static_cast<int>(entries_.size()); }
    double ell() const { return ell_; }
    int n_minus() const { return n_minus_; }
    int n_plus() const { return n() - n_minus_; }
    double theta() const { return theta_; }
    double b(int k) const { return b_[k]; }
    const std::vector<double>& b() const { return b_; }
    double b_minus() const { return b_minus_; }
    double b_plus() const { return b_plus_; }

    double beta(int k, double x) const { return entries_[k].eval(x); }
    double rho(int k, double x) const;

    // strictly monotone inverses, valid on the extended line
    double rho_inverse(int k, double y) const;
    // solves rho_j(u) - rho_k(u) = y; requires beta_j and beta_k separated
    double diff_inverse(int j, int k, double y) const;

    bool beta_equiv(int j, int k) const; // structural identity
    int block_of(int k) const { return block_index_[k]; }
    const std::vector<int>& block_partition() const { return block_sizes_; }
    int block_count() const { return static_cast<int>(block_sizes_.size()); }
    // index of the first entry of block j and the block's size
    int block_start(int j) const { return block_start_[j]; }
    int block_size(int j) const { return block_sizes_[j]; }

    SignatureData signature_and_projectors() const;

    // canonical position -> index in the constructor's entry order
    const std::vector<int>& permutation() const { return perm_; }

    const WeightFunction& entry(int k) const { return entries_[k]; }

    std::vector<double> interior_breakpoints(double a, double b) const;

    double min_abs_beta() const { return min_abs_beta_; }
    double max_abs_beta() const { return max_abs_beta_; }

    friend WeightProfile build_weight_profile(std::vector<ScalarFunction> entries, double ell,
                                              int theta_check_grid);

private:
    std::vector<WeightFunction> entries_;
    double ell_ = 0.0;
    int n_minus_ = 0;
    double theta_ = 0.0;
    std::vector<double> b_;
    double b_minus_ = 0.0, b_plus_ = 0.0;
    std::vector<int> block_index_, block_sizes_, block_start_;
    std::vector<int> perm_;
    double min_abs_beta_ = 0.0, max_abs_beta_ = 0.0;
};

// Validates, reorders canonically (recording the permutation), certifies the
// separation margin theta on the check grid joined with representation
// breakpoints. Structural identity of representations, never sampling,
// decides which entries are "equal"; crossing or touching distinct entries
// raise NonSeparated.
WeightProfile build_weight_profile(std::vector<ScalarFunction> entries, double ell,
                                   int theta_check_grid = 2048);

double evaluate_rho(const WeightProfile& profile, int k, double x);

} // namespace diracbvp
