#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/scalar_function.hpp"
#include "diracbvp/weight_profile.hpp"

namespace diracbvp {

struct ZeroBlockDiagonalReport {
    bool ok = true;
    // (j, k) pairs with beta_j == beta_k whose entry is not structurally zero
    std::vector<std::pair<int, int>> offenders;
};

// n x n matrix of scalar coefficient functions. Entries are either explicit
// ScalarFunction representations or, for derived potentials (the gauge
// output), a whole-matrix callable plus a structural zero mask that records
// which entries are identically zero by construction.
class PotentialMatrix {
public:
    PotentialMatrix() = default;
    explicit PotentialMatrix(int n); // all-zero
    static PotentialMatrix from_entries(int n, std::vector<ScalarFunction> row_major);
    static PotentialMatrix from_callable(int n, std::function<Eigen::MatrixXcd(double)> eval,
                                         Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> zero_mask,
                                         std::vector<double> breakpoints);

    int n() const { return n_; }
    bool has_callable() const { return static_cast<bool>(callable_); }

    Eigen::MatrixXcd eval(double x) const;
    void eval_into(double x, Eigen::MatrixXcd& out) const; // out must be n x n
    Complex entry_eval(int j, int k, double x) const;
    const ScalarFunction& entry(int j, int k) const;
    void set_entry(int j, int k, ScalarFunction f);

    bool entry_is_zero(int j, int k) const; // structural, not sampled

    std::vector<double> interior_breakpoints(double a, double b) const;
    double sup_norm(double a, double b, int grid = 512) const; // max entry sup
    double l1_norm(double a, double b, int grid = 2048) const; // max entry L1

private:
    int n_ = 0;
    std::vector<ScalarFunction> entries_; // row-major, empty when callable
    std::function<Eigen::MatrixXcd(double)> callable_;
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> zero_mask_;
    std::vector<double> extra_breaks_;
};

// true iff every entry within an equal-weight block is structurally zero
ZeroBlockDiagonalReport validate_zero_block_diagonal(const PotentialMatrix& Q,
                                                     const WeightProfile& profile);

} // namespace diracbvp
