#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/weight_profile.hpp"

namespace diracbvp {

// Vector-valued trajectory sampled on a grid in [0, ell], living in the
// weighted space whose inner product is
//   (f, g) = integral_0^ell  sum_k f_k(x) conj(g_k(x)) |beta_k(x)| dx
// (conjugation on the second argument).
struct WeightedVectorFunction {
    std::shared_ptr<const WeightProfile> profile;
    std::vector<double> grid;              // ascending, grid.front()=0, grid.back()=ell
    std::vector<Eigen::VectorXcd> values;  // one n-vector per node

    int n() const { return profile ? profile->n() : 0; }
    std::size_t size() const { return grid.size(); }
};

// uniform grid with `intervals` subintervals (intervals+1 nodes)
std::vector<double> uniform_grid(double ell, int intervals);

// samples `fn` at every grid node
WeightedVectorFunction make_weighted_function(std::shared_ptr<const WeightProfile> profile,
                                              std::vector<double> grid,
                                              const std::function<Eigen::VectorXcd(double)>& fn);

WeightedVectorFunction scaled(const WeightedVectorFunction& f, Complex factor);

// Precomputed |beta_k(x_i)| table, reusable across many inner products on
// the same grid (Gram matrices, cross-pairing tables).
struct WeightTable {
    std::vector<double> grid;
    Eigen::MatrixXd w; // size() x n, w(i, k) = |beta_k(x_i)|
};

WeightTable build_weight_table(const WeightProfile& profile, const std::vector<double>& grid);

// Composite Simpson quadrature of the weighted pairing. Both arguments must
// share the grid (GridMismatch otherwise); resample first when they differ.
Complex weighted_inner_product(const WeightedVectorFunction& f, const WeightedVectorFunction& g);
Complex weighted_inner_product(const WeightedVectorFunction& f, const WeightedVectorFunction& g,
                               const WeightTable& table);

double weighted_norm(const WeightedVectorFunction& f);
double weighted_norm(const WeightedVectorFunction& f, const WeightTable& table);

// Componentwise cubic (4-point Lagrange) resampling onto a new grid. Target
// nodes must lie inside the source span up to roundoff.
WeightedVectorFunction resample_cubic(const WeightedVectorFunction& f,
                                      std::vector<double> new_grid);

} // namespace diracbvp
