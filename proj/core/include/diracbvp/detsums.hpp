#pragma once

#include <vector>

#include <Eigen/Dense>

#include "diracbvp/scalar_function.hpp"

namespace diracbvp::detsums {

// strictly increasing 0-based index tuple; () denotes the empty tuple whose
// minor is 1 by convention
using Tuple = std::vector<int>;

std::vector<Tuple> increasing_tuples(int n, int m);
Tuple complement(const Tuple& p, int n);
int index_sum(const Tuple& p); // parity-equivalent to the 1-based index sum for paired tuples
bool contains(const Tuple& p, int v);

// det of the submatrix with the given rows/columns (equal lengths)
Complex minor_det(const Eigen::MatrixXcd& A, const Tuple& rows, const Tuple& cols);

// adjugate via cofactors; exact (and finite) at singular A, where
// det(A) A^{-1} is unusable
Eigen::MatrixXcd adjugate(const Eigen::MatrixXcd& A);
Complex cofactor(const Eigen::MatrixXcd& A, int j, int k); // (j,k) entry of adjugate

// det(A + B) as the signed sum of complementary-minor products
Complex det_sum_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B);
// det(A + B*C) as the triple sum with the product minor split by Cauchy-Binet
Complex det_sum_product_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                  const Eigen::MatrixXcd& C);
// minor of a product as a sum over the inner index tuple (Cauchy-Binet)
Complex cauchy_binet_minor(const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& C, const Tuple& q,
                           const Tuple& p);

// cofactor counterparts of the two expansions
Complex cofactor_sum_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, int j, int k);
Complex cofactor_sum_product_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                       const Eigen::MatrixXcd& C, int j, int k);

} // namespace diracbvp::detsums
