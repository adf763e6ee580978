#pragma once

#include <optional>
#include <string>
#include <vector>

#include "diracbvp/scalar_function.hpp"

namespace diracbvp {

enum class RegularityClass {
    StrictlyRegular,    // zeros eventually simple and uniformly separated
    RegularNotStrict,   // regular, but some exponent pair resonates
    NotRegular,         // a boundary coefficient vanishes
    UndecidableNumeric, // verdict hinges on an undeclared rational relation
};

struct StrictRegularityVerdict {
    RegularityClass status = RegularityClass::UndecidableNumeric;
    std::string reason;
};

// declares b_k = unit * multipliers[k] exactly, with integer multipliers
struct RationalDecl {
    double unit = 0.0;
    std::vector<long long> multipliers;
};

// Quasi-periodic conditions y_k(ell) = c_k y_k(0): regular iff every c_k is
// nonzero; strict regularity is decided pairwise. A pair (j, k) separates
// when b_j ln|c_k| != b_k ln|c_j|, or else when the phase residue
// (b_j arg c_k - b_k arg c_j) / (2 pi gcd(b_j, b_k)) is not an integer --
// which needs the rational dependency of b to be declared, since gcd is not
// a numeric notion. A vanishing phase difference settles the pair as
// non-strict without any declaration.
StrictRegularityVerdict classify_quasi_periodic(const std::vector<Complex>& c,
                                                const std::vector<double>& b,
                                                std::optional<RationalDecl> decl = {});

// Separated two-point conditions for n = 2N channels, pairing channel 2k-1
// (negative weight) with 2k (positive weight):
//   c_{2k-1} y_{2k-1}(0) + c_{2k} y_{2k}(0) = 0,
//   d_{2k-1} y_{2k-1}(ell) + d_{2k} y_{2k}(ell) = 0.
// Reduces to the quasi-periodic test on sigma_k = b_{2k} - b_{2k-1} and
// tau_k = c_{2k} d_{2k-1} / (c_{2k-1} d_{2k}); always strict for N = 1.
// Throws SignPatternViolated unless b alternates negative/positive in pairs.
StrictRegularityVerdict classify_separated(const std::vector<Complex>& c,
                                           const std::vector<Complex>& d,
                                           const std::vector<double>& b,
                                           std::optional<RationalDecl> decl = {});

} // namespace diracbvp
