#pragma once

#include <optional>
#include <vector>

#include "diracbvp/winding.hpp"

namespace diracbvp {

// one term  gamma * exp(i * lambda * sigma)
struct ExpTerm {
    double sigma = 0.0;
    Complex gamma{0.0, 0.0};
};

// Finite sum of exponential terms in the spectral parameter. Terms are kept
// sorted by frequency; frequencies coinciding within merge_tol (relative to
// the largest frequency magnitude) are combined and exact-zero coefficients
// dropped.
class ExponentialPolynomial {
  public:
    ExponentialPolynomial() = default;
    explicit ExponentialPolynomial(std::vector<ExpTerm> terms, double merge_tol = 1e-12);

    const std::vector<ExpTerm>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    double min_exponent() const; // smallest frequency; throws InsufficientTerms when empty
    double max_exponent() const;

    Complex eval(Complex lambda) const;
    Complex derivative(Complex lambda) const;

  private:
    std::vector<ExpTerm> terms_;
};

// declares that every frequency is an integer multiple of `unit`
struct CommensurableFrequencies {
    double unit = 0.0;
};

// All zeros with real part in [re_lo, re_hi] and |Im lambda| <= strip, sorted
// by real part. With a declared frequency unit u the sum becomes a polynomial
// in z = e^{i lambda u}: its companion-matrix roots are lifted to the window
// branch by branch and each candidate is confirmed (position, multiplicity)
// by a contour count on a small surrounding box. Without the declaration the
// window is swept directly by contour bisection. Throws InsufficientTerms for
// fewer than two terms (such a sum has no zeros or is identically zero),
// NotCommensurable when a frequency is not an integer multiple of the
// declared unit, and WindingMismatch when polished roots disagree with the
// contour count.
std::vector<LocatedZero> exp_poly_zeros(const ExponentialPolynomial& poly, double re_lo,
                                        double re_hi, double strip,
                                        std::optional<CommensurableFrequencies> decl = {},
                                        double tol = 1e-12);

} // namespace diracbvp
