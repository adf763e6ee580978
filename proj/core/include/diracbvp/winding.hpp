#pragma once

#include <functional>
#include <vector>

#include "diracbvp/scalar_function.hpp"

namespace diracbvp {

// Analytic function handle with an exact derivative. phase_scale estimates
// |d arg f / d lambda| and sizes the initial contour discretization.
struct AnalyticFunction {
    std::function<Complex(Complex)> f;
    std::function<Complex(Complex)> df;
    double phase_scale = 1.0;
};

struct Box {
    double re_lo = 0, re_hi = 0, im_lo = 0, im_hi = 0;

    double width() const { return re_hi - re_lo; }
    double height() const { return im_hi - im_lo; }
    Complex center() const { return {0.5 * (re_lo + re_hi), 0.5 * (im_lo + im_hi)}; }
    bool contains(Complex z, double slack = 0.0) const {
        return z.real() >= re_lo - slack && z.real() <= re_hi + slack &&
               z.imag() >= im_lo - slack && z.imag() <= im_hi + slack;
    }
};

struct LocatedZero {
    Complex lambda{0.0, 0.0};
    int multiplicity = 1;
    double residual = 0.0; // |f(lambda)|
};

// Winding number of f along the box boundary, by trapezoidal integration of
// f'/f with panel doubling until the integral sits within 0.25 of an
// integer. A boundary sample too close to a zero jitters the box and
// retries (up to 5 times) before raising ContourThroughZero.
int winding_number(const AnalyticFunction& fn, Box box);

// All zeros of f inside the box with winding multiplicities, by recursive
// bisection down to isolated zeros (Newton-refined) or unresolvable
// clusters (reported at the contour centroid with the cluster's total
// multiplicity). Throws WindingMismatch if refinement loses a zero.
std::vector<LocatedZero> analytic_zeros(const AnalyticFunction& fn, Box box,
                                        double newton_tol = 1e-12,
                                        double cluster_diameter = 1e-9);

} // namespace diracbvp
