#pragma once

#include <complex>
#include <vector>

namespace diracbvp {

using Complex = std::complex<double>;

// One scalar coefficient function on [x0, x1]. Four representation kinds:
// zero, constant, piecewise polynomial (local power basis per piece), and
// tabulated with linear interpolation. The class provides exact evaluation,
// an exact antiderivative from the left domain endpoint, and an exact
// one-sided derivative; all three extend outside the domain by constant
// continuation of the endpoint values (the antiderivative then continues
// linearly), which is the extension the kernel machinery expects.
class ScalarFunction {
public:
    enum class Kind { Zero, Constant, PiecewisePolynomial, Tabulated };

    ScalarFunction(); // zero

    static ScalarFunction zero();
    static ScalarFunction constant(Complex value);
    // breaks: x_0 < ... < x_M; coeffs[i] are ascending power-basis
    // coefficients in the local variable (x - x_i) valid on [x_i, x_{i+1}].
    static ScalarFunction piecewise_polynomial(std::vector<double> breaks,
                                               std::vector<std::vector<Complex>> coeffs);
    static ScalarFunction tabulated(std::vector<double> nodes, std::vector<Complex> values);

    Kind kind() const noexcept { return kind_; }

    Complex eval(double x) const;
    // integral of eval from domain_begin() to x (exact per representation)
    Complex primitive(double x) const;
    // one-sided (right) derivative; piecewise-constant for tabulated data
    Complex derivative(double x) const;

    double domain_begin() const;
    double domain_end() const;

    // breakpoints interior to (a, b) that integrators must not step across
    std::vector<double> interior_breakpoints(double a, double b) const;

    // value-level transforms preserving the representation kind
    ScalarFunction conjugated() const;
    ScalarFunction scaled(Complex factor) const;

    bool is_structurally_zero() const noexcept { return kind_ == Kind::Zero; }
    // structural identity (same kind, bit-identical data); never numeric sampling
    bool same_representation(const ScalarFunction& other) const;

    double sup_norm(double a, double b, int grid = 512) const;
    double l1_norm(double a, double b, int grid = 2048) const;

    // accessors used by serialization
    Complex constant_value() const { return c_; }
    const std::vector<double>& poly_breaks() const { return breaks_; }
    const std::vector<std::vector<Complex>>& poly_coeffs() const { return coeffs_; }
    const std::vector<double>& table_nodes() const { return tx_; }
    const std::vector<Complex>& table_values() const { return ty_; }

private:
    Kind kind_;
    Complex c_{0.0, 0.0};
    std::vector<double> breaks_;
    std::vector<std::vector<Complex>> coeffs_;
    std::vector<double> tx_;
    std::vector<Complex> ty_;
    std::vector<Complex> prim_; // primitive value at each piece/node start

    void build_primitive_cache();
    std::size_t piece_index(double x) const;
};

} // namespace diracbvp
