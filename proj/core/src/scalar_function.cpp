#include "diracbvp/scalar_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "diracbvp/error.hpp"

namespace diracbvp {

ScalarFunction::ScalarFunction() : kind_(Kind::Zero) {}

ScalarFunction ScalarFunction::zero() { return ScalarFunction(); }

ScalarFunction ScalarFunction::constant(Complex value) {
    ScalarFunction f;
    f.kind_ = Kind::Constant;
    f.c_ = value;
    return f;
}

ScalarFunction ScalarFunction::piecewise_polynomial(std::vector<double> breaks,
                                                    std::vector<std::vector<Complex>> coeffs) {
    if (breaks.size() < 2 || coeffs.size() + 1 != breaks.size())
        fail("BadRepresentation", "piecewise polynomial needs M+1 breaks and M coefficient sets");
    if (!std::is_sorted(breaks.begin(), breaks.end()) ||
        std::adjacent_find(breaks.begin(), breaks.end()) != breaks.end())
        fail("BadRepresentation", "breakpoints must be strictly increasing");
    for (const auto& c : coeffs)
        if (c.empty()) fail("BadRepresentation", "empty coefficient set");
    ScalarFunction f;
    f.kind_ = Kind::PiecewisePolynomial;
    f.breaks_ = std::move(breaks);
    f.coeffs_ = std::move(coeffs);
    f.build_primitive_cache();
    return f;
}

ScalarFunction ScalarFunction::tabulated(std::vector<double> nodes, std::vector<Complex> values) {
    if (nodes.size() < 2 || nodes.size() != values.size())
        fail("BadRepresentation", "tabulated data needs >= 2 nodes and matching values");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        fail("BadRepresentation", "tabulation nodes must be strictly increasing");
    ScalarFunction f;
    f.kind_ = Kind::Tabulated;
    f.tx_ = std::move(nodes);
    f.ty_ = std::move(values);
    f.build_primitive_cache();
    return f;
}

double ScalarFunction::domain_begin() const {
    switch (kind_) {
    case Kind::PiecewisePolynomial: return breaks_.front();
    case Kind::Tabulated: return tx_.front();
    default: return 0.0;
    }
}

double ScalarFunction::domain_end() const {
    switch (kind_) {
    case Kind::PiecewisePolynomial: return breaks_.back();
    case Kind::Tabulated: return tx_.back();
    default: return 0.0;
    }
}

std::size_t ScalarFunction::piece_index(double x) const {
    const std::vector<double>& xs = (kind_ == Kind::PiecewisePolynomial) ? breaks_ : tx_;
    if (x <= xs.front()) return 0;
    if (x >= xs.back()) return xs.size() - 2;
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    return static_cast<std::size_t>(it - xs.begin()) - 1;
}

namespace {
Complex poly_eval(const std::vector<Complex>& c, double u) {
    Complex s{0.0, 0.0};
    for (std::size_t i = c.size(); i-- > 0;) s = s * u + c[i];
    return s;
}
Complex poly_prim(const std::vector<Complex>& c, double u) {
    // integral of the local polynomial from 0 to u
    Complex s{0.0, 0.0};
    for (std::size_t i = c.size(); i-- > 0;) s = s * u + c[i] / double(i + 1);
    return s * u;
}
Complex poly_deriv(const std::vector<Complex>& c, double u) {
    Complex s{0.0, 0.0};
    for (std::size_t i = c.size(); i-- > 1;) s = s * u + c[i] * double(i);
    return s;
}
} // namespace

void ScalarFunction::build_primitive_cache() {
    prim_.clear();
    if (kind_ == Kind::PiecewisePolynomial) {
        prim_.resize(breaks_.size());
        prim_[0] = Complex{0.0, 0.0};
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i)
            prim_[i + 1] = prim_[i] + poly_prim(coeffs_[i], breaks_[i + 1] - breaks_[i]);
    } else if (kind_ == Kind::Tabulated) {
        prim_.resize(tx_.size());
        prim_[0] = Complex{0.0, 0.0};
        for (std::size_t i = 0; i + 1 < tx_.size(); ++i)
            prim_[i + 1] = prim_[i] + 0.5 * (ty_[i] + ty_[i + 1]) * (tx_[i + 1] - tx_[i]);
    }
}

Complex ScalarFunction::eval(double x) const {
    switch (kind_) {
    case Kind::Zero: return {0.0, 0.0};
    case Kind::Constant: return c_;
    case Kind::PiecewisePolynomial: {
        double xc = std::clamp(x, breaks_.front(), breaks_.back());
        std::size_t i = piece_index(xc);
        return poly_eval(coeffs_[i], xc - breaks_[i]);
    }
    case Kind::Tabulated: {
        double xc = std::clamp(x, tx_.front(), tx_.back());
        std::size_t i = piece_index(xc);
        double w = (xc - tx_[i]) / (tx_[i + 1] - tx_[i]);
        return ty_[i] * (1.0 - w) + ty_[i + 1] * w;
    }
    }
    return {0.0, 0.0};
}

Complex ScalarFunction::primitive(double x) const {
    switch (kind_) {
    case Kind::Zero: return {0.0, 0.0};
    case Kind::Constant: return c_ * x;
    case Kind::PiecewisePolynomial: {
        if (x < breaks_.front())
            return poly_eval(coeffs_.front(), 0.0) * (x - breaks_.front());
        if (x > breaks_.back())
            return prim_.back() +
                   poly_eval(coeffs_.back(), breaks_.back() - breaks_[breaks_.size() - 2]) *
                       (x - breaks_.back());
        std::size_t i = piece_index(x);
        return prim_[i] + poly_prim(coeffs_[i], x - breaks_[i]);
    }
    case Kind::Tabulated: {
        if (x < tx_.front()) return ty_.front() * (x - tx_.front());
        if (x > tx_.back()) return prim_.back() + ty_.back() * (x - tx_.back());
        std::size_t i = piece_index(x);
        double h = x - tx_[i];
        double dx = tx_[i + 1] - tx_[i];
        Complex slope = (ty_[i + 1] - ty_[i]) / dx;
        return prim_[i] + ty_[i] * h + 0.5 * slope * h * h;
    }
    }
    return {0.0, 0.0};
}

Complex ScalarFunction::derivative(double x) const {
    switch (kind_) {
    case Kind::Zero:
    case Kind::Constant: return {0.0, 0.0};
    case Kind::PiecewisePolynomial: {
        if (x < breaks_.front() || x > breaks_.back()) return {0.0, 0.0};
        std::size_t i = piece_index(x);
        return poly_deriv(coeffs_[i], x - breaks_[i]);
    }
    case Kind::Tabulated: {
        if (x < tx_.front() || x > tx_.back()) return {0.0, 0.0};
        std::size_t i = piece_index(x);
        return (ty_[i + 1] - ty_[i]) / (tx_[i + 1] - tx_[i]);
    }
    }
    return {0.0, 0.0};
}

std::vector<double> ScalarFunction::interior_breakpoints(double a, double b) const {
    std::vector<double> out;
    const std::vector<double>* xs = nullptr;
    if (kind_ == Kind::PiecewisePolynomial) xs = &breaks_;
    if (kind_ == Kind::Tabulated) xs = &tx_;
    if (!xs) return out;
    for (double x : *xs)
        if (x > a && x < b) out.push_back(x);
    return out;
}

ScalarFunction ScalarFunction::conjugated() const {
    ScalarFunction f = *this;
    f.c_ = std::conj(f.c_);
    for (auto& piece : f.coeffs_)
        for (auto& c : piece) c = std::conj(c);
    for (auto& v : f.ty_) v = std::conj(v);
    f.build_primitive_cache();
    return f;
}

ScalarFunction ScalarFunction::scaled(Complex factor) const {
    if (factor == Complex(0.0, 0.0)) return ScalarFunction::zero();
    ScalarFunction f = *this;
    f.c_ *= factor;
    for (auto& piece : f.coeffs_)
        for (auto& c : piece) c *= factor;
    for (auto& v : f.ty_) v *= factor;
    f.build_primitive_cache();
    return f;
}

bool ScalarFunction::same_representation(const ScalarFunction& other) const {
    if (kind_ != other.kind_) return false;
    switch (kind_) {
    case Kind::Zero: return true;
    case Kind::Constant: return c_ == other.c_;
    case Kind::PiecewisePolynomial: return breaks_ == other.breaks_ && coeffs_ == other.coeffs_;
    case Kind::Tabulated: return tx_ == other.tx_ && ty_ == other.ty_;
    }
    return false;
}

double ScalarFunction::sup_norm(double a, double b, int grid) const {
    if (kind_ == Kind::Zero) return 0.0;
    if (kind_ == Kind::Constant) return std::abs(c_);
    double m = 0.0;
    for (int i = 0; i <= grid; ++i) {
        double x = a + (b - a) * double(i) / double(grid);
        m = std::max(m, std::abs(eval(x)));
    }
    // pin representation nodes too: extrema of linear/low-degree pieces sit there
    for (double x : interior_breakpoints(a, b)) m = std::max(m, std::abs(eval(x)));
    return m;
}

double ScalarFunction::l1_norm(double a, double b, int grid) const {
    if (kind_ == Kind::Zero) return 0.0;
    if (kind_ == Kind::Constant) return std::abs(c_) * (b - a);
    if (grid % 2) ++grid;
    double h = (b - a) / grid;
    double s = std::abs(eval(a)) + std::abs(eval(b));
    for (int i = 1; i < grid; ++i) s += std::abs(eval(a + i * h)) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

} // namespace diracbvp
