#include <doctest.h>

#include <cmath>

#include "diracbvp/error.hpp"
#include "diracbvp/scalar_function.hpp"

using diracbvp::Complex;
using diracbvp::Error;
using diracbvp::ScalarFunction;

TEST_CASE("constant representation evaluates, integrates, differentiates") {
    auto f = ScalarFunction::constant(Complex(-2.0, 0.5));
    CHECK(f.eval(0.3) == Complex(-2.0, 0.5));
    CHECK(f.primitive(2.0) == Complex(-4.0, 1.0));
    CHECK(f.derivative(1.0) == Complex(0.0, 0.0));
    CHECK_FALSE(f.is_structurally_zero());
}

TEST_CASE("piecewise polynomial matches hand antiderivative") {
    // beta(x) = 1 - x/2 on [0, 1]: rho(x) = x - x^2/4
    auto f = ScalarFunction::piecewise_polynomial({0.0, 1.0}, {{Complex(1.0), Complex(-0.5)}});
    CHECK(f.eval(0.0).real() == doctest::Approx(1.0));
    CHECK(f.eval(1.0).real() == doctest::Approx(0.5));
    for (double x : {0.1, 0.25, 0.5, 0.9, 1.0})
        CHECK(f.primitive(x).real() == doctest::Approx(x - x * x / 4.0).epsilon(1e-14));
    CHECK(f.derivative(0.3).real() == doctest::Approx(-0.5));
}

TEST_CASE("multi-piece polynomial keeps the antiderivative continuous") {
    // f = x on [0,1], f = 2 - x on [1,2] (hat)
    auto f = ScalarFunction::piecewise_polynomial(
        {0.0, 1.0, 2.0}, {{Complex(0.0), Complex(1.0)}, {Complex(1.0), Complex(-1.0)}});
    CHECK(f.eval(0.5).real() == doctest::Approx(0.5));
    CHECK(f.eval(1.5).real() == doctest::Approx(0.5));
    CHECK(f.primitive(1.0).real() == doctest::Approx(0.5));
    CHECK(f.primitive(2.0).real() == doctest::Approx(1.0));
    CHECK(f.primitive(1.5).real() == doctest::Approx(0.5 + 0.375));
    auto breaks = f.interior_breakpoints(0.0, 2.0);
    REQUIRE(breaks.size() == 1);
    CHECK(breaks[0] == doctest::Approx(1.0));
}

TEST_CASE("constant extension beyond the domain, linear continuation of the primitive") {
    auto f = ScalarFunction::piecewise_polynomial({0.0, 1.0}, {{Complex(1.0), Complex(-0.5)}});
    // value clamps to the endpoint values
    CHECK(f.eval(-1.0).real() == doctest::Approx(1.0));
    CHECK(f.eval(2.5).real() == doctest::Approx(0.5));
    // primitive continues with the endpoint slope
    CHECK(f.primitive(-1.0).real() == doctest::Approx(-1.0));
    CHECK(f.primitive(2.0).real() == doctest::Approx(0.75 + 0.5));
}

TEST_CASE("tabulated data is integrated exactly as a polyline") {
    auto f = ScalarFunction::tabulated({0.0, 1.0, 2.0}, {Complex(0.0), Complex(1.0), Complex(1.0)});
    CHECK(f.eval(0.5).real() == doctest::Approx(0.5));
    CHECK(f.eval(1.7).real() == doctest::Approx(1.0));
    CHECK(f.primitive(1.0).real() == doctest::Approx(0.5));
    CHECK(f.primitive(2.0).real() == doctest::Approx(1.5));
    CHECK(f.primitive(0.5).real() == doctest::Approx(0.125));
}

TEST_CASE("structural identity distinguishes representations, not values") {
    auto a = ScalarFunction::constant(Complex(1.0, 0.0));
    auto b = ScalarFunction::constant(Complex(1.0, 0.0));
    auto c = ScalarFunction::piecewise_polynomial({0.0, 1.0}, {{Complex(1.0)}});
    CHECK(a.same_representation(b));
    CHECK_FALSE(a.same_representation(c)); // numerically equal, structurally different
}

TEST_CASE("invalid representations are rejected") {
    CHECK_THROWS_AS(ScalarFunction::piecewise_polynomial({1.0, 0.0}, {{Complex(1.0)}}), Error);
    CHECK_THROWS_AS(ScalarFunction::piecewise_polynomial({0.0}, {}), Error);
    CHECK_THROWS_AS(ScalarFunction::tabulated({0.0, 0.0}, {Complex(1.0), Complex(2.0)}), Error);
    CHECK_THROWS_AS(ScalarFunction::tabulated({0.0}, {Complex(1.0)}), Error);
}

TEST_CASE("norms: sup on a grid with breakpoints pinned, L1 by quadrature") {
    auto f = ScalarFunction::piecewise_polynomial(
        {0.0, 1.0, 2.0}, {{Complex(0.0), Complex(1.0)}, {Complex(1.0), Complex(-1.0)}});
    CHECK(f.sup_norm(0.0, 2.0) == doctest::Approx(1.0));
    CHECK(f.l1_norm(0.0, 2.0) == doctest::Approx(1.0).epsilon(1e-9));
}
