#include <doctest.h>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/error.hpp"
#include "diracbvp/spectra.hpp"
#include "diracbvp/timoshenko.hpp"

#include "helpers.hpp"

using namespace diracbvp;
using testutil::cst;

namespace {

const Complex I{0.0, 1.0};
const double pi = std::acos(-1.0);

// stiff shear beam: unit density/inertia/flexural rigidity, shear = 4, so the
// two wave speeds are 2 and 1 (travel times b1 = 1, b2 = 1/2, impedances
// h1 = 1, h2 = 2), with uncoupled boundary feedback alpha1 = 3, alpha2 = 1
TimoshenkoModel stiff_shear_beam() {
    TimoshenkoModel m;
    m.density = cst(1.0);
    m.rot_inertia = cst(1.0);
    m.shear = cst(4.0);
    m.flexural = cst(1.0);
    m.damping1 = ScalarFunction::zero();
    m.damping2 = ScalarFunction::zero();
    m.alpha1 = Complex{3.0, 0.0};
    m.alpha2 = Complex{1.0, 0.0};
    m.ell = 1.0;
    m.speeds = SpeedDeclaration::Separated;
    return m;
}

// all material coefficients 1: both wave speeds equal 1, impedances 1
TimoshenkoModel uniform_beam() {
    TimoshenkoModel m;
    m.density = cst(1.0);
    m.rot_inertia = cst(1.0);
    m.shear = cst(1.0);
    m.flexural = cst(1.0);
    m.damping1 = ScalarFunction::zero();
    m.damping2 = ScalarFunction::zero();
    m.alpha1 = Complex{2.0, 0.0};
    m.alpha2 = Complex{0.5, 0.0};
    m.ell = 1.0;
    m.speeds = SpeedDeclaration::Equal;
    return m;
}

// (1 + 0.2 x)^2 as an exact quadratic on [0, 1]
ScalarFunction squared_ramp() {
    return ScalarFunction::piecewise_polynomial(
        {0.0, 1.0}, {{Complex{1.0, 0.0}, Complex{0.4, 0.0}, Complex{0.04, 0.0}}});
}

} // namespace

TEST_CASE("beam scales: travel times, impedances, gauges, regularity") {
    auto m = stiff_shear_beam();
    m.damping1 = cst(0.3);
    m.damping2 = cst(0.1);
    const BeamScales s = beam_scales(m);

    CHECK(std::abs(s.b1 - 1.0) < 1e-14);
    CHECK(std::abs(s.b2 - 0.5) < 1e-14);
    CHECK(std::abs(s.h1_0 - 1.0) < 1e-14);
    CHECK(std::abs(s.h1_ell - 1.0) < 1e-14);
    CHECK(std::abs(s.h2_0 - 2.0) < 1e-14);
    CHECK(std::abs(s.h2_ell - 2.0) < 1e-14);
    CHECK(std::abs(s.v1_plus - 1.0) < 1e-14);
    CHECK(std::abs(s.v2_minus - 1.0) < 1e-14);
    CHECK(std::abs(s.alpha1_plus - Complex{4.0, 0.0}) < 1e-14);
    CHECK(std::abs(s.alpha1_minus - Complex{2.0, 0.0}) < 1e-14);
    CHECK(std::abs(s.alpha2_plus - Complex{3.0, 0.0}) < 1e-14);
    CHECK(std::abs(s.alpha2_minus - Complex{-1.0, 0.0}) < 1e-14);
    // boundary combinations (alpha1 +- h1)(alpha2 +- h2) - gamma1 gamma2
    CHECK(std::abs(s.j_plus - Complex{12.0, 0.0}) < 1e-14);
    CHECK(std::abs(s.j_minus - Complex{-2.0, 0.0}) < 1e-14);
    CHECK(s.regular);
    // gauge_k = exp(-integral p_k / (2 h_k)): exp(-0.15), exp(-0.025)
    CHECK(std::abs(s.gauge1 - std::exp(Complex{-0.15, 0.0})) < 1e-14);
    CHECK(std::abs(s.gauge2 - std::exp(Complex{-0.025, 0.0})) < 1e-14);

    SUBCASE("a vanishing boundary combination flips the regular flag") {
        auto bad = stiff_shear_beam();
        bad.alpha1 = Complex{1.0, 0.0}; // alpha1 = h1(ell) -> j_minus = 0
        CHECK_FALSE(beam_scales(bad).regular);
        CHECK_THROWS_WITH_AS(tim_asymptotic_branches(bad),
                             doctest::Contains("RegularityViolated"), Error);
    }
}

TEST_CASE("reduction of the uniform beam has only half couplings") {
    const auto m = uniform_beam();
    const BeamReduction red = reduce_to_dirac(m);

    CHECK(red.bvp.n() == 4);
    CHECK(red.bvp.profile.block_count() == 2);
    CHECK(red.bvp.profile.theta() == doctest::Approx(2.0));
    const auto& perm = red.bvp.profile.permutation();
    CHECK(perm == std::vector<int>{0, 2, 1, 3});

    // canonical weights (-1, -1, 1, 1); the coupling h2/(2 h1) = 1/2 and the
    // exact -+1/2 rows survive reordering, everything else vanishes
    Eigen::Matrix4cd want;
    want << 0.0, 0.5, 0.0, -0.5, //
        -0.5, 0.0, -0.5, 0.0,    //
        0.0, 0.5, 0.0, -0.5,     //
        0.5, 0.0, 0.5, 0.0;
    for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) {
            for (double x : {0.0, 0.3, 0.8})
                CHECK(std::abs(red.bvp.Q.entry_eval(j, k, x) - want(j, k)) < 1e-14);
        }

    // clamped rows and feedback rows, columns permuted like the channels
    Eigen::Matrix4cd cw = Eigen::Matrix4cd::Zero(), dw = Eigen::Matrix4cd::Zero();
    cw(0, 0) = cw(0, 2) = 1.0;
    cw(2, 1) = cw(2, 3) = 1.0;
    dw(1, 0) = Complex{1.0, 0.0};  // alpha1 - h1(ell)
    dw(1, 2) = Complex{3.0, 0.0};  // alpha1 + h1(ell)
    dw(3, 1) = Complex{-0.5, 0.0}; // alpha2 - h2(ell)
    dw(3, 3) = Complex{1.5, 0.0};  // alpha2 + h2(ell)
    CHECK((red.bvp.bc.C - cw).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((red.bvp.bc.D - dw).cwiseAbs().maxCoeff() < 1e-14);

    // equal speeds declare the common travel time as the rational unit
    REQUIRE(red.bvp.commensurable.has_value());
    CHECK(red.bvp.commensurable->unit == doctest::Approx(1.0));
    CHECK(red.bvp.commensurable->multipliers == std::vector<long long>{-1, -1, 1, 1});
}

TEST_CASE("four-term comparison polynomial matches hand expansion") {
    const auto m = stiff_shear_beam();
    const ExponentialPolynomial poly = tim_model_polynomial(m);

    // (alpha1 +- h1)(alpha2 +- h2) products with unit impedance ratios:
    // 12 e^{1.5 i L} - 2 e^{-1.5 i L} + 4 e^{0.5 i L} - 6 e^{-0.5 i L}
    REQUIRE(poly.terms().size() == 4);
    const double sig[] = {-1.5, -0.5, 0.5, 1.5};
    const Complex gam[] = {{-2.0, 0.0}, {-6.0, 0.0}, {4.0, 0.0}, {12.0, 0.0}};
    for (int t = 0; t < 4; ++t) {
        CHECK(std::abs(poly.terms()[std::size_t(t)].sigma - sig[t]) < 1e-14);
        CHECK(std::abs(poly.terms()[std::size_t(t)].gamma - gam[t]) < 1e-12);
    }
    CHECK(std::abs(tim_delta0(m, Complex{0.0, 0.0}) - Complex{8.0, 0.0}) < 1e-12);

    SUBCASE("factored form for uncoupled feedback") {
        // gamma1 gamma2 = 0 splits the sum into the product of two binomials
        for (Complex lam : {Complex{1.3, 0.4}, Complex{-2.7, -0.2}, Complex{0.0, 1.0}}) {
            const Complex f1 =
                4.0 * std::exp(I * lam) - 2.0 * std::exp(-I * lam);
            const Complex f2 =
                3.0 * std::exp(I * lam * 0.5) + std::exp(-I * lam * 0.5);
            CHECK(std::abs(tim_delta0(m, lam) - f1 * f2) < 1e-11 * (1.0 + std::abs(f1 * f2)));
        }
    }
}

TEST_CASE("gauge identity ties the polynomial to the boundary determinant") {
    auto m = stiff_shear_beam();
    m.damping1 = cst(0.3);
    m.damping2 = cst(0.1);
    m.gamma1 = Complex{0.2, 0.0};
    m.gamma2 = Complex{-0.4, 0.0};
    const BeamScales s = beam_scales(m);

    // det(C + D diag(w) Phi0) with w_k^{+-} = v_k^{+-} gauge_k must equal
    // gauge1 * gauge2 * tim_delta0 identically in lambda
    const Complex w1m = s.v1_minus * s.gauge1, w1p = s.v1_plus * s.gauge1;
    const Complex w2m = s.v2_minus * s.gauge2, w2p = s.v2_plus * s.gauge2;
    for (Complex lam : {Complex{1.3, 0.4}, Complex{-2.0, -0.7}, Complex{5.5, 0.0}}) {
        const Complex e1m = std::exp(-I * lam * s.b1), e1p = std::exp(I * lam * s.b1);
        const Complex e2m = std::exp(-I * lam * s.b2), e2p = std::exp(I * lam * s.b2);
        Eigen::Matrix4cd a = Eigen::Matrix4cd::Zero();
        a(0, 0) = a(0, 1) = 1.0;
        a(2, 2) = a(2, 3) = 1.0;
        a(1, 0) = s.alpha1_minus * w1m * e1m;
        a(1, 1) = s.alpha1_plus * w1p * e1p;
        a(1, 2) = m.gamma1 * w2m * e2m;
        a(1, 3) = m.gamma1 * w2p * e2p;
        a(3, 0) = m.gamma2 * w1m * e1m;
        a(3, 1) = m.gamma2 * w1p * e1p;
        a(3, 2) = s.alpha2_minus * w2m * e2m;
        a(3, 3) = s.alpha2_plus * w2p * e2p;
        const Complex det = a.determinant();
        const Complex rhs = s.gauge1 * s.gauge2 * tim_delta0(m, lam);
        CHECK(std::abs(det - rhs) < 1e-12 * (1.0 + std::abs(det)));
    }
}

TEST_CASE("uncoupled boundary: one progression per channel") {
    const auto m = stiff_shear_beam();
    const BranchReport rep = tim_asymptotic_branches(m);

    CHECK(rep.regime == BeamRegime::UncoupledBoundary);
    REQUIRE(rep.branches.size() == 2);
    // channel 1: tau = 2/4 -> pi m + i ln(2)/2
    CHECK(std::abs(rep.branches[0].step - pi) < 1e-14);
    CHECK(std::abs(rep.branches[0].offset - Complex{0.0, 0.5 * std::log(2.0)}) < 1e-12);
    // channel 2: tau = -1/3 -> 2 pi m + pi + i ln(3)
    CHECK(std::abs(rep.branches[1].step - 2.0 * pi) < 1e-14);
    CHECK(std::abs(rep.branches[1].offset - Complex{pi, std::log(3.0)}) < 1e-12);
    CHECK(rep.separation == SeparationVerdict::Separated);

    SUBCASE("branch points annihilate the comparison polynomial") {
        const ExponentialPolynomial poly = tim_model_polynomial(m);
        for (const auto& br : rep.branches)
            for (int k : {0, 1, -2})
                CHECK(std::abs(poly.eval(br.offset + Complex{br.step * k, 0.0})) < 1e-10);
    }

    SUBCASE("resonating moduli are reported as not separated") {
        // tau1 = 1/4, tau2 = 1/2 make b1 ln|tau2| = b2 ln|tau1| with zero
        // phase difference: zeros of the two progressions eventually collide
        auto res = stiff_shear_beam();
        res.alpha1 = Complex{5.0 / 3.0, 0.0};
        res.alpha2 = Complex{6.0, 0.0};
        const BranchReport rr = tim_asymptotic_branches(res);
        CHECK(rr.regime == BeamRegime::UncoupledBoundary);
        CHECK(rr.separation == SeparationVerdict::NotSeparated);
    }
}

TEST_CASE("aligned boundary collapses to a single progression") {
    // gamma1 = gamma2 = 1 and alpha1^2 = h1^2 + (h1/h2) gamma1 gamma2 kill
    // both middle exponents; the remaining two terms give one progression
    auto m = stiff_shear_beam();
    m.gamma1 = Complex{1.0, 0.0};
    m.gamma2 = Complex{1.0, 0.0};
    m.alpha1 = Complex{std::sqrt(1.5), 0.0};
    m.alpha2 = Complex{2.0 * std::sqrt(1.5), 0.0};

    const BeamScales s = beam_scales(m);
    CHECK(std::abs(s.alpha1_plus * s.alpha2_minus - Complex{1.0, 0.0}) < 1e-12);
    CHECK(std::abs(s.alpha1_minus * s.alpha2_plus - Complex{1.0, 0.0}) < 1e-12);

    const BranchReport rep = tim_asymptotic_branches(m);
    CHECK(rep.regime == BeamRegime::AlignedBoundary);
    REQUIRE(rep.branches.size() == 1);
    CHECK(std::abs(rep.branches[0].step - pi / 1.5) < 1e-14);
    const Complex tau0 = Complex{1.0, 0.0} / (s.alpha1_plus * s.alpha2_plus);
    CHECK(std::abs(rep.branches[0].offset - (-I) * std::log(tau0) / 3.0) < 1e-12);
    CHECK(rep.separation == SeparationVerdict::Separated);

    // the progression consists of zeros of the full four-term polynomial
    const ExponentialPolynomial poly = tim_model_polynomial(m);
    for (int k : {0, 1, -1, 3})
        CHECK(std::abs(poly.eval(rep.branches[0].offset + Complex{rep.branches[0].step * k, 0.0})) <
              1e-10);
}

TEST_CASE("commensurable travel ratio enumerates polynomial roots") {
    auto m = stiff_shear_beam();
    m.gamma1 = Complex{0.5, 0.0};
    m.gamma2 = Complex{0.3, 0.0};
    m.travel_ratio = std::make_pair(2LL, 1LL); // b1 : b2 = 1 : 1/2

    const BranchReport rep = tim_asymptotic_branches(m);
    CHECK(rep.regime == BeamRegime::CommensurableTravel);
    REQUIRE(rep.branches.size() == 6); // degree 2 (n1 + n2)
    CHECK(rep.separation == SeparationVerdict::Separated);
    CHECK(rep.root_gap > 0.1);

    const ExponentialPolynomial poly = tim_model_polynomial(m);
    for (const auto& br : rep.branches) {
        CHECK(std::abs(br.step - 2.0 * pi / 0.5) < 1e-12);
        for (int k : {0, 1, -3})
            CHECK(std::abs(poly.eval(br.offset + Complex{br.step * k, 0.0})) < 1e-10);
    }

    SUBCASE("an inconsistent declared ratio is rejected") {
        auto bad = stiff_shear_beam();
        bad.travel_ratio = std::make_pair(3LL, 1LL);
        CHECK_THROWS_WITH_AS(tim_asymptotic_branches(bad), doctest::Contains("NotCommensurable"),
                             Error);
    }
}

TEST_CASE("equal speeds: rotation gauge, quadratic coefficients, branches") {
    const auto m = uniform_beam();
    const EqualSpeedSystem sys = equal_speed_system(m);

    // with unit impedances and no damping the gauge systems are rotations by
    // -+ x/2; at x = ell = 1 the angles are -+ 1/2
    const double c = std::cos(0.5), sn = std::sin(0.5);
    CHECK(std::abs(sys.w_minus(0, 0) - c) < 1e-10);
    CHECK(std::abs(sys.w_minus(0, 1) + sn) < 1e-10);
    CHECK(std::abs(sys.w_minus(1, 0) - sn) < 1e-10);
    CHECK(std::abs(sys.w_minus(1, 1) - c) < 1e-10);
    CHECK(std::abs(sys.w_plus(0, 0) - c) < 1e-10);
    CHECK(std::abs(sys.w_plus(0, 1) - sn) < 1e-10);
    CHECK(std::abs(sys.w_plus(1, 0) + sn) < 1e-10);
    CHECK(std::abs(sys.w_plus(1, 1) - c) < 1e-10);

    // d_plus = j_plus det W_plus = 4.5, d_minus = j_minus det W_minus = -0.5,
    // d_zero = 0 by the symmetry of the two rotations; roots z = +-1/3
    CHECK(std::abs(sys.b - 1.0) < 1e-14);
    CHECK(std::abs(sys.d_plus - Complex{4.5, 0.0}) < 1e-9);
    CHECK(std::abs(sys.d_minus - Complex{-0.5, 0.0}) < 1e-9);
    CHECK(std::abs(sys.d_zero) < 1e-10);
    const double zmag = 1.0 / 3.0;
    CHECK(std::abs(sys.z1 - Complex{zmag, 0.0}) < 1e-9);
    CHECK(std::abs(sys.z2 - Complex{-zmag, 0.0}) < 1e-9);

    const BranchReport rep = tim_asymptotic_branches(m);
    CHECK(rep.regime == BeamRegime::EqualSpeeds);
    REQUIRE(rep.branches.size() == 2);
    CHECK(std::abs(rep.branches[0].step - pi) < 1e-14);
    CHECK(std::abs(rep.branches[0].offset - Complex{0.0, 0.5 * std::log(3.0)}) < 1e-9);
    CHECK(std::abs(rep.branches[1].offset - Complex{0.5 * pi, 0.5 * std::log(3.0)}) < 1e-9);
    CHECK(rep.separation == SeparationVerdict::Separated);
    CHECK(rep.root_gap == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("equal speeds: quadratic equals the boundary determinant") {
    // damping and asymmetric cross-feedback pin the placement of gamma1 and
    // gamma2 in the boundary combinations
    auto m = uniform_beam();
    m.damping1 = cst(Complex{0.25, 0.0});
    m.damping2 = cst(Complex{-0.1, 0.05});
    m.alpha1 = Complex{2.0, 0.3};
    m.alpha2 = Complex{0.5, -0.2};
    m.gamma1 = Complex{0.3, 0.1};
    m.gamma2 = Complex{-0.2, 0.0};
    const EqualSpeedSystem sys = equal_speed_system(m);
    const BeamScales& s = sys.scales;

    for (Complex lam : {Complex{0.9, 0.2}, Complex{-1.7, -0.5}}) {
        Eigen::Matrix4cd w = Eigen::Matrix4cd::Zero();
        w(0, 0) = sys.w_minus(0, 0);
        w(0, 2) = sys.w_minus(0, 1);
        w(2, 0) = sys.w_minus(1, 0);
        w(2, 2) = sys.w_minus(1, 1);
        w(1, 1) = sys.w_plus(0, 0);
        w(1, 3) = sys.w_plus(0, 1);
        w(3, 1) = sys.w_plus(1, 0);
        w(3, 3) = sys.w_plus(1, 1);
        Eigen::Matrix4cd cm = Eigen::Matrix4cd::Zero(), dm = Eigen::Matrix4cd::Zero();
        cm(0, 0) = cm(0, 1) = 1.0;
        cm(2, 2) = cm(2, 3) = 1.0;
        dm(1, 0) = s.alpha1_minus;
        dm(1, 1) = s.alpha1_plus;
        dm(1, 2) = dm(1, 3) = m.gamma1;
        dm(3, 0) = dm(3, 1) = m.gamma2;
        dm(3, 2) = s.alpha2_minus;
        dm(3, 3) = s.alpha2_plus;
        Eigen::Vector4cd ph;
        ph << std::exp(-I * lam * sys.b), std::exp(I * lam * sys.b), std::exp(-I * lam * sys.b),
            std::exp(I * lam * sys.b);
        const Complex det = (cm + dm * w * ph.asDiagonal()).determinant();
        CHECK(std::abs(det - tim_delta0_equal(m, lam)) < 1e-12 * (1.0 + std::abs(det)));
    }

    SUBCASE("volume identities for the gauge determinants") {
        const Complex detWp =
            sys.w_plus(0, 0) * sys.w_plus(1, 1) - sys.w_plus(0, 1) * sys.w_plus(1, 0);
        const Complex detWm =
            sys.w_minus(0, 0) * sys.w_minus(1, 1) - sys.w_minus(0, 1) * sys.w_minus(1, 0);
        // unit impedances: det W_+- = exp(-integral (p1 + p2) / 2)
        const Complex pred = std::exp(-(Complex{0.25, 0.0} + Complex{-0.1, 0.05}) * 0.5);
        CHECK(std::abs(detWp - pred) < 5e-12);
        CHECK(std::abs(detWm - pred) < 5e-12);
        CHECK(std::abs(sys.d_plus - s.j_plus * detWp) < 1e-12);
        CHECK(std::abs(sys.d_minus - s.j_minus * detWm) < 1e-12);
    }
}

TEST_CASE("varying coefficients: tabulated reduction stays consistent") {
    // rot_inertia = (1 + 0.2 x)^2 gives exact health checks: beta1 = 1 + 0.2x,
    // h1 = 1 + 0.2x, h1' = 0.2, b1 = 1.1, and gauge1 = 1.2^{-1/4} for p1 = 0.1
    auto m = stiff_shear_beam();
    m.rot_inertia = squared_ramp();
    m.damping1 = cst(0.1);

    const BeamScales s = beam_scales(m);
    CHECK(std::abs(s.b1 - 1.1) < 1e-12);
    CHECK(std::abs(s.b2 - 0.5) < 1e-14);
    CHECK(std::abs(s.h1_ell - 1.2) < 1e-12);
    CHECK(std::abs(s.v1_plus - std::sqrt(1.2)) < 1e-12);
    CHECK(std::abs(s.gauge1 - Complex{std::pow(1.2, -0.25), 0.0}) < 1e-8);

    const BeamReduction red = reduce_to_dirac(m);
    CHECK(red.bvp.profile.permutation() == std::vector<int>{0, 2, 3, 1});
    CHECK(red.bvp.profile.theta() == doctest::Approx(0.5));
    // canonical channel 0 carries -beta1: entry (0,0) is (p1 + h1')/(2 h1)
    for (double x : {0.15, 0.35, 0.8}) {
        const double want = 0.3 / (2.0 * (1.0 + 0.2 * x));
        CHECK(std::abs(red.bvp.Q.entry_eval(0, 0, x) - Complex{want, 0.0}) < 1e-7);
    }

    SUBCASE("equal-speed gauge determinants with varying impedance") {
        TimoshenkoModel em = uniform_beam();
        em.rot_inertia = squared_ramp();
        em.flexural = squared_ramp(); // speeds stay equal, h1 = (1 + 0.2x)^2
        const EqualSpeedSystem sys = equal_speed_system(em);
        CHECK(std::abs(sys.b - 1.0) < 1e-12);
        CHECK(std::abs(sys.scales.h1_ell - 1.44) < 1e-12);
        const Complex detWm =
            sys.w_minus(0, 0) * sys.w_minus(1, 1) - sys.w_minus(0, 1) * sys.w_minus(1, 0);
        const Complex detWp =
            sys.w_plus(0, 0) * sys.w_plus(1, 1) - sys.w_plus(0, 1) * sys.w_plus(1, 0);
        // det W_-+ = (h1(ell)/h1(0))^{-+1/2} for pure impedance variation
        CHECK(std::abs(detWm - Complex{1.0 / 1.2, 0.0}) < 1e-7);
        CHECK(std::abs(detWp - Complex{1.2, 0.0}) < 1e-7);
        CHECK(std::abs(sys.d_plus - sys.scales.j_plus * detWp) < 1e-10);
    }
}

TEST_CASE("spectrum check pairs computed zeros with the model zeros") {
    auto m = stiff_shear_beam();
    m.travel_ratio = std::make_pair(2LL, 1LL);
    const TimSpectrumCheck chk = tim_spectrum_check(m, 8.9, 13.0, 1.3);

    // window holds 3 pi + i ln2/2, 4 pi + i ln2/2, and 3 pi + i ln3
    REQUIRE(chk.predicted.size() == 3);
    CHECK(chk.computed.eigenvalues.size() == 3);
    CHECK(chk.pairing.pairs.size() == 3);
    CHECK(chk.pairing.unmatched_a.empty());
    CHECK(chk.pairing.unmatched_b.empty());
    CHECK_FALSE(chk.pairing.count_mismatch);
    for (const auto& p : chk.pairing.pairs) CHECK(p.deviation < 0.25);

    // model zeros sit exactly on the declared branches
    int on_branch = 0;
    for (const auto& ev : chk.predicted) {
        const Complex z1 = ev.lambda - Complex{0.0, 0.5 * std::log(2.0)};
        const Complex z2 = ev.lambda - Complex{pi, std::log(3.0)};
        if (std::abs(z1.real() / pi - std::round(z1.real() / pi)) < 1e-9 &&
            std::abs(z1.imag()) < 1e-9)
            ++on_branch;
        else if (std::abs(z2.real() / (2.0 * pi) - std::round(z2.real() / (2.0 * pi))) < 1e-9 &&
                 std::abs(z2.imag()) < 1e-9)
            ++on_branch;
    }
    CHECK(on_branch == 3);
}

TEST_CASE("equal-speed spectrum check decays toward the quadratic model") {
    const auto m = uniform_beam();
    const TimSpectrumCheck chk = tim_spectrum_check(m, 2.9, 6.5, 1.2);

    REQUIRE(chk.predicted.size() == 3); // pi, 3 pi/2, 2 pi, all + i ln3/2
    CHECK(chk.pairing.pairs.size() == 3);
    CHECK_FALSE(chk.pairing.count_mismatch);
    for (const auto& p : chk.pairing.pairs) CHECK(p.deviation < 0.1);
    for (const auto& ev : chk.predicted)
        CHECK(std::abs(ev.lambda.imag() - 0.5 * std::log(3.0)) < 1e-9);
}

TEST_CASE("declaration and validation errors") {
    SUBCASE("undeclared speeds block the comparison operations") {
        auto m = stiff_shear_beam();
        m.speeds = SpeedDeclaration::Undeclared;
        CHECK_THROWS_WITH_AS(tim_delta0(m, Complex{0.0, 0.0}),
                             doctest::Contains("SpeedSeparationUnknown"), Error);
        CHECK_THROWS_WITH_AS(tim_spectrum_check(m, 0.0, 1.0, 1.0),
                             doctest::Contains("SpeedSeparationUnknown"), Error);
        CHECK_THROWS_WITH_AS(tim_asymptotic_branches(m),
                             doctest::Contains("RegimeUndetermined"), Error);
    }
    SUBCASE("declarations are checked against the data") {
        auto m = stiff_shear_beam();
        m.speeds = SpeedDeclaration::Equal; // speeds are 2 and 1
        CHECK_THROWS_WITH_AS(beam_scales(m), doctest::Contains("SpeedsNotEqual"), Error);

        auto u = uniform_beam();
        u.speeds = SpeedDeclaration::Separated; // speeds coincide
        CHECK_THROWS_WITH_AS(beam_scales(u), doctest::Contains("SpeedSeparationUnknown"), Error);

        auto sep = stiff_shear_beam();
        CHECK_THROWS_WITH_AS(equal_speed_system(sep), doctest::Contains("SpeedsNotEqual"), Error);
        CHECK_THROWS_WITH_AS(tim_delta0_equal(sep, Complex{0.0, 0.0}),
                             doctest::Contains("SpeedsNotEqual"), Error);
    }
    SUBCASE("material coefficients must be positive") {
        auto m = stiff_shear_beam();
        m.shear = cst(-1.0);
        CHECK_THROWS_WITH_AS(reduce_to_dirac(m), doctest::Contains("BadRepresentation"), Error);
        auto z = stiff_shear_beam();
        z.ell = 0.0;
        CHECK_THROWS_WITH_AS(beam_scales(z), doctest::Contains("BadRepresentation"), Error);
        auto g = stiff_shear_beam();
        g.sample_grid = 4;
        CHECK_THROWS_WITH_AS(beam_scales(g), doctest::Contains("BadRepresentation"), Error);
        auto t = stiff_shear_beam();
        t.travel_ratio = std::make_pair(0LL, 1LL);
        CHECK_THROWS_WITH_AS(beam_scales(t), doctest::Contains("BadRepresentation"), Error);
    }
}
