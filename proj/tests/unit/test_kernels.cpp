#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "diracbvp/error.hpp"
#include "diracbvp/kernels.hpp"
#include "diracbvp/potential.hpp"
#include "diracbvp/weight_profile.hpp"

#include "helpers.hpp"

using namespace diracbvp;
using testutil::cst;
using testutil::cubic;

namespace {

// weights (-1, 1) on [0, 1]
WeightProfile flat_profile() { return build_weight_profile({cst(-1.0), cst(1.0)}, 1.0); }

// smooth symmetric off-diagonal coupling q(x) = 0.2 + 0.15 x - 0.1 x^2
PotentialMatrix coupling_potential() {
    std::vector<ScalarFunction> qe(4);
    qe[1] = cubic(1.0, 0.2, 0.15, -0.1, 0.0);
    qe[2] = cubic(1.0, 0.2, 0.15, -0.1, 0.0);
    return PotentialMatrix::from_entries(2, qe);
}

// weights (-2, -1, 1) on [0, 1]: left extension for column 0, right for column 1
WeightProfile three_profile() {
    return build_weight_profile({cst(-2.0), cst(-1.0), cst(1.0)}, 1.0);
}

PotentialMatrix three_potential() {
    std::vector<ScalarFunction> q3(9);
    auto small = [](double a0, double a1) { return cubic(1.0, a0, a1, 0.05, 0.0); };
    q3[1] = small(0.15, -0.1);
    q3[2] = small(-0.1, 0.2);
    q3[3] = small(0.2, 0.05);
    q3[5] = small(0.1, 0.1);
    q3[6] = small(-0.15, 0.1);
    q3[7] = small(0.05, -0.2);
    return PotentialMatrix::from_entries(3, q3);
}

// weights (-(1 + x/2), 1 + x) on [0, 1]
WeightProfile varying_profile() {
    return build_weight_profile(
        {cubic(1.0, -1.0, -0.5, 0.0, 0.0), cubic(1.0, 1.0, 1.0, 0.0, 0.0)}, 1.0);
}

// reduced coupling Q_{jk}(x) / (beta_j(x) - beta_k(x)): the value the kernel
// must reproduce on the upper edge t = x of its domain
Complex reduced_entry(const WeightProfile& p, const PotentialMatrix& Q, int j, int k, double x) {
    return Q.entry_eval(j, k, x) / Complex(p.beta(j, x) - p.beta(k, x), 0.0);
}

double upper_edge_error(const WeightProfile& p, const PotentialMatrix& Q,
                        const std::vector<KernelGrid>& ks) {
    double err = 0.0;
    const int n = p.n();
    for (int m = 0; m <= 50; ++m) {
        const double x = m / 50.0;
        for (int k = 0; k < n; ++k)
            for (int j = 0; j < n; ++j) {
                if (j == k) continue;
                err = std::max(err, std::abs(ks[static_cast<std::size_t>(k)].eval(j, x, x) -
                                             reduced_entry(p, Q, j, k, x)));
            }
    }
    return err;
}

double envelope(const KernelGrid& kg, int m) {
    const double rate = kg.contraction_rate() * kg.char_span();
    return kg.initial_bound() * std::exp(m * std::log(rate) - std::lgamma(m + 1.0));
}

}  // namespace

TEST_CASE("characteristic maps reduce to straight lines for constant weights") {
    const WeightProfile p = flat_profile();
    const CharacteristicMaps mp = characteristic_maps(p, 0, 1);

    std::mt19937 rng(991);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double x = unif(rng);
        const double t = unif(rng) * x;
        const double a = mp.a(x, t);
        // with beta = (-1, 1): the characteristic through (x, t) is u + v = x + t
        CHECK(std::abs(a - (x + t) / 2) < 1e-12);
        CHECK(std::abs(mp.gamma(x, t, x) - t) < 1e-12);
        // the anchor is the fixed point of the characteristic curve
        CHECK(std::abs(mp.gamma(x, t, a) - a) < 1e-12);
        const double u = a + unif(rng) * (x - a);
        CHECK(std::abs(mp.gamma(x, t, u) - (x + t - u)) < 1e-12);
    }
}

TEST_CASE("characteristic maps satisfy the slope field for varying weights") {
    const WeightProfile p = varying_profile();
    const CharacteristicMaps cross = characteristic_maps(p, 0, 1);
    const CharacteristicMaps same = characteristic_maps(p, 1, 1);

    const double x = 0.8, t = 0.3;
    // dv/du = beta_j(u) / beta_k(v) along v = gamma(x, t, u)
    const double h = 1e-5;
    for (double u : {0.15, 0.4, 0.65}) {
        for (const CharacteristicMaps* mp : {&cross, &same}) {
            const double v = mp->gamma(x, t, u);
            const double slope = (mp->gamma(x, t, u + h) - mp->gamma(x, t, u - h)) / (2 * h);
            const double expect = p.beta(mp->j, u) / p.beta(mp->k, v);
            CHECK(slope == doctest::Approx(expect).epsilon(1e-6));
        }
    }
    // fixed point for the cross pair
    const double a = cross.a(x, t);
    CHECK(std::abs(cross.gamma(x, t, a) - a) < 1e-9);
    // same-index curves are strictly increasing in u
    double prev = same.gamma(x, t, 0.0);
    for (int i = 1; i <= 20; ++i) {
        const double cur = same.gamma(x, t, i * 0.05);
        CHECK(cur > prev);
        prev = cur;
    }
    // identical weights admit no anchor map
    CHECK_THROWS_WITH_AS(same.a(x, t), doctest::Contains("EqualWeights"), Error);
    const WeightProfile rep = build_weight_profile({cst(-1.0), cst(1.0), cst(1.0)}, 1.0);
    CHECK_THROWS_WITH_AS(characteristic_maps(rep, 1, 2).a(0.5, 0.2),
                         doctest::Contains("EqualWeights"), Error);
    CHECK_THROWS_WITH_AS(characteristic_maps(p, 0, 2), doctest::Contains("IndexOutOfRange"),
                         Error);
}

TEST_CASE("zero potential yields the zero kernel after one sweep") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Z(2);
    std::vector<KernelGrid> ks;
    ks.push_back(solve_goursat(p, Z, 0, 64));
    ks.push_back(solve_goursat(p, Z, 1, 64));
    CHECK(ks[0].iterations() == 1);
    for (double x : {0.2, 0.55, 0.9})
        for (double t : {0.0, 0.1}) {
            if (t > x) continue;
            CHECK(std::abs(ks[0].eval(1, x, t)) == 0.0);
            CHECK(std::abs(ks[1].eval(0, x, t)) == 0.0);
        }
    Eigen::VectorXcd A(2);
    A << Complex(1, 0), Complex(1, 0);
    const TransformCheck tc =
        verify_transform(p, Z, A, {Complex(0, 0), Complex(2, 0.3)}, ks, 64);
    CHECK(tc.max_residual < 1e-10);
}

TEST_CASE("first sweep reproduces the anchor values of the integral equation") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Q = coupling_potential();
    // one sweep with an always-satisfied tolerance: kernel equals its inhomogeneous term
    const KernelGrid k1 = solve_goursat(p, Q, 1, 200, 1, 1e300);
    CHECK(k1.iterations() == 1);
    const CharacteristicMaps mp = characteristic_maps(p, 0, 1);
    double err = 0.0;
    for (int m = 1; m <= 40; ++m)
        for (int mm = 0; mm < m; ++mm) {
            const double x = m / 40.0, t = mm / 40.0;
            const double a = mp.a(x, t);   // interior anchors only: a = (x+t)/2 > 0
            err = std::max(err, std::abs(k1.eval(0, x, t) - reduced_entry(p, Q, 0, 1, a)));
        }
    CHECK(err < 2e-6);  // measured 3.3e-7 at this grid
}

TEST_CASE("converged kernel reproduces the reduced potential on the upper edge") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Q = coupling_potential();
    std::vector<KernelGrid> ks;
    ks.push_back(solve_goursat(p, Q, 0, 200));
    ks.push_back(solve_goursat(p, Q, 1, 200));
    // the edge t = x is the boundary of the tabulated domain, where linear
    // interpolation is weakest; measured 7.4e-4 at this grid (halves per refinement)
    CHECK(upper_edge_error(p, Q, ks) < 2.5e-3);

    SUBCASE("sweep-to-sweep changes obey the factorial contraction envelope") {
        for (const KernelGrid& kg : ks) {
            const auto& ch = kg.changes();
            REQUIRE(ch.size() >= 3);
            for (std::size_t m = 0; m < ch.size(); ++m)
                CHECK(ch[m] <= 1.5 * envelope(kg, static_cast<int>(m)) + 1e-13);
        }
    }
}

TEST_CASE("transform verification residual is small and shrinks under joint refinement") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Q = coupling_potential();
    Eigen::VectorXcd A(2);
    A << Complex(1.0, 0.3), Complex(-0.7, 0.1);
    const std::vector<Complex> ls{Complex(0, 0), Complex(1, 0), Complex(0, 1), Complex(3, 0.5),
                                  Complex(0.7, 0)};

    std::vector<double> maxima;
    for (int grid : {100, 200, 400}) {
        std::vector<KernelGrid> ks;
        ks.push_back(solve_goursat(p, Q, 0, grid));
        ks.push_back(solve_goursat(p, Q, 1, grid));
        const TransformCheck tc = verify_transform(p, Q, A, ls, ks, grid);
        REQUIRE(tc.residuals.size() == ls.size());
        if (grid == 200)
            for (double r : tc.residuals) CHECK(r < 2e-5);  // measured max 6.7e-6
        maxima.push_back(tc.max_residual);
    }
    // measured ratios 3.3 and 4.0 per doubling (second-order once the grids resolve
    // the taper of the extended potential)
    CHECK(maxima[0] / maxima[1] > 2.5);
    CHECK(maxima[1] / maxima[2] > 3.0);
}

TEST_CASE("three-channel columns carry left and right domain extensions") {
    const WeightProfile p = three_profile();
    const PotentialMatrix Q = three_potential();
    std::vector<KernelGrid> ks;
    for (int k = 0; k < 3; ++k) ks.push_back(solve_goursat(p, Q, k, 200));

    // column 0 (beta = -2): the slower same-sign channel (beta = -1) forces a left
    // extension down to u = -1 with curved lower boundary t = (u - 1) / 2;
    // column 1 (beta = -1) extends right to u = 2 past the faster channel.
    CHECK(std::abs(ks[0].a_minus() - (-1.0)) < 1e-9);
    CHECK(std::abs(ks[0].a_plus() - 1.0) < 1e-9);
    CHECK(std::abs(ks[0].lower_boundary(0.0) - (-0.5)) < 1e-7);
    CHECK(std::abs(ks[0].lower_boundary(0.5) - (-0.25)) < 1e-7);
    CHECK(std::abs(ks[0].lower_boundary(1.0)) < 1e-7);
    CHECK(std::abs(ks[1].a_minus()) < 1e-9);
    CHECK(std::abs(ks[1].a_plus() - 2.0) < 1e-9);
    CHECK(std::abs(ks[1].lower_boundary(1.5) - 1.0) < 1e-7);
    CHECK(std::abs(ks[2].a_minus()) < 1e-9);
    CHECK(std::abs(ks[2].a_plus() - 1.0) < 1e-9);

    CHECK(upper_edge_error(p, Q, ks) < 2e-2);  // measured 5.7e-3

    SUBCASE("characteristic segments stay inside the stored domains") {
        for (int k = 0; k < 3; ++k) {
            const KernelGrid& kg = ks[static_cast<std::size_t>(k)];
            for (int j = 0; j < 3; ++j) {
                if (j == k) continue;
                const CharacteristicMaps mp = characteristic_maps(p, j, k);
                for (double x : {0.3, 0.7, 1.0})
                    for (double frac : {0.0, 0.4, 0.9}) {
                        const double t = frac * x;
                        const double a = mp.a(x, t);
                        for (int s = 0; s <= 20; ++s) {
                            const double u = a + (x - a) * s / 20.0;
                            CHECK(kg.contains(u, mp.gamma(x, t, u), 1e-7));
                        }
                    }
            }
        }
    }

    SUBCASE("transform verification across a left- and right-extended system") {
        Eigen::VectorXcd A(3);
        A << Complex(1, 0), Complex(0.8, -0.2), Complex(-0.5, 0.4);
        const std::vector<Complex> ls{Complex(0, 0), Complex(1, 0), Complex(0, 1)};
        const TransformCheck tc = verify_transform(p, Q, A, ls, ks, 200);
        for (double r : tc.residuals) CHECK(r < 5e-4);  // measured max 1.3e-4
    }

    SUBCASE("eval_column stacks the per-row values and samples stay in domain") {
        const Eigen::VectorXcd col = ks[0].eval_column(0.6, 0.2);
        REQUIRE(col.size() == 3);
        for (int j = 0; j < 3; ++j) CHECK(col[j] == ks[0].eval(j, 0.6, 0.2));
        const auto pts = ks[0].samples(16);
        CHECK(!pts.empty());
        for (const auto& s : pts) CHECK(ks[0].contains(s.x, s.t, 1e-6));
    }
}

TEST_CASE("transform verification with genuinely varying weights") {
    const WeightProfile p = varying_profile();
    const PotentialMatrix Q = coupling_potential();
    std::vector<KernelGrid> ks;
    ks.push_back(solve_goursat(p, Q, 0, 200));
    ks.push_back(solve_goursat(p, Q, 1, 200));
    CHECK(upper_edge_error(p, Q, ks) < 4e-3);  // measured 1.0e-3
    Eigen::VectorXcd A(2);
    A << Complex(1.0, 0.0), Complex(0.5, 0.5);
    const TransformCheck tc =
        verify_transform(p, Q, A, {Complex(0, 0), Complex(1, 0), Complex(0, 1)}, ks, 200);
    for (double r : tc.residuals) CHECK(r < 5e-5);  // measured max 8.9e-6
}

TEST_CASE("goursat solver input validation") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Q = coupling_potential();
    CHECK_THROWS_WITH_AS(solve_goursat(p, Q, -1, 64), doctest::Contains("IndexOutOfRange"),
                         Error);
    CHECK_THROWS_WITH_AS(solve_goursat(p, Q, 2, 64), doctest::Contains("IndexOutOfRange"),
                         Error);
    CHECK_THROWS_WITH_AS(solve_goursat(p, PotentialMatrix(3), 0, 64),
                         doctest::Contains("OrderMismatch"), Error);
    CHECK_THROWS_WITH_AS(solve_goursat(p, Q, 0, 4), doctest::Contains("BadRepresentation"),
                         Error);
    CHECK_THROWS_WITH_AS(solve_goursat(p, Q, 0, 64, 1, 1e-12),
                         doctest::Contains("NoConvergence"), Error);

    // couplings inside a block of identical weights are rejected
    const WeightProfile rep = build_weight_profile({cst(-1.0), cst(1.0), cst(1.0)}, 1.0);
    std::vector<ScalarFunction> bad(9);
    bad[5] = cst(0.3);  // entry (1,2): both weights equal +1
    CHECK_THROWS_WITH_AS(solve_goursat(rep, PotentialMatrix::from_entries(3, bad), 0, 64),
                         doctest::Contains("BlockDiagonalityViolated"), Error);
}

TEST_CASE("transform verification input validation") {
    const WeightProfile p = flat_profile();
    const PotentialMatrix Q = coupling_potential();
    std::vector<KernelGrid> ks;
    ks.push_back(solve_goursat(p, Q, 0, 64));
    ks.push_back(solve_goursat(p, Q, 1, 64));
    Eigen::VectorXcd A(2);
    A << Complex(1, 0), Complex(1, 0);
    const std::vector<Complex> ls{Complex(0, 0)};

    std::vector<KernelGrid> one;
    one.push_back(solve_goursat(p, Q, 0, 64));
    CHECK_THROWS_WITH_AS(verify_transform(p, Q, A, ls, one, 64),
                         doctest::Contains("KernelMissing"), Error);
    std::vector<KernelGrid> wrong;
    wrong.push_back(solve_goursat(p, Q, 0, 64));
    wrong.push_back(solve_goursat(p, Q, 0, 64));  // column 0 twice
    CHECK_THROWS_WITH_AS(verify_transform(p, Q, A, ls, wrong, 64),
                         doctest::Contains("KernelMissing"), Error);

    Eigen::VectorXcd zeroA(2);
    zeroA << Complex(1, 0), Complex(0, 0);
    CHECK_THROWS_WITH_AS(verify_transform(p, Q, zeroA, ls, ks, 64),
                         doctest::Contains("BadRepresentation"), Error);
    CHECK_THROWS_WITH_AS(verify_transform(p, Q, A, {}, ks, 64),
                         doctest::Contains("BadRepresentation"), Error);
    Eigen::VectorXcd longA(3);
    longA << Complex(1, 0), Complex(1, 0), Complex(1, 0);
    CHECK_THROWS_WITH_AS(verify_transform(p, Q, longA, ls, ks, 64),
                         doctest::Contains("BadRepresentation"), Error);

    // repeated weights: the stacked-exponential comparison needs n distinct channels
    const WeightProfile rep = build_weight_profile({cst(-1.0), cst(1.0), cst(1.0)}, 1.0);
    std::vector<ScalarFunction> q3(9);
    q3[1] = cst(0.2);
    q3[3] = cst(0.2);  // couples the two blocks only
    const PotentialMatrix Q3 = PotentialMatrix::from_entries(3, q3);
    std::vector<KernelGrid> ks3;
    for (int k = 0; k < 3; ++k) ks3.push_back(solve_goursat(rep, Q3, k, 32));
    Eigen::VectorXcd A3(3);
    A3 << Complex(1, 0), Complex(1, 0), Complex(1, 0);
    CHECK_THROWS_WITH_AS(verify_transform(rep, Q3, A3, ls, ks3, 32),
                         doctest::Contains("SimpleSpectrumRequired"), Error);
}
