#include <doctest.h>

#include <cmath>
#include <random>

#include "diracbvp/error.hpp"
#include "diracbvp/fundamental.hpp"
#include "diracbvp/lifted.hpp"
#include "helpers.hpp"

using namespace diracbvp;
using testutil::cst;

namespace {
const Complex I1(0.0, 1.0);

DiracBVP free_two_channel() {
    return testutil::two_channel(PotentialMatrix(2), testutil::dirichlet_C(),
                                 testutil::dirichlet_D());
}
} // namespace

TEST_CASE("free propagation is the diagonal exponential") {
    auto bvp = free_two_channel();

    auto id = solve_fundamental(bvp, Complex(0.0, 0.0));
    for (const auto& v : id.values)
        CHECK((v - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

    // rho_1 = -x, rho_2 = x: at lambda = pi both channels reach -1
    auto at_pi = fundamental_at_ell(bvp, Complex(M_PI, 0.0), 1e-12);
    CHECK(std::abs(at_pi(0, 0) - Complex(-1.0, 0.0)) < 1e-10);
    CHECK(std::abs(at_pi(1, 1) - Complex(-1.0, 0.0)) < 1e-10);
    CHECK(std::abs(at_pi(0, 1)) < 1e-12);

    auto u = unperturbed_fundamental(bvp.profile, Complex(M_PI, 0.0), 1.0);
    CHECK((at_pi - u).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("unperturbed matrix matches hand exponentials") {
    auto bvp = free_two_channel();
    auto u = unperturbed_fundamental(bvp.profile, Complex(0.0, 1.0), 1.0);
    CHECK(std::abs(u(0, 0) - std::exp(Complex(1.0, 0.0))) < 1e-13);  // e^{i i (-1)} = e
    CHECK(std::abs(u(1, 1) - std::exp(Complex(-1.0, 0.0))) < 1e-13); // e^{-1}
    CHECK(unperturbed_fundamental(bvp.profile, Complex(0.0, 0.0), 0.4)
              .isApprox(Eigen::MatrixXcd::Identity(2, 2)));
    CHECK_THROWS_AS(unperturbed_fundamental(bvp.profile, Complex(1.0, 0.0), 1.5), Error);

    auto slanted = assemble_bvp(
        {cst(-1.0),
         ScalarFunction::piecewise_polynomial({0.0, 1.0}, {{Complex(1.0), Complex(-0.5)}})},
        PotentialMatrix(2), testutil::dirichlet_C(), testutil::dirichlet_D(), 1.0);
    auto v = unperturbed_fundamental(slanted.profile, Complex(2.0, 0.0), 1.0);
    CHECK(std::abs(v(1, 1) - std::exp(Complex(0.0, 1.5))) < 1e-13); // rho_2(1) = 3/4
}

TEST_CASE("coupled channels preserve the Liouville determinant") {
    PotentialMatrix q(2);
    q.set_entry(0, 1, cst(1.0));
    q.set_entry(1, 0, cst(1.0));
    auto bvp = testutil::two_channel(std::move(q), testutil::dirichlet_C(), testutil::dirichlet_D());

    auto traj = solve_fundamental(bvp, Complex(1.0, 0.0), 64, 1e-12);
    CHECK(std::abs(traj.dets.back() - Complex(1.0, 0.0)) < 1e-9);
    CHECK(liouville_residual(traj, bvp) < 1e-9);
}

TEST_CASE("Liouville residual stays small for random couplings in the strip") {
    std::mt19937 rng(81);
    for (int trial = 0; trial < 4; ++trial) {
        auto bvp = testutil::two_channel(testutil::random_offdiag_potential(2, 1.0, rng),
                                         testutil::dirichlet_C(), testutil::dirichlet_D());
        std::uniform_real_distribution<double> ur(-10.0, 10.0), ui(-2.0, 2.0);
        auto traj = solve_fundamental(bvp, Complex(ur(rng), ui(rng)), 64, 1e-12);
        CHECK(liouville_residual(traj, bvp) < 1e-8);
    }
}

TEST_CASE("diagonal potential decays both channels, trace enters the determinant") {
    PotentialMatrix q(2);
    q.set_entry(0, 0, cst(1.0));
    q.set_entry(1, 1, cst(1.0));
    auto bvp = testutil::two_channel(std::move(q), testutil::dirichlet_C(), testutil::dirichlet_D());
    auto traj = solve_fundamental(bvp, Complex(0.0, 0.0), 64, 1e-12);
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        double x = traj.grid[i];
        CHECK(std::abs(traj.values[i](0, 0) - std::exp(Complex(-x, 0.0))) < 1e-10);
        CHECK(std::abs(traj.dets[i] - std::exp(Complex(-2.0 * x, 0.0))) < 1e-10);
    }
    CHECK(liouville_residual(traj, bvp) < 1e-9);
}

TEST_CASE("trajectory endpoints and grid structure") {
    PotentialMatrix q(2);
    // piecewise entry forces its breakpoint into the grid
    q.set_entry(0, 1, ScalarFunction::piecewise_polynomial(
                          {0.0, 0.3, 1.0}, {{Complex(1.0)}, {Complex(-1.0)}}));
    auto bvp = testutil::two_channel(std::move(q), testutil::dirichlet_C(), testutil::dirichlet_D());
    auto traj = solve_fundamental(bvp, Complex(2.0, 0.5), 64);
    CHECK(traj.grid.front() == 0.0);
    CHECK(traj.grid.back() == 1.0);
    CHECK((traj.values.front() - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() == 0.0);
    bool has_break = false;
    for (double x : traj.grid) has_break = has_break || x == doctest::Approx(0.3).epsilon(1e-14);
    CHECK(has_break);
    for (Complex d : traj.dets) CHECK(std::abs(d) > 1e-6);
}

TEST_CASE("propagation over subintervals composes") {
    std::mt19937 rng(82);
    auto bvp = testutil::two_channel(testutil::random_offdiag_potential(2, 1.0, rng),
                                     testutil::dirichlet_C(), testutil::dirichlet_D());
    Complex lambda(3.0, -0.7);
    auto traj = solve_fundamental(bvp, lambda, 64, 1e-12);

    double x1 = traj.grid[20], x2 = traj.grid[45];
    Eigen::MatrixXcd transfer = Eigen::MatrixXcd::Identity(2, 2);
    propagate_fundamental(bvp, lambda, transfer, x1, x2, 1e-12);
    Eigen::MatrixXcd composed = transfer * traj.values[20];
    CHECK((composed - traj.values[45]).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("analyticity in lambda: Cauchy reproduction on a circle") {
    std::mt19937 rng(83);
    auto bvp = testutil::two_channel(testutil::random_offdiag_potential(2, 1.0, rng),
                                     testutil::dirichlet_C(), testutil::dirichlet_D());
    Complex center(1.2, 0.3);
    double radius = 0.8;
    int nodes = 64;
    Eigen::MatrixXcd mean = Eigen::MatrixXcd::Zero(2, 2);
    for (int i = 0; i < nodes; ++i) {
        double t = 2.0 * M_PI * double(i) / double(nodes);
        mean += fundamental_at_ell(bvp, center + radius * std::exp(I1 * t), 1e-12);
    }
    mean /= double(nodes);
    Eigen::MatrixXcd direct = fundamental_at_ell(bvp, center, 1e-12);
    CHECK((mean - direct).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("derivative in lambda matches central differences") {
    std::mt19937 rng(84);
    auto bvp = testutil::two_channel(testutil::random_offdiag_potential(2, 1.0, rng),
                                     testutil::dirichlet_C(), testutil::dirichlet_D());
    Complex lambda(0.9, 0.2);
    auto [phi, dphi] = fundamental_with_dlambda(bvp, lambda, 1e-12);
    CHECK((phi - fundamental_at_ell(bvp, lambda, 1e-12)).cwiseAbs().maxCoeff() < 1e-10);

    double h = 1e-5;
    Eigen::MatrixXcd fd = (fundamental_at_ell(bvp, lambda + h, 1e-12) -
                           fundamental_at_ell(bvp, lambda - h, 1e-12)) /
                          (2.0 * h);
    CHECK((dphi - fd).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("rescaled trajectory differs by the reference exponential") {
    auto bvp = free_two_channel();
    Complex lambda(2.0, 1.5);
    auto plain = solve_fundamental(bvp, lambda, 32, 1e-12);
    auto scaled = solve_fundamental_rescaled(bvp, lambda, 1, 32, 1e-12);
    for (std::size_t i = 0; i < plain.grid.size(); ++i) {
        Complex factor = std::exp(-I1 * lambda * bvp.profile.rho(1, plain.grid[i]));
        CHECK((scaled.values[i] - factor * plain.values[i]).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("overflow guard refuses exploding strips") {
    auto bvp = free_two_channel();
    CHECK_THROWS_WITH_AS((void)solve_fundamental(bvp, Complex(0.0, 400.0)),
                         doctest::Contains("NonFiniteValue"), Error);
}

TEST_CASE("lifted weights add per tuple and the minor system reproduces minors") {
    std::mt19937 rng(85);
    auto Q = testutil::random_offdiag_potential(3, 1.0, rng);
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Identity(3, 3);
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Identity(3, 3);
    auto bvp = assemble_bvp({cst(-1.0), cst(1.0), cst(2.0)}, std::move(Q), C, D, 1.0);

    auto sys = build_lifted_system(bvp, 2);
    REQUIRE(sys.dim == 3);
    Eigen::VectorXd lb = sys.lifted_beta(0.5);
    CHECK(lb(0) == doctest::Approx(0.0)); // (0,1): -1+1
    CHECK(lb(1) == doctest::Approx(1.0)); // (0,2): -1+2
    CHECK(lb(2) == doctest::Approx(3.0)); // (1,2): 1+2

    for (Complex lambda : {Complex(0.7, 0.1), Complex(-2.0, -0.4)}) {
        auto minors = lifted_minors_at_ell(sys, lambda, 1e-12);
        auto traj = solve_fundamental(bvp, lambda, 64, 1e-12);
        for (int qi = 0; qi < sys.dim; ++qi)
            for (int pi = 0; pi < sys.dim; ++pi) {
                Complex direct = minor_of_fundamental(traj, sys.tuples[qi], sys.tuples[pi]);
                CHECK(std::abs(minors(qi, pi) - direct) <
                      1e-8 * (1.0 + std::abs(direct)));
            }
    }
}

TEST_CASE("lifted system at extreme orders") {
    std::mt19937 rng(86);
    auto Q = testutil::random_offdiag_potential(3, 1.0, rng);
    auto bvp = assemble_bvp({cst(-1.0), cst(1.0), cst(2.0)}, std::move(Q),
                            Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(3, 3),
                            1.0);

    // m = n: scalar Liouville system with no coupling left
    auto top = build_lifted_system(bvp, 3);
    CHECK(top.dim == 1);
    CHECK(top.links.empty());
    CHECK(top.lifted_beta(0.3)(0) == doctest::Approx(2.0));
    auto det_via_lift = lifted_minors_at_ell(top, Complex(1.3, 0.2), 1e-12)(0, 0);
    Complex expected = std::exp(I1 * Complex(1.3, 0.2) * 2.0); // sum of b_k = 2
    CHECK(std::abs(det_via_lift - expected) < 1e-9);

    // m = 1: the original system
    auto base = build_lifted_system(bvp, 1);
    CHECK(base.dim == 3);
    Eigen::MatrixXcd lq = base.lifted_Q(0.4);
    CHECK((lq - bvp.Q.eval(0.4)).cwiseAbs().maxCoeff() < 1e-14);
    auto sol = lifted_minors_at_ell(base, Complex(0.5, 0.0), 1e-12);
    auto traj = solve_fundamental(bvp, Complex(0.5, 0.0), 64, 1e-12);
    CHECK((sol - traj.at_ell()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("lifted construction enforces block-diagonal zeros") {
    PotentialMatrix q(3);
    q.set_entry(0, 1, cst(1.0)); // inside the equal-weight block {0,1}
    auto bvp = assemble_bvp({cst(1.0), cst(1.0), cst(2.0)}, std::move(q),
                            Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(3, 3),
                            1.0);
    CHECK_THROWS_WITH_AS((void)build_lifted_system(bvp, 2),
                         doctest::Contains("BlockDiagonalityViolated"), Error);
}

TEST_CASE("lifted potential inherits zero-block-diagonality") {
    std::mt19937 rng(87);
    // weights with an equal block: {1, 1, 2}; coupling only across blocks
    PotentialMatrix q(3);
    auto rnd = [&] {
        std::uniform_real_distribution<double> u(-0.5, 0.5);
        return testutil::cubic(1.0, Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                               Complex(u(rng), u(rng)), Complex(u(rng), u(rng)));
    };
    q.set_entry(0, 2, rnd());
    q.set_entry(2, 0, rnd());
    q.set_entry(1, 2, rnd());
    q.set_entry(2, 1, rnd());
    auto bvp = assemble_bvp({cst(1.0), cst(1.0), cst(2.0)}, std::move(q),
                            Eigen::MatrixXcd::Identity(3, 3), Eigen::MatrixXcd::Identity(3, 3),
                            1.0);
    auto sys = build_lifted_system(bvp, 2);
    for (int qi = 0; qi < sys.dim; ++qi)
        for (int ri = 0; ri < sys.dim; ++ri)
            if (sys.lifted_beta_equiv(qi, ri)) {
                for (double x : {0.1, 0.5, 0.9})
                    CHECK(std::abs(sys.lifted_Q(x)(qi, ri)) == 0.0);
            }
}

TEST_CASE("minor_of_fundamental validates its index tuples") {
    auto bvp = free_two_channel();
    auto traj = solve_fundamental(bvp, Complex(1.0, 0.0));
    CHECK(std::abs(minor_of_fundamental(traj, {0, 1}, {0, 1}) - traj.dets.back()) < 1e-12);
    CHECK_THROWS_AS((void)minor_of_fundamental(traj, {0}, {0, 1}), Error);
    CHECK_THROWS_AS((void)minor_of_fundamental(traj, {1, 0}, {0, 1}), Error);
    CHECK_THROWS_AS((void)minor_of_fundamental(traj, {0, 2}, {0, 1}), Error);
}
