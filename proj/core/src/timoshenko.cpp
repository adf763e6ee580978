#include "diracbvp/timoshenko.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "diracbvp/classify.hpp"
#include "diracbvp/error.hpp"
#include "diracbvp/exppoly.hpp"
#include "diracbvp/ode.hpp"

namespace diracbvp {
namespace {

// relative tolerance for confirming a declared equal-speed relation
constexpr double kSpeedEqualTol = 1e-9;
// relative floor below which a declared speed separation is rejected
constexpr double kSpeedSeparatedTol = 1e-12;
// relative tolerance for detecting vanishing middle coefficients
constexpr double kAlignedTol = 1e-12;
// relative root gap below which a separation verdict is abstained from
constexpr double kRootGapAbstain = 1e-9;
// relative consistency required of a declared travel-time ratio
constexpr double kTravelRatioTol = 1e-9;

double real_at(const ScalarFunction& f, double x) { return f.eval(x).real(); }

// One-sided derivatives continue constantly outside the domain, so clamp the
// right endpoint slightly inward to read the last interior slope.
Complex deriv_at(const ScalarFunction& f, double x, double ell) {
    return f.derivative(std::min(x, ell * (1.0 - 1e-12)));
}

std::vector<double> coefficient_nodes(const TimoshenkoModel& m) {
    const int g = m.sample_grid;
    std::vector<double> nodes(static_cast<std::size_t>(g) + 1);
    for (int i = 0; i <= g; ++i) nodes[static_cast<std::size_t>(i)] = m.ell * i / g;
    return nodes;
}

void validate_model(const TimoshenkoModel& m) {
    if (!(m.ell > 0.0) || !std::isfinite(m.ell))
        fail("BadRepresentation", "beam length must be positive and finite");
    if (m.sample_grid < 16) fail("BadRepresentation", "sample_grid must be at least 16");
    for (Complex z : {m.alpha1, m.alpha2, m.gamma1, m.gamma2})
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            fail("BadRepresentation", "boundary feedback coefficients must be finite");
    const ScalarFunction* coeffs[] = {&m.density, &m.rot_inertia, &m.shear, &m.flexural};
    const char* names[] = {"density", "rot_inertia", "shear", "flexural"};
    const auto nodes = coefficient_nodes(m);
    for (int c = 0; c < 4; ++c) {
        auto points = nodes;
        for (double b : coeffs[c]->interior_breakpoints(0.0, m.ell)) points.push_back(b);
        for (double x : points) {
            const Complex v = coeffs[c]->eval(x);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || v.real() <= 0.0 ||
                std::abs(v.imag()) > 1e-12 * (1.0 + std::abs(v.real())))
                fail("BadRepresentation",
                     std::string(names[c]) + " must be positive and real on [0, ell]");
        }
    }
    if (m.travel_ratio) {
        if (m.travel_ratio->first <= 0 || m.travel_ratio->second <= 0)
            fail("BadRepresentation", "travel_ratio multipliers must be positive integers");
    }
}

// Confirms the declared relation between the squared wave speeds
// shear/density and flexural/rot_inertia on the sample grid.
void verify_speed_declaration(const TimoshenkoModel& m) {
    if (m.speeds == SpeedDeclaration::Undeclared) return;
    const auto nodes = coefficient_nodes(m);
    double max_diff = 0.0, max_speed = 0.0;
    double min_abs = std::numeric_limits<double>::infinity();
    int sign = 0;
    bool sign_definite = true;
    for (double x : nodes) {
        const double s1 = real_at(m.flexural, x) / real_at(m.rot_inertia, x);
        const double s2 = real_at(m.shear, x) / real_at(m.density, x);
        const double nu = s2 - s1;
        max_diff = std::max(max_diff, std::abs(nu));
        max_speed = std::max({max_speed, s1, s2});
        min_abs = std::min(min_abs, std::abs(nu));
        const int s = nu > 0.0 ? 1 : (nu < 0.0 ? -1 : 0);
        if (s == 0)
            sign_definite = false;
        else if (sign == 0)
            sign = s;
        else if (s != sign)
            sign_definite = false;
    }
    if (m.speeds == SpeedDeclaration::Equal) {
        if (max_diff > kSpeedEqualTol * max_speed)
            fail("SpeedsNotEqual",
                 "declared equal wave speeds differ on the sample grid beyond tolerance");
    } else { // Separated
        if (!sign_definite || min_abs <= kSpeedSeparatedTol * max_speed)
            fail("SpeedSeparationUnknown",
                 "declared separated wave speeds touch or cross on the sample grid");
    }
}

// Wave slownesses, impedances, and the potential building blocks
//   q_k^{+-} = (damping_k +- h_k') / (2 h_k),   r12 = h2 / (2 h1),
//   g_k = damping_k / (2 h_k).
// Constant stiffness/inertia data keeps exact representations (the dampings
// enter linearly and keep their own kind); otherwise everything is tabulated
// on the sample grid. Under an equal-speed declaration both slownesses share
// one representation so that the channels form structural blocks.
struct DerivedBeam {
    ScalarFunction beta1, beta2;
    ScalarFunction h1, h2;
    ScalarFunction q1p, q1m, q2p, q2m;
    ScalarFunction r12;
    ScalarFunction g1, g2;
};

DerivedBeam derive_beam(const TimoshenkoModel& m) {
    DerivedBeam d;
    const bool all_const = m.density.kind() == ScalarFunction::Kind::Constant &&
                           m.rot_inertia.kind() == ScalarFunction::Kind::Constant &&
                           m.shear.kind() == ScalarFunction::Kind::Constant &&
                           m.flexural.kind() == ScalarFunction::Kind::Constant;
    if (all_const) {
        const double rho = real_at(m.density, 0.0);
        const double irho = real_at(m.rot_inertia, 0.0);
        const double shear = real_at(m.shear, 0.0);
        const double flex = real_at(m.flexural, 0.0);
        const double h1 = std::sqrt(flex * irho);
        const double h2 = std::sqrt(shear * rho);
        d.beta2 = ScalarFunction::constant(std::sqrt(rho / shear));
        d.beta1 = m.speeds == SpeedDeclaration::Equal
                      ? d.beta2
                      : ScalarFunction::constant(std::sqrt(irho / flex));
        d.h1 = ScalarFunction::constant(h1);
        d.h2 = ScalarFunction::constant(h2);
        d.q1p = d.q1m = d.g1 = m.damping1.scaled(1.0 / (2.0 * h1));
        d.q2p = d.q2m = d.g2 = m.damping2.scaled(1.0 / (2.0 * h2));
        d.r12 = ScalarFunction::constant(h2 / (2.0 * h1));
        return d;
    }
    const auto nodes = coefficient_nodes(m);
    const std::size_t n = nodes.size();
    std::vector<Complex> b1(n), b2(n), h1(n), h2(n), q1p(n), q1m(n), q2p(n), q2m(n), r12(n),
        g1(n), g2(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double x = nodes[i];
        const double rho = real_at(m.density, x);
        const double irho = real_at(m.rot_inertia, x);
        const double shear = real_at(m.shear, x);
        const double flex = real_at(m.flexural, x);
        const double h1v = std::sqrt(flex * irho);
        const double h2v = std::sqrt(shear * rho);
        const double h1d = (deriv_at(m.flexural, x, m.ell).real() * irho +
                            flex * deriv_at(m.rot_inertia, x, m.ell).real()) /
                           (2.0 * h1v);
        const double h2d = (deriv_at(m.shear, x, m.ell).real() * rho +
                            shear * deriv_at(m.density, x, m.ell).real()) /
                           (2.0 * h2v);
        const Complex p1 = m.damping1.eval(x);
        const Complex p2 = m.damping2.eval(x);
        b1[i] = std::sqrt(irho / flex);
        b2[i] = std::sqrt(rho / shear);
        h1[i] = h1v;
        h2[i] = h2v;
        q1p[i] = (p1 + h1d) / (2.0 * h1v);
        q1m[i] = (p1 - h1d) / (2.0 * h1v);
        q2p[i] = (p2 + h2d) / (2.0 * h2v);
        q2m[i] = (p2 - h2d) / (2.0 * h2v);
        r12[i] = h2v / (2.0 * h1v);
        g1[i] = p1 / (2.0 * h1v);
        g2[i] = p2 / (2.0 * h2v);
    }
    d.beta2 = ScalarFunction::tabulated(nodes, std::move(b2));
    d.beta1 = m.speeds == SpeedDeclaration::Equal
                  ? d.beta2
                  : ScalarFunction::tabulated(nodes, std::move(b1));
    d.h1 = ScalarFunction::tabulated(nodes, std::move(h1));
    d.h2 = ScalarFunction::tabulated(nodes, std::move(h2));
    d.q1p = ScalarFunction::tabulated(nodes, std::move(q1p));
    d.q1m = ScalarFunction::tabulated(nodes, std::move(q1m));
    d.q2p = ScalarFunction::tabulated(nodes, std::move(q2p));
    d.q2m = ScalarFunction::tabulated(nodes, std::move(q2m));
    d.r12 = ScalarFunction::tabulated(nodes, std::move(r12));
    d.g1 = ScalarFunction::tabulated(nodes, std::move(g1));
    d.g2 = ScalarFunction::tabulated(nodes, std::move(g2));
    return d;
}

BeamScales scales_from(const TimoshenkoModel& m, const DerivedBeam& d) {
    BeamScales s;
    s.b1 = d.beta1.primitive(m.ell).real();
    s.b2 = d.beta2.primitive(m.ell).real();
    s.h1_0 = real_at(d.h1, 0.0);
    s.h1_ell = real_at(d.h1, m.ell);
    s.h2_0 = real_at(d.h2, 0.0);
    s.h2_ell = real_at(d.h2, m.ell);
    s.alpha1_plus = m.alpha1 + s.h1_ell;
    s.alpha1_minus = m.alpha1 - s.h1_ell;
    s.alpha2_plus = m.alpha2 + s.h2_ell;
    s.alpha2_minus = m.alpha2 - s.h2_ell;
    s.v1_plus = std::sqrt(s.h1_ell / s.h1_0);
    s.v1_minus = 1.0 / s.v1_plus;
    s.v2_plus = std::sqrt(s.h2_ell / s.h2_0);
    s.v2_minus = 1.0 / s.v2_plus;
    s.gauge1 = std::exp(-d.g1.primitive(m.ell));
    s.gauge2 = std::exp(-d.g2.primitive(m.ell));
    const Complex gg = m.gamma1 * m.gamma2;
    s.j_plus = s.alpha1_plus * s.alpha2_plus - gg;
    s.j_minus = s.alpha1_minus * s.alpha2_minus - gg;
    s.regular = s.j_plus != Complex{0.0, 0.0} && s.j_minus != Complex{0.0, 0.0};
    return s;
}

// Coefficients of the four-term comparison polynomial, exponents
// (b1+b2, -(b1+b2), b1-b2, b2-b1) in this order.
struct FourTerm {
    Complex a_pp, a_mm, a_pm, a_mp;
};

FourTerm four_term(const TimoshenkoModel& m, const BeamScales& s) {
    const Complex gg = m.gamma1 * m.gamma2;
    FourTerm f;
    f.a_pp = (s.alpha1_plus * s.alpha2_plus - gg) * (s.v1_plus * s.v2_plus);
    f.a_mm = (s.alpha1_minus * s.alpha2_minus - gg) * (s.v1_minus * s.v2_minus);
    f.a_pm = (s.alpha1_plus * s.alpha2_minus - gg) * (s.v1_plus * s.v2_minus);
    f.a_mp = (s.alpha1_minus * s.alpha2_plus - gg) * (s.v1_minus * s.v2_plus);
    return f;
}

void check_travel_ratio(const TimoshenkoModel& m, const BeamScales& s) {
    const double u1 = s.b1 / static_cast<double>(m.travel_ratio->first);
    const double u2 = s.b2 / static_cast<double>(m.travel_ratio->second);
    if (std::abs(u1 - u2) > kTravelRatioTol * std::max(u1, u2))
        fail("NotCommensurable",
             "declared travel-time ratio disagrees with the computed travel times");
}

// All roots of sum_k coeff[k] z^k via the companion matrix of the monic form.
std::vector<Complex> polynomial_roots(const std::vector<Complex>& coeff) {
    const int n = static_cast<int>(coeff.size()) - 1;
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -coeff[static_cast<std::size_t>(i)] / coeff[static_cast<std::size_t>(n)];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<Complex> roots(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) roots[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    return roots;
}

double min_pairwise_gap(const std::vector<Complex>& roots) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < roots.size(); ++i)
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            gap = std::min(gap, std::abs(roots[i] - roots[j]));
    return gap;
}

double max_root_abs(const std::vector<Complex>& roots) {
    double m = 0.0;
    for (Complex z : roots) m = std::max(m, std::abs(z));
    return m;
}

SeparationVerdict gap_verdict(double gap, double scale, std::string& note) {
    if (gap >= kRootGapAbstain * scale) return SeparationVerdict::Separated;
    note += " root gap below the abstention threshold; separation undecided.";
    return SeparationVerdict::Undecidable;
}

bool aligned_boundary(const TimoshenkoModel& m, const BeamScales& s) {
    const Complex gg = m.gamma1 * m.gamma2;
    if (gg == Complex{0.0, 0.0}) return false;
    const double scale = std::abs(s.alpha1_plus) * std::abs(s.alpha2_minus) +
                         std::abs(s.alpha1_minus) * std::abs(s.alpha2_plus) + std::abs(gg);
    return std::abs(s.alpha1_plus * s.alpha2_minus - gg) <= kAlignedTol * scale &&
           std::abs(s.alpha1_minus * s.alpha2_plus - gg) <= kAlignedTol * scale;
}

std::vector<Eigenvalue> to_eigenvalues(const std::vector<LocatedZero>& zs) {
    std::vector<Eigenvalue> out;
    out.reserve(zs.size());
    for (const auto& z : zs) out.push_back(Eigenvalue{z.lambda, z.multiplicity, z.residual});
    return out;
}

} // namespace

BeamScales beam_scales(const TimoshenkoModel& model) {
    validate_model(model);
    verify_speed_declaration(model);
    return scales_from(model, derive_beam(model));
}

BeamReduction reduce_to_dirac(const TimoshenkoModel& model) {
    validate_model(model);
    verify_speed_declaration(model);
    const DerivedBeam d = derive_beam(model);
    BeamScales s = scales_from(model, d);

    std::vector<ScalarFunction> weights = {d.beta1.scaled(-1.0), d.beta1, d.beta2.scaled(-1.0),
                                           d.beta2};
    const ScalarFunction half = ScalarFunction::constant(0.5);
    const ScalarFunction minus_half = ScalarFunction::constant(-0.5);
    const ScalarFunction minus_r12 = d.r12.scaled(-1.0);
    PotentialMatrix q = PotentialMatrix::from_entries(
        4, {d.q1p, d.q1m, d.r12, minus_r12,     //
            d.q1p, d.q1m, d.r12, minus_r12,     //
            minus_half, minus_half, d.q2p, d.q2m, //
            half, half, d.q2p, d.q2m});

    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(4, 4);
    c(0, 0) = c(0, 1) = 1.0;
    c(2, 2) = c(2, 3) = 1.0;
    Eigen::MatrixXcd dd = Eigen::MatrixXcd::Zero(4, 4);
    dd(1, 0) = s.alpha1_minus;
    dd(1, 1) = s.alpha1_plus;
    dd(1, 2) = dd(1, 3) = model.gamma1;
    dd(3, 0) = dd(3, 1) = model.gamma2;
    dd(3, 2) = s.alpha2_minus;
    dd(3, 3) = s.alpha2_plus;

    BeamReduction red{assemble_bvp(std::move(weights), std::move(q), std::move(c), std::move(dd),
                                   model.ell, std::max(2048, model.sample_grid)),
                      s};

    if (model.travel_ratio) {
        check_travel_ratio(model, s);
        const double unit = (s.b1 + s.b2) / static_cast<double>(model.travel_ratio->first +
                                                                model.travel_ratio->second);
        DiracBVP::Commensurable decl{unit, {}};
        for (int k = 0; k < 4; ++k)
            decl.multipliers.push_back(std::llround(red.bvp.profile.b(k) / unit));
        red.bvp.commensurable = decl;
    } else if (model.speeds == SpeedDeclaration::Equal) {
        DiracBVP::Commensurable decl{s.b1, {}};
        for (int k = 0; k < 4; ++k)
            decl.multipliers.push_back(std::llround(red.bvp.profile.b(k) / s.b1));
        red.bvp.commensurable = decl;
    }
    return red;
}

ExponentialPolynomial tim_model_polynomial(const TimoshenkoModel& model) {
    if (model.speeds == SpeedDeclaration::Undeclared)
        fail("SpeedSeparationUnknown",
             "the comparison polynomial needs a declared speed relation");
    if (model.speeds == SpeedDeclaration::Equal)
        fail("SpeedsNotEqual",
             "equal speeds use the quadratic comparison; call tim_delta0 or equal_speed_system");
    const BeamScales s = beam_scales(model);
    const FourTerm f = four_term(model, s);
    return ExponentialPolynomial({{s.b1 + s.b2, f.a_pp},
                                  {-(s.b1 + s.b2), f.a_mm},
                                  {s.b1 - s.b2, -f.a_pm},
                                  {s.b2 - s.b1, -f.a_mp}});
}

Complex tim_delta0(const TimoshenkoModel& model, Complex lambda) {
    if (model.speeds == SpeedDeclaration::Equal) return tim_delta0_equal(model, lambda);
    return tim_model_polynomial(model).eval(lambda);
}

EqualSpeedSystem equal_speed_system(const TimoshenkoModel& model, double ode_tol) {
    if (model.speeds != SpeedDeclaration::Equal)
        fail("SpeedsNotEqual", "equal_speed_system requires a declared equal-speed relation");
    validate_model(model);
    verify_speed_declaration(model);
    const DerivedBeam d = derive_beam(model);

    EqualSpeedSystem sys;
    sys.scales = scales_from(model, d);
    sys.b = sys.scales.b1;

    std::vector<double> forced;
    for (const ScalarFunction* f : {&d.q1p, &d.q1m, &d.q2p, &d.q2m, &d.r12})
        for (double x : f->interior_breakpoints(0.0, model.ell)) forced.push_back(x);
    std::sort(forced.begin(), forced.end());
    forced.erase(std::unique(forced.begin(), forced.end()), forced.end());

    OdeOptions opt;
    opt.tol = ode_tol;

    // W' = -(1/2) M W with M built from the reduced potential entries:
    // lower-left is -+1 exactly, the rest are 2*q and +-2*r12.
    Eigen::MatrixXcd wm = Eigen::MatrixXcd::Identity(2, 2);
    integrate_matrix_ode(
        [&](double x, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy) {
            Eigen::Matrix2cd m2;
            m2 << d.q1p.eval(x), d.r12.eval(x), Complex{-0.5, 0.0}, d.q2p.eval(x);
            dy = -(m2 * y);
        },
        wm, 0.0, model.ell, forced, opt);
    Eigen::MatrixXcd wp = Eigen::MatrixXcd::Identity(2, 2);
    integrate_matrix_ode(
        [&](double x, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& dy) {
            Eigen::Matrix2cd m2;
            m2 << d.q1m.eval(x), -d.r12.eval(x), Complex{0.5, 0.0}, d.q2m.eval(x);
            dy = -(m2 * y);
        },
        wp, 0.0, model.ell, forced, opt);
    sys.w_minus = wm;
    sys.w_plus = wp;

    // boundary matrix entries d_jk^{+-} from the product of the feedback rows
    // with the gauge end values
    const BeamScales& s = sys.scales;
    const auto combos = [&](const Eigen::Matrix2cd& w, Complex a1, Complex a2) {
        return std::array<Complex, 4>{a1 * w(0, 0) + model.gamma1 * w(1, 0),
                                      a1 * w(0, 1) + model.gamma1 * w(1, 1),
                                      model.gamma2 * w(0, 0) + a2 * w(1, 0),
                                      model.gamma2 * w(0, 1) + a2 * w(1, 1)};
    };
    const auto dp = combos(sys.w_plus, s.alpha1_plus, s.alpha2_plus);
    const auto dm = combos(sys.w_minus, s.alpha1_minus, s.alpha2_minus);
    const Complex d11p = dp[0], d12p = dp[1], d21p = dp[2], d22p = dp[3];
    const Complex d11m = dm[0], d12m = dm[1], d21m = dm[2], d22m = dm[3];
    sys.d_plus = d11p * d22p - d12p * d21p;
    sys.d_minus = d11m * d22m - d12m * d21m;
    sys.d_zero = d11p * d22m + d11m * d22p - d12p * d21m - d12m * d21p;

    // roots of d_plus z^2 - d_zero z + d_minus, with the stable pairing
    if (sys.d_plus == Complex{0.0, 0.0}) {
        sys.z1 = sys.z2 = Complex{std::numeric_limits<double>::quiet_NaN(), 0.0};
        return sys;
    }
    const Complex disc = std::sqrt(sys.d_zero * sys.d_zero - 4.0 * sys.d_plus * sys.d_minus);
    const Complex big = std::abs(sys.d_zero + disc) >= std::abs(sys.d_zero - disc)
                            ? sys.d_zero + disc
                            : sys.d_zero - disc;
    if (big == Complex{0.0, 0.0}) {
        sys.z1 = sys.z2 = Complex{0.0, 0.0};
        return sys;
    }
    sys.z1 = big / (2.0 * sys.d_plus);
    sys.z2 = sys.d_minus / (sys.d_plus * sys.z1);
    return sys;
}

Complex tim_delta0_equal(const TimoshenkoModel& model, Complex lambda) {
    const EqualSpeedSystem sys = equal_speed_system(model);
    const Complex e = std::exp(Complex{0.0, 1.0} * (2.0 * sys.b) * lambda);
    return sys.d_plus * e - sys.d_zero + sys.d_minus / e;
}

BranchReport tim_asymptotic_branches(const TimoshenkoModel& model) {
    if (model.speeds == SpeedDeclaration::Undeclared)
        fail("RegimeUndetermined",
             "asymptotic branches need a declared speed relation (Separated or Equal)");
    const BeamScales s = beam_scales(model);
    if (!s.regular)
        fail("RegularityViolated",
             "a boundary combination (alpha1 +- h1)(alpha2 +- h2) - gamma1 gamma2 vanishes");

    BranchReport rep;
    const Complex ni{0.0, -1.0}; // -i

    if (model.speeds == SpeedDeclaration::Equal) {
        const EqualSpeedSystem sys = equal_speed_system(model);
        rep.regime = BeamRegime::EqualSpeeds;
        rep.branches.push_back(
            {M_PI / sys.b, ni * std::log(sys.z1) / (2.0 * sys.b), "root-1"});
        rep.branches.push_back(
            {M_PI / sys.b, ni * std::log(sys.z2) / (2.0 * sys.b), "root-2"});
        rep.root_gap = std::abs(sys.z1 - sys.z2);
        rep.note = "quadratic in e^{2 i lambda b}; separation iff the two roots differ.";
        rep.separation =
            gap_verdict(rep.root_gap, std::max(std::abs(sys.z1), std::abs(sys.z2)), rep.note);
        return rep;
    }

    // separated speeds from here on
    const Complex gg = model.gamma1 * model.gamma2;
    if (aligned_boundary(model, s)) {
        rep.regime = BeamRegime::AlignedBoundary;
        const double bsum = s.b1 + s.b2;
        // aligned: a1- a2- * a1+ a2+ = (g1 g2)^2, so the surviving coefficient
        // ratio -A_mm/A_pp collapses to g1 g2 v1- v2- / (a1+ a2+ v1+ v2+)
        const Complex tau0 = gg * (s.v1_minus * s.v2_minus) /
                             (s.alpha1_plus * s.alpha2_plus * (s.v1_plus * s.v2_plus));
        rep.branches.push_back({M_PI / bsum, ni * std::log(tau0) / (2.0 * bsum), "combined"});
        rep.separation = SeparationVerdict::Separated;
        rep.note = "middle coefficients vanish: a single progression of simple zeros.";
        return rep;
    }
    if (gg == Complex{0.0, 0.0}) {
        rep.regime = BeamRegime::UncoupledBoundary;
        const Complex tau1 = s.alpha1_minus * s.h1_0 / (s.alpha1_plus * s.h1_ell);
        const Complex tau2 = s.alpha2_minus * s.h2_0 / (s.alpha2_plus * s.h2_ell);
        rep.branches.push_back({M_PI / s.b1, ni * std::log(tau1) / (2.0 * s.b1), "channel-1"});
        rep.branches.push_back({M_PI / s.b2, ni * std::log(tau2) / (2.0 * s.b2), "channel-2"});
        std::optional<RationalDecl> decl;
        if (model.travel_ratio) {
            check_travel_ratio(model, s);
            decl = RationalDecl{2.0 * (s.b1 + s.b2) /
                                    static_cast<double>(model.travel_ratio->first +
                                                        model.travel_ratio->second),
                                {model.travel_ratio->first, model.travel_ratio->second}};
        }
        const StrictRegularityVerdict v =
            classify_quasi_periodic({tau1, tau2}, {2.0 * s.b1, 2.0 * s.b2}, decl);
        switch (v.status) {
        case RegularityClass::StrictlyRegular: rep.separation = SeparationVerdict::Separated; break;
        case RegularityClass::RegularNotStrict:
            rep.separation = SeparationVerdict::NotSeparated;
            break;
        default: rep.separation = SeparationVerdict::Undecidable; break;
        }
        rep.note = v.reason;
        return rep;
    }
    if (model.travel_ratio) {
        rep.regime = BeamRegime::CommensurableTravel;
        check_travel_ratio(model, s);
        const long long n1 = model.travel_ratio->first;
        const long long n2 = model.travel_ratio->second;
        const double unit = (s.b1 + s.b2) / static_cast<double>(n1 + n2);
        const FourTerm f = four_term(model, s);
        const int deg = static_cast<int>(2 * (n1 + n2));
        std::vector<Complex> coeff(static_cast<std::size_t>(deg) + 1, Complex{0.0, 0.0});
        coeff[static_cast<std::size_t>(deg)] += f.a_pp;
        coeff[0] += f.a_mm;
        coeff[static_cast<std::size_t>(2 * n1)] -= f.a_pm;
        coeff[static_cast<std::size_t>(2 * n2)] -= f.a_mp;
        const std::vector<Complex> roots = polynomial_roots(coeff);
        for (std::size_t k = 0; k < roots.size(); ++k)
            rep.branches.push_back({2.0 * M_PI / unit, ni * std::log(roots[k]) / unit,
                                    "root-" + std::to_string(k + 1)});
        rep.root_gap = min_pairwise_gap(roots);
        rep.note = "polynomial in e^{i lambda b} of degree " + std::to_string(deg) +
                   "; separation iff all roots are simple.";
        rep.separation = gap_verdict(rep.root_gap, max_root_abs(roots), rep.note);
        return rep;
    }
    rep.regime = BeamRegime::DistinctGeneral;
    rep.separation = SeparationVerdict::Undecidable;
    rep.note = "no closed-form branch structure; declare a travel-time ratio or use the "
               "windowed spectrum directly.";
    return rep;
}

TimSpectrumCheck tim_spectrum_check(const TimoshenkoModel& model, double re_lo, double re_hi,
                                    double strip, double tol) {
    if (model.speeds == SpeedDeclaration::Undeclared)
        fail("SpeedSeparationUnknown",
             "the comparison spectrum needs a declared speed relation");
    TimSpectrumCheck check;
    const BeamReduction red = reduce_to_dirac(model);
    check.computed = zeros_in_window(red.bvp, re_lo, re_hi, strip, tol);

    std::vector<LocatedZero> model_zeros;
    if (model.speeds == SpeedDeclaration::Equal) {
        const EqualSpeedSystem sys = equal_speed_system(model);
        const ExponentialPolynomial poly(
            {{2.0 * sys.b, sys.d_plus}, {0.0, -sys.d_zero}, {-2.0 * sys.b, sys.d_minus}});
        model_zeros = exp_poly_zeros(poly, re_lo, re_hi, strip,
                                     CommensurableFrequencies{2.0 * sys.b});
    } else {
        const ExponentialPolynomial poly = tim_model_polynomial(model);
        std::optional<CommensurableFrequencies> decl;
        if (model.travel_ratio) {
            const BeamScales& s = red.scales;
            decl = CommensurableFrequencies{
                (s.b1 + s.b2) /
                static_cast<double>(model.travel_ratio->first + model.travel_ratio->second)};
        }
        model_zeros = exp_poly_zeros(poly, re_lo, re_hi, strip, decl);
    }
    check.predicted = to_eigenvalues(model_zeros);
    check.pairing = pair_spectra(check.computed.eigenvalues, check.predicted);
    return check;
}

} // namespace diracbvp
