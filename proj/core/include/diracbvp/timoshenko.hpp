#pragma once

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/bvp.hpp"
#include "diracbvp/exppoly.hpp"
#include "diracbvp/scalar_function.hpp"
#include "diracbvp/spectra.hpp"

namespace diracbvp {

// How the two wave-speed profiles shear/density and flexural/rot_inertia
// relate. Declared by the caller and verified against the data on a sample
// grid; never inferred from floating-point values alone.
enum class SpeedDeclaration { Undeclared, Separated, Equal };

// Damped beam with lateral displacement W and bending angle Phi on [0, ell]:
//   rot_inertia * Phi_tt = shear * (W_x - Phi) + (flexural * Phi_x)_x - damping1 * Phi_t,
//   density     * W_tt   = (shear * (W_x - Phi))_x - damping2 * W_t,
// clamped at x = 0 (W = Phi = 0) and with velocity feedback at x = ell:
//   flexural * Phi_x + alpha1 * Phi_t + gamma1 * W_t = 0,
//   shear * (W_x - Phi) + alpha2 * W_t + gamma2 * Phi_t = 0.
// The four stiffness/inertia coefficients must be positive and bounded away
// from zero; the dampings are integrable complex functions.
struct TimoshenkoModel {
    ScalarFunction density;
    ScalarFunction rot_inertia;
    ScalarFunction shear;
    ScalarFunction flexural;
    ScalarFunction damping1;
    ScalarFunction damping2;
    Complex alpha1{0.0, 0.0}, alpha2{0.0, 0.0};
    Complex gamma1{0.0, 0.0}, gamma2{0.0, 0.0};
    double ell = 1.0;
    SpeedDeclaration speeds = SpeedDeclaration::Undeclared;
    // declared integer ratio n1 : n2 of the channel travel times b1 : b2;
    // enables the polynomial branch analysis for commensurable travel times
    std::optional<std::pair<long long, long long>> travel_ratio;
    // tabulation resolution for derived coefficients (wave slownesses,
    // impedances, couplings) when the inputs are not all constant
    int sample_grid = 1024;
};

// Scalar data shared by every spectral formula: travel times, impedance
// endpoint values, boundary combinations, and the damping gauge factors.
struct BeamScales {
    double b1 = 0.0, b2 = 0.0;            // channel travel times
    double h1_0 = 0.0, h1_ell = 0.0;      // impedance sqrt(flexural*rot_inertia) at the ends
    double h2_0 = 0.0, h2_ell = 0.0;      // impedance sqrt(shear*density) at the ends
    Complex alpha1_plus, alpha1_minus;    // alpha1 +- h1(ell)
    Complex alpha2_plus, alpha2_minus;    // alpha2 +- h2(ell)
    double v1_plus = 1.0, v1_minus = 1.0; // (h1(ell)/h1(0))^{+-1/2}
    double v2_plus = 1.0, v2_minus = 1.0;
    Complex gauge1{1.0, 0.0};             // exp(-integral damping_k / (2 h_k))
    Complex gauge2{1.0, 0.0};
    Complex j_plus, j_minus;              // (alpha1 +- h1(ell))(alpha2 +- h2(ell)) - gamma1 gamma2
    bool regular = false;                 // both j factors nonzero
};

BeamScales beam_scales(const TimoshenkoModel& model);

// First-order reduction of the beam generator: four channels with weights
// (-beta1, beta1, -beta2, beta2), beta1 = sqrt(rot_inertia/flexural),
// beta2 = sqrt(density/shear), coupled through the impedances and dampings;
// the boundary rows encode the clamping at 0 and the feedback at ell. The
// problem is handed to assemble_bvp, which reorders channels canonically.
// A non-regular boundary pair is reported in scales.regular, never thrown.
struct BeamReduction {
    DiracBVP bvp;
    BeamScales scales;
};

BeamReduction reduce_to_dirac(const TimoshenkoModel& model);

// Four-term comparison polynomial for separated wave speeds, with exponents
// +-(b1 + b2), +-(b1 - b2). Its zeros approach the beam eigenvalues. Throws
// SpeedSeparationUnknown unless the model declares (and the data confirms)
// separated speeds; an equal-speed declaration routes to tim_delta0_equal.
ExponentialPolynomial tim_model_polynomial(const TimoshenkoModel& model);
Complex tim_delta0(const TimoshenkoModel& model, Complex lambda);

// Equal-speed comparison data: end values of the two coupled 2x2 gauge
// systems, the coefficients of the quadratic d_plus z^2 - d_zero z + d_minus
// whose variable is z = e^{2 i lambda b}, and its roots.
struct EqualSpeedSystem {
    Eigen::Matrix2cd w_minus, w_plus;
    Complex d_plus, d_zero, d_minus;
    Complex z1, z2;
    double b = 0.0; // common travel time
    BeamScales scales;
};

EqualSpeedSystem equal_speed_system(const TimoshenkoModel& model, double ode_tol = 1e-12);

// d_plus e^{2 i lambda b} - d_zero + d_minus e^{-2 i lambda b}; equals the
// determinant of the boundary matrix built from the gauge end values. Throws
// SpeedsNotEqual unless equal speeds are declared and confirmed.
Complex tim_delta0_equal(const TimoshenkoModel& model, Complex lambda);

enum class BeamRegime {
    DistinctGeneral,     // separated speeds, no closed-form branch structure
    UncoupledBoundary,   // gamma1*gamma2 = 0: one progression per channel
    AlignedBoundary,     // middle coefficients vanish: a single progression
    CommensurableTravel, // declared integer travel ratio: polynomial roots
    EqualSpeeds,         // common speed: quadratic in e^{2 i lambda b}
};

enum class SeparationVerdict { Separated, NotSeparated, Undecidable };

// One arithmetic progression lambda_m ~ step * m + offset, m in Z.
struct SpectralBranch {
    double step = 0.0;
    Complex offset{0.0, 0.0};
    std::string label;
};

struct BranchReport {
    BeamRegime regime = BeamRegime::DistinctGeneral;
    std::vector<SpectralBranch> branches;
    SeparationVerdict separation = SeparationVerdict::Undecidable;
    // smallest distance between distinct polynomial roots (polynomial
    // regimes only); verdicts below 1e-9 relative are abstained from
    double root_gap = std::numeric_limits<double>::quiet_NaN();
    std::string note;
};

// Asymptotic eigenvalue branches and the separation verdict. Eigenvalues are
// reported in the generator convention y_t = i L y: the time-domain decay
// rate of a mode is Im lambda. Throws RegularityViolated when a boundary
// combination j_plus/j_minus vanishes and RegimeUndetermined when the speed
// relation is undeclared.
BranchReport tim_asymptotic_branches(const TimoshenkoModel& model);

// Zeros of the reduced problem's characteristic determinant in the window
// [re_lo, re_hi] x [-strip, strip], paired against the zeros of the
// comparison polynomial. Band statistics expose the o(1) approach.
struct TimSpectrumCheck {
    SpectrumReport computed;
    std::vector<Eigenvalue> predicted;
    SpectrumPairing pairing;
};

TimSpectrumCheck tim_spectrum_check(const TimoshenkoModel& model, double re_lo, double re_hi,
                                    double strip, double tol = 1e-10);

} // namespace diracbvp
