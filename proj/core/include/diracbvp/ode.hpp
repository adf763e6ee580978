#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "diracbvp/error.hpp"

namespace diracbvp {

struct OdeOptions {
    double tol = 1e-10; // local per-step tolerance, mixed absolute/relative
    long long max_steps = 8000000;
    double initial_step = 0.0; // 0 = auto
};

namespace ode_detail {
// Dormand-Prince 5(4) tableau
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 35.0 / 384 - 5179.0 / 57600, E3 = 500.0 / 1113 - 7571.0 / 16695,
                 E4 = 125.0 / 192 - 393.0 / 640, E5 = -2187.0 / 6784 + 92097.0 / 339200,
                 E6 = 11.0 / 84 - 187.0 / 2100, E7 = -1.0 / 40;
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
} // namespace ode_detail

// Integrates Y' = f(x, Y) from a to b in place, stepping adaptively but
// never across the sorted forced nodes in (a, b). The callable writes the
// derivative into its third argument: f(x, Y, dY). All stage storage is
// preallocated; f must not resize its output.
template <class RHS>
void integrate_matrix_ode(RHS&& f, Eigen::MatrixXcd& y, double a, double b,
                          const std::vector<double>& forced, const OdeOptions& opt) {
    using namespace ode_detail;
    if (b <= a) {
        if (b < a) fail("BadRepresentation", "integration interval reversed");
        return;
    }
    std::vector<double> stops;
    for (double s : forced)
        if (s > a && s < b) stops.push_back(s);
    std::sort(stops.begin(), stops.end());
    stops.push_back(b);

    const auto rows = y.rows(), cols = y.cols();
    Eigen::MatrixXcd k1(rows, cols), k2(rows, cols), k3(rows, cols), k4(rows, cols),
        k5(rows, cols), k6(rows, cols), k7(rows, cols), y5(rows, cols), err(rows, cols),
        tmp(rows, cols);

    double x = a;
    double h = (opt.initial_step > 0.0) ? opt.initial_step : (b - a) / 64.0;
    long long steps = 0;

    for (double stop : stops) {
        while (x < stop) {
            h = std::min(h, stop - x);
            f(x, y, k1);
            tmp.noalias() = y + (h * A21) * k1;
            f(x + C2 * h, tmp, k2);
            tmp.noalias() = y + (h * A31) * k1 + (h * A32) * k2;
            f(x + C3 * h, tmp, k3);
            tmp.noalias() = y + (h * A41) * k1 + (h * A42) * k2 + (h * A43) * k3;
            f(x + C4 * h, tmp, k4);
            tmp.noalias() = y + (h * A51) * k1 + (h * A52) * k2 + (h * A53) * k3 + (h * A54) * k4;
            f(x + C5 * h, tmp, k5);
            tmp.noalias() =
                y + (h * A61) * k1 + (h * A62) * k2 + (h * A63) * k3 + (h * A64) * k4 + (h * A65) * k5;
            f(x + h, tmp, k6);
            y5.noalias() =
                y + (h * B1) * k1 + (h * B3) * k3 + (h * B4) * k4 + (h * B5) * k5 + (h * B6) * k6;
            f(x + h, y5, k7);
            err.noalias() = (h * E1) * k1 + (h * E3) * k3 + (h * E4) * k4 + (h * E5) * k5 +
                            (h * E6) * k6 + (h * E7) * k7;

            double ynorm = std::max(y.cwiseAbs().maxCoeff(), y5.cwiseAbs().maxCoeff());
            double scale = opt.tol * (1.0 + ynorm);
            double enorm = err.cwiseAbs().maxCoeff() / scale;

            if (!std::isfinite(enorm) || !y5.allFinite())
                fail("NonFiniteValue", "overflow during integration at x=" + std::to_string(x));

            if (enorm <= 1.0) {
                x += h;
                y.swap(y5);
            }
            double factor = (enorm > 0.0) ? 0.9 * std::pow(enorm, -0.2) : 5.0;
            h *= std::clamp(factor, 0.2, 5.0);
            if (++steps > opt.max_steps)
                fail("StepLimitExceeded", "step limit hit at x=" + std::to_string(x));
        }
        x = stop;
    }
}

} // namespace diracbvp
