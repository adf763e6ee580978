#include "diracbvp/inner_products.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "diracbvp/error.hpp"

namespace diracbvp {

namespace {

// exact integral over [a, b] of the quadratic through (x0,f0), (x1,f1), (x2,f2)
Complex quad3(double x0, double x1, double x2, Complex f0, Complex f1, Complex f2, double a,
              double b) {
    const Complex c1 = (f1 - f0) / (x1 - x0);
    const Complex c2 = ((f2 - f1) / (x2 - x1) - c1) / (x2 - x0);
    const double m = x1 - x0;
    auto P = [&](double u) { return f0 * u + c1 * (u * u / 2.0) + c2 * (u * u * u / 3.0 - m * u * u / 2.0); };
    return P(b - x0) - P(a - x0);
}

// composite Simpson on a (possibly non-uniform) grid; the odd tail interval
// reuses the quadratic through the last three nodes
Complex integrate_samples(const std::vector<double>& x, const std::vector<Complex>& s) {
    const std::size_t N = x.size();
    if (N < 2)
        return Complex(0.0, 0.0);
    if (N == 2)
        return 0.5 * (s[0] + s[1]) * (x[1] - x[0]);
    Complex total(0.0, 0.0);
    std::size_t i = 0;
    while (i + 2 < N) {
        total += quad3(x[i], x[i + 1], x[i + 2], s[i], s[i + 1], s[i + 2], x[i], x[i + 2]);
        i += 2;
    }
    if (i + 1 < N)
        total += quad3(x[N - 3], x[N - 2], x[N - 1], s[N - 3], s[N - 2], s[N - 1], x[N - 2],
                       x[N - 1]);
    return total;
}

void check_shape(const WeightedVectorFunction& f, const char* who) {
    if (!f.profile)
        fail("BadRepresentation", std::string(who) + ": missing weight profile");
    if (f.grid.size() != f.values.size() || f.grid.size() < 2)
        fail("BadRepresentation", std::string(who) + ": grid/value size mismatch");
    if (f.values.front().size() != f.n())
        fail("BadRepresentation", std::string(who) + ": vector dimension != profile order");
}

void check_same_grid(const WeightedVectorFunction& f, const WeightedVectorFunction& g) {
    check_shape(f, "weighted_inner_product");
    check_shape(g, "weighted_inner_product");
    if (f.n() != g.n())
        fail("GridMismatch", "operands live over different weight orders");
    if (f.grid.size() != g.grid.size())
        fail("GridMismatch", "operands sampled on grids of different size; resample first");
    const double tol = 1e-12 * (1.0 + std::abs(f.grid.back()));
    for (std::size_t i = 0; i < f.grid.size(); ++i)
        if (std::abs(f.grid[i] - g.grid[i]) > tol)
            fail("GridMismatch", "operand grids disagree at node " + std::to_string(i) +
                                     "; resample first");
}

Complex inner_product_impl(const WeightedVectorFunction& f, const WeightedVectorFunction& g,
                           const WeightTable* table) {
    check_same_grid(f, g);
    const int n = f.n();
    const std::size_t N = f.grid.size();
    std::vector<Complex> s(N);
    for (std::size_t i = 0; i < N; ++i) {
        Complex acc(0.0, 0.0);
        for (int k = 0; k < n; ++k) {
            const double w = table ? table->w(static_cast<Eigen::Index>(i), k)
                                   : std::abs(f.profile->beta(k, f.grid[i]));
            acc += f.values[i][k] * std::conj(g.values[i][k]) * w;
        }
        s[i] = acc;
    }
    return integrate_samples(f.grid, s);
}

} // namespace

std::vector<double> uniform_grid(double ell, int intervals) {
    if (intervals < 1 || !(ell > 0.0))
        fail("BadRepresentation", "uniform_grid needs ell > 0 and at least one interval");
    std::vector<double> grid(static_cast<std::size_t>(intervals) + 1);
    for (int i = 0; i <= intervals; ++i)
        grid[static_cast<std::size_t>(i)] = ell * static_cast<double>(i) / intervals;
    grid.front() = 0.0;
    grid.back() = ell;
    return grid;
}

WeightedVectorFunction make_weighted_function(std::shared_ptr<const WeightProfile> profile,
                                              std::vector<double> grid,
                                              const std::function<Eigen::VectorXcd(double)>& fn) {
    if (!profile)
        fail("BadRepresentation", "make_weighted_function: null profile");
    WeightedVectorFunction f;
    f.profile = std::move(profile);
    f.grid = std::move(grid);
    f.values.reserve(f.grid.size());
    for (double x : f.grid)
        f.values.push_back(fn(x));
    check_shape(f, "make_weighted_function");
    return f;
}

WeightedVectorFunction scaled(const WeightedVectorFunction& f, Complex factor) {
    WeightedVectorFunction out = f;
    for (auto& v : out.values)
        v *= factor;
    return out;
}

WeightTable build_weight_table(const WeightProfile& profile, const std::vector<double>& grid) {
    WeightTable table;
    table.grid = grid;
    table.w.resize(static_cast<Eigen::Index>(grid.size()), profile.n());
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (int k = 0; k < profile.n(); ++k)
            table.w(static_cast<Eigen::Index>(i), k) = std::abs(profile.beta(k, grid[i]));
    return table;
}

Complex weighted_inner_product(const WeightedVectorFunction& f, const WeightedVectorFunction& g) {
    return inner_product_impl(f, g, nullptr);
}

Complex weighted_inner_product(const WeightedVectorFunction& f, const WeightedVectorFunction& g,
                               const WeightTable& table) {
    if (table.grid.size() != f.grid.size())
        fail("GridMismatch", "weight table built for a different grid");
    return inner_product_impl(f, g, &table);
}

double weighted_norm(const WeightedVectorFunction& f) {
    return std::sqrt(std::max(0.0, weighted_inner_product(f, f).real()));
}

double weighted_norm(const WeightedVectorFunction& f, const WeightTable& table) {
    return std::sqrt(std::max(0.0, weighted_inner_product(f, f, table).real()));
}

WeightedVectorFunction resample_cubic(const WeightedVectorFunction& f,
                                      std::vector<double> new_grid) {
    check_shape(f, "resample_cubic");
    const std::size_t N = f.grid.size();
    const double slack = 1e-9 * (1.0 + std::abs(f.grid.back() - f.grid.front()));
    WeightedVectorFunction out;
    out.profile = f.profile;
    out.grid = std::move(new_grid);
    out.values.reserve(out.grid.size());
    for (double t : out.grid) {
        if (t < f.grid.front() - slack || t > f.grid.back() + slack)
            fail("GridMismatch", "resample target outside the source span");
        const double tc = std::clamp(t, f.grid.front(), f.grid.back());
        auto it = std::upper_bound(f.grid.begin(), f.grid.end(), tc);
        std::size_t j = static_cast<std::size_t>(std::distance(f.grid.begin(), it));
        j = (j == 0) ? 0 : j - 1;                   // left node of the bracketing interval
        const std::size_t deg = std::min<std::size_t>(3, N - 1);
        std::size_t i0 = (j == 0) ? 0 : j - 1;      // centered 4-point stencil
        i0 = std::min(i0, N - 1 - deg);
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(f.n());
        for (std::size_t m = 0; m <= deg; ++m) {
            double w = 1.0;
            for (std::size_t r = 0; r <= deg; ++r) {
                if (r == m)
                    continue;
                w *= (tc - f.grid[i0 + r]) / (f.grid[i0 + m] - f.grid[i0 + r]);
            }
            v += w * f.values[i0 + m];
        }
        out.values.push_back(std::move(v));
    }
    return out;
}

} // namespace diracbvp
