#include "diracbvp/fundamental.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <mutex>

#include "diracbvp/error.hpp"
#include "diracbvp/ode.hpp"

namespace diracbvp {

namespace {

constexpr double kOverflowExponent = 300.0;

// i lambda B(x) - Q(x), with an offset subtracted from every weight for the
// rescaled variant.
struct SystemRhs {
    const DiracBVP& bvp;
    Complex lambda;
    int ref = -1; // if >= 0, use B - beta_ref I
    mutable Eigen::MatrixXcd M;

    explicit SystemRhs(const DiracBVP& b, Complex l, int r = -1)
        : bvp(b), lambda(l), ref(r), M(b.n(), b.n()) {}

    void build(double x) const {
        bvp.Q.eval_into(x, M);
        M = -M;
        double shift = (ref >= 0) ? bvp.profile.beta(ref, x) : 0.0;
        for (int k = 0; k < bvp.n(); ++k)
            M(k, k) += Complex(0.0, 1.0) * lambda * (bvp.profile.beta(k, x) - shift);
    }

    void operator()(double x, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out) const {
        build(x);
        out.noalias() = M * y;
    }
};

std::vector<double> coefficient_breakpoints(const DiracBVP& bvp) {
    std::vector<double> xs = bvp.profile.interior_breakpoints(0.0, bvp.ell());
    for (double x : bvp.Q.interior_breakpoints(0.0, bvp.ell())) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

void check_overflow(const DiracBVP& bvp, Complex lambda) {
    double bmax = 0.0;
    for (int k = 0; k < bvp.n(); ++k) bmax = std::max(bmax, std::abs(bvp.profile.b(k)));
    if (std::abs(lambda.imag()) * bmax > kOverflowExponent)
        fail("NonFiniteValue", "|Im lambda| * max|b_k| exceeds floating range; "
                               "use the rescaled solver");
}

std::vector<double> trajectory_grid(const DiracBVP& bvp, int steps) {
    if (steps < 16) fail("BadRepresentation", "need at least 16 grid steps");
    std::vector<double> grid;
    grid.reserve(std::size_t(steps) + 1);
    for (int i = 0; i <= steps; ++i) grid.push_back(bvp.ell() * double(i) / double(steps));
    for (double x : coefficient_breakpoints(bvp)) grid.push_back(x);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end(),
                           [&](double a, double b) { return b - a < 1e-14 * bvp.ell(); }),
               grid.end());
    grid.back() = bvp.ell();
    return grid;
}

FundamentalTrajectory integrate_trajectory(const DiracBVP& bvp, Complex lambda, int steps,
                                           double tol, int ref) {
    FundamentalTrajectory traj;
    traj.lambda = lambda;
    traj.grid = trajectory_grid(bvp, steps);

    SystemRhs rhs(bvp, lambda, ref);
    OdeOptions opt;
    opt.tol = tol;

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(bvp.n(), bvp.n());
    traj.values.reserve(traj.grid.size());
    traj.values.push_back(y);
    for (std::size_t i = 1; i < traj.grid.size(); ++i) {
        integrate_matrix_ode(rhs, y, traj.grid[i - 1], traj.grid[i], {}, opt);
        traj.values.push_back(y);
    }
    traj.dets.reserve(traj.values.size());
    for (const auto& v : traj.values) traj.dets.push_back(v.determinant());
    return traj;
}

// Bounded insert-or-get cache. Exact key match only: a nearby lambda is a
// different key.
struct CacheKey {
    std::uint64_t id;
    double re, im, tol;
    int steps;
    bool operator==(const CacheKey& o) const {
        return id == o.id && re == o.re && im == o.im && tol == o.tol && steps == o.steps;
    }
};

class TrajectoryCache {
public:
    bool get(const CacheKey& key, FundamentalTrajectory& out) {
        std::lock_guard<std::mutex> lock(mu_);
        for (const auto& e : entries_)
            if (e.first == key) {
                out = e.second;
                return true;
            }
        return false;
    }
    void put(const CacheKey& key, const FundamentalTrajectory& traj) {
        std::lock_guard<std::mutex> lock(mu_);
        for (const auto& e : entries_)
            if (e.first == key) return;
        entries_.emplace_back(key, traj);
        if (entries_.size() > 64) entries_.pop_front();
    }

private:
    std::mutex mu_;
    std::deque<std::pair<CacheKey, FundamentalTrajectory>> entries_;
};

TrajectoryCache& cache() {
    static TrajectoryCache c;
    return c;
}

} // namespace

FundamentalTrajectory solve_fundamental(const DiracBVP& bvp, Complex lambda, int steps,
                                        double tol) {
    check_overflow(bvp, lambda);
    CacheKey key{bvp.id, lambda.real(), lambda.imag(), tol, steps};
    FundamentalTrajectory traj;
    if (bvp.id != 0 && cache().get(key, traj)) return traj;
    traj = integrate_trajectory(bvp, lambda, steps, tol, -1);
    if (bvp.id != 0) cache().put(key, traj);
    return traj;
}

FundamentalTrajectory solve_fundamental_rescaled(const DiracBVP& bvp, Complex lambda, int ref,
                                                 int steps, double tol) {
    if (ref < 0 || ref >= bvp.n()) fail("IndexOutOfRange", "reference weight index");
    return integrate_trajectory(bvp, lambda, steps, tol, ref);
}

Eigen::MatrixXcd fundamental_at_ell(const DiracBVP& bvp, Complex lambda, double tol) {
    check_overflow(bvp, lambda);
    SystemRhs rhs(bvp, lambda);
    OdeOptions opt;
    opt.tol = tol;
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Identity(bvp.n(), bvp.n());
    integrate_matrix_ode(rhs, y, 0.0, bvp.ell(), coefficient_breakpoints(bvp), opt);
    return y;
}

std::pair<Eigen::MatrixXcd, Eigen::MatrixXcd>
fundamental_with_dlambda(const DiracBVP& bvp, Complex lambda, double tol) {
    check_overflow(bvp, lambda);
    const int n = bvp.n();
    SystemRhs rhs(bvp, lambda);
    Eigen::VectorXd beta(n);

    auto augmented = [&](double x, const Eigen::MatrixXcd& y, Eigen::MatrixXcd& out) {
        rhs.build(x);
        for (int k = 0; k < n; ++k) beta(k) = bvp.profile.beta(k, x);
        out.leftCols(n).noalias() = rhs.M * y.leftCols(n);
        out.rightCols(n).noalias() = rhs.M * y.rightCols(n);
        // + i B Phi
        for (int k = 0; k < n; ++k)
            out.row(k).tail(n) += Complex(0.0, beta(k)) * y.row(k).head(n);
    };

    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, 2 * n);
    y.leftCols(n).setIdentity();
    OdeOptions opt;
    opt.tol = tol;
    integrate_matrix_ode(augmented, y, 0.0, bvp.ell(), coefficient_breakpoints(bvp), opt);
    return {y.leftCols(n), y.rightCols(n)};
}

void propagate_fundamental(const DiracBVP& bvp, Complex lambda, Eigen::MatrixXcd& y, double a,
                           double b, double tol) {
    SystemRhs rhs(bvp, lambda);
    OdeOptions opt;
    opt.tol = tol;
    integrate_matrix_ode(rhs, y, a, b, coefficient_breakpoints(bvp), opt);
}

Eigen::MatrixXcd unperturbed_fundamental(const WeightProfile& profile, Complex lambda, double x) {
    if (x < 0.0 || x > profile.ell()) fail("XOutOfDomain", "x outside [0, ell]");
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(profile.n(), profile.n());
    for (int k = 0; k < profile.n(); ++k)
        m(k, k) = std::exp(Complex(0.0, 1.0) * lambda * profile.rho(k, x));
    return m;
}

double liouville_residual(const FundamentalTrajectory& traj, const DiracBVP& bvp) {
    const int n = bvp.n();
    const auto& grid = traj.grid;

    // int_0^x tr Q: exact from entry primitives, cumulative Simpson otherwise
    std::vector<Complex> trint(grid.size(), Complex(0.0, 0.0));
    if (!bvp.Q.has_callable()) {
        for (std::size_t i = 0; i < grid.size(); ++i)
            for (int k = 0; k < n; ++k) trint[i] += bvp.Q.entry(k, k).primitive(grid[i]);
    } else {
        auto trace = [&](double x) {
            Complex t(0.0, 0.0);
            for (int k = 0; k < n; ++k) t += bvp.Q.entry_eval(k, k, x);
            return t;
        };
        for (std::size_t i = 1; i < grid.size(); ++i) {
            double h = grid[i] - grid[i - 1];
            trint[i] = trint[i - 1] +
                       h / 6.0 *
                           (trace(grid[i - 1]) + 4.0 * trace(0.5 * (grid[i - 1] + grid[i])) +
                            trace(grid[i]));
        }
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Complex srho(0.0, 0.0);
        for (int k = 0; k < n; ++k) srho += bvp.profile.rho(k, grid[i]);
        Complex reference = std::exp(Complex(0.0, 1.0) * traj.lambda * srho - trint[i]);
        worst = std::max(worst, std::abs(traj.dets[i] - reference));
    }
    return worst;
}

} // namespace diracbvp
