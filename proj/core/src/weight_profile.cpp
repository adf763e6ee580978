#include "diracbvp/weight_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diracbvp/error.hpp"

namespace diracbvp {

namespace {

// check grid: uniform nodes joined with every representation breakpoint
std::vector<double> check_points(const std::vector<ScalarFunction>& fs, double ell, int grid) {
    std::vector<double> xs;
    xs.reserve(grid + 1);
    for (int i = 0; i <= grid; ++i) xs.push_back(ell * double(i) / double(grid));
    for (const auto& f : fs)
        for (double b : f.interior_breakpoints(0.0, ell)) xs.push_back(b);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

} // namespace

WeightProfile build_weight_profile(std::vector<ScalarFunction> entries, double ell,
                                   int theta_check_grid) {
    if (ell <= 0.0) fail("BadRepresentation", "interval length must be positive");
    if (entries.empty()) fail("BadRepresentation", "at least one weight entry required");
    if (theta_check_grid < 2) theta_check_grid = 2;

    const int n = static_cast<int>(entries.size());
    auto xs = check_points(entries, ell, theta_check_grid);

    for (int k = 0; k < n; ++k) {
        if (entries[k].is_structurally_zero()) fail("ZeroWeight", "weight entry is identically zero");
        double lo = std::numeric_limits<double>::infinity();
        bool pos = false, neg = false;
        for (double x : xs) {
            Complex v = entries[k].eval(x);
            if (v.imag() != 0.0) fail("BadRepresentation", "weight entries must be real-valued");
            double r = v.real();
            if (r > 0.0) pos = true;
            if (r < 0.0) neg = true;
            lo = std::min(lo, std::abs(r));
        }
        if (pos && neg)
            fail("SignChange", "weight entry k=" + std::to_string(k) + " changes sign");
        if (lo < 1e-12)
            fail("ZeroWeight",
                 "weight entry k=" + std::to_string(k) + " not bounded away from zero");
    }

    // canonical order: sort indices by the pointwise order, certified below
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double mid = 0.5 * ell;
    std::stable_sort(perm.begin(), perm.end(), [&](int a, int b) {
        double va = entries[a].eval(mid).real(), vb = entries[b].eval(mid).real();
        if (va != vb) return va < vb;
        return a < b;
    });

    WeightProfile p;
    p.ell_ = ell;
    p.perm_ = perm;
    p.entries_.reserve(n);
    for (int k = 0; k < n; ++k) p.entries_.push_back(WeightFunction{entries[perm[k]]});

    // adjacent dichotomy: structurally identical, or gap > 0 everywhere on the grid
    double theta = std::numeric_limits<double>::infinity();
    p.block_index_.assign(n, 0);
    p.block_sizes_.clear();
    p.block_start_.clear();
    int block = 0;
    p.block_start_.push_back(0);
    int cur_size = 1;
    for (int k = 0; k + 1 < n; ++k) {
        if (p.entries_[k].f.same_representation(p.entries_[k + 1].f)) {
            p.block_index_[k + 1] = block;
            ++cur_size;
            continue;
        }
        double gap = std::numeric_limits<double>::infinity();
        for (double x : xs) gap = std::min(gap, p.entries_[k + 1].eval(x) - p.entries_[k].eval(x));
        if (gap <= 0.0)
            fail("NonSeparated", "weight entries at canonical positions " + std::to_string(k) +
                                     "," + std::to_string(k + 1) +
                                     " are neither identical nor gap-bounded (min gap " +
                                     std::to_string(gap) + ")");
        theta = std::min(theta, gap);
        p.block_sizes_.push_back(cur_size);
        cur_size = 1;
        ++block;
        p.block_start_.push_back(k + 1);
        p.block_index_[k + 1] = block;
    }
    p.block_sizes_.push_back(cur_size);
    p.theta_ = theta;

    p.n_minus_ = 0;
    double lo_abs = std::numeric_limits<double>::infinity(), hi_abs = 0.0;
    for (int k = 0; k < n; ++k) {
        bool negative = p.entries_[k].eval(0.0) < 0.0;
        if (negative) ++p.n_minus_;
        for (double x : xs) {
            double v = std::abs(p.entries_[k].eval(x));
            lo_abs = std::min(lo_abs, v);
            hi_abs = std::max(hi_abs, v);
        }
    }
    p.min_abs_beta_ = lo_abs;
    p.max_abs_beta_ = hi_abs;

    p.b_.resize(n);
    for (int k = 0; k < n; ++k) p.b_[k] = p.entries_[k].rho(ell);
    p.b_minus_ = 0.0;
    p.b_plus_ = 0.0;
    for (int k = 0; k < p.n_minus_; ++k) p.b_minus_ += p.b_[k];
    for (int k = p.n_minus_; k < n; ++k) p.b_plus_ += p.b_[k];
    return p;
}

double WeightProfile::rho(int k, double x) const {
    if (k < 0 || k >= n()) fail("IndexOutOfRange", "weight index " + std::to_string(k));
    return entries_[k].rho(x);
}

double evaluate_rho(const WeightProfile& profile, int k, double x) {
    if (k < 0 || k >= profile.n()) fail("IndexOutOfRange", "weight index " + std::to_string(k));
    if (x < 0.0 || x > profile.ell()) fail("XOutOfDomain", "x=" + std::to_string(x));
    if (x == profile.ell()) return profile.b(k); // cached endpoint, exact by construction
    return profile.rho(k, x);
}

namespace {

// bisection bracket + Newton polish for a strictly monotone function on the
// extended real line; |f'| >= slope_min > 0 guarantees a finite bracket
template <class F, class DF>
double solve_monotone(F f, DF df, double y, double seed, double slope_min) {
    double step = std::max(1.0, std::abs(y) / slope_min);
    double lo = seed - step, hi = seed + step;
    bool increasing = df(seed) > 0.0;
    auto g = [&](double u) { return increasing ? f(u) - y : y - f(u); };
    int guard = 0;
    while (g(lo) > 0.0 && guard++ < 128) lo -= step;
    guard = 0;
    while (g(hi) < 0.0 && guard++ < 128) hi += step;
    if (g(lo) > 0.0 || g(hi) < 0.0) fail("BadRepresentation", "monotone solve failed to bracket");
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        double fx = f(x) - y;
        if (std::abs(fx) <= slope_min * 1e-13) break;
        double d = df(x);
        double xn = (std::abs(d) > 1e-14) ? x - fx / d : x;
        if (!(xn > lo && xn < hi)) xn = 0.5 * (lo + hi); // fall back to bisection
        if ((increasing ? fx : -fx) > 0.0)
            hi = x;
        else
            lo = x;
        x = xn;
        if (hi - lo < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

} // namespace

double WeightProfile::rho_inverse(int k, double y) const {
    const WeightFunction& w = entries_[k];
    return solve_monotone([&](double u) { return w.rho(u); }, [&](double u) { return w.eval(u); },
                          y, 0.5 * ell_, min_abs_beta_);
}

double WeightProfile::diff_inverse(int j, int k, double y) const {
    if (beta_equiv(j, k)) fail("EqualWeights", "difference inverse undefined for identical weights");
    if (!std::isfinite(theta_) || theta_ <= 0.0)
        fail("NonSeparated", "no positive separation margin");
    auto f = [&](double u) { return entries_[j].rho(u) - entries_[k].rho(u); };
    auto df = [&](double u) { return entries_[j].eval(u) - entries_[k].eval(u); };
    return solve_monotone(f, df, y, 0.5 * ell_, theta_);
}

bool WeightProfile::beta_equiv(int j, int k) const {
    return entries_[j].f.same_representation(entries_[k].f);
}

SignatureData WeightProfile::signature_and_projectors() const {
    SignatureData s;
    const int m = n();
    s.S.resize(m);
    s.P_plus.resize(m);
    s.P_minus.resize(m);
    for (int k = 0; k < m; ++k) {
        bool pos = b_[k] > 0.0;
        s.S[k] = pos ? 1.0 : -1.0;
        s.P_plus[k] = pos ? 1.0 : 0.0;
        s.P_minus[k] = pos ? 0.0 : 1.0;
    }
    return s;
}

std::vector<double> WeightProfile::interior_breakpoints(double a, double b) const {
    std::vector<double> xs;
    for (const auto& e : entries_)
        for (double x : e.f.interior_breakpoints(a, b)) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

} // namespace diracbvp
