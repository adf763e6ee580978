#include "diracbvp/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "diracbvp/boundary.hpp"
#include "diracbvp/detsums.hpp"
#include "diracbvp/error.hpp"
#include "diracbvp/fundamental.hpp"

namespace diracbvp {

Complex delta(const DiracBVP& bvp, Complex lambda, double tol) {
    Eigen::MatrixXcd A = bvp.bc.C + bvp.bc.D * fundamental_at_ell(bvp, lambda, tol);
    return A.determinant();
}

DeltaDerivative delta_with_derivative(const DiracBVP& bvp, Complex lambda, double tol) {
    auto [phi, psi] = fundamental_with_dlambda(bvp, lambda, tol);
    Eigen::MatrixXcd A = bvp.bc.C + bvp.bc.D * phi;
    DeltaDerivative out;
    out.value = A.determinant();
    out.derivative = (detsums::adjugate(A) * (bvp.bc.D * psi)).trace();
    return out;
}

ExponentialPolynomial delta0_expansion(const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D,
                                       const WeightProfile& profile) {
    const int n = profile.n();
    if (C.rows() != n || C.cols() != n || D.rows() != n || D.cols() != n)
        fail("OrderMismatch", "boundary matrices must be n x n");
    if (n > 16) fail("BadRepresentation", "unperturbed expansion has 2^n terms; n > 16 refused");

    double scale = std::max({1.0, C.cwiseAbs().maxCoeff(), D.cwiseAbs().maxCoeff()});
    const double drop = 1e-14 * std::pow(scale, n);

    std::vector<ExpTerm> terms;
    terms.reserve(std::size_t(1) << n);
    Eigen::MatrixXcd mix(n, n);
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
        double bP = 0.0;
        for (int k = 0; k < n; ++k) {
            if (mask & (1ul << k)) {
                mix.col(k) = D.col(k);
                bP += profile.b(k);
            } else {
                mix.col(k) = C.col(k);
            }
        }
        Complex J = mix.determinant();
        if (std::abs(J) > drop) terms.push_back(ExpTerm{bP, J});
    }
    return ExponentialPolynomial(std::move(terms));
}

namespace {

// winding sweeps evaluate Delta and Delta' at the same nodes; share the ODE
// solve between the two closures
struct DeltaMemo {
    std::mutex mu;
    std::map<std::pair<double, double>, DeltaDerivative> values;
};

} // namespace

SpectrumReport zeros_in_window(const DiracBVP& bvp, double re_lo, double re_hi, double strip,
                               double tol) {
    if (!(re_hi > re_lo) || !(strip >= 0.0)) fail("BadRepresentation", "empty search window");

    SpectrumReport report;
    report.re_lo = re_lo;
    report.re_hi = re_hi;
    report.strip = strip;

    RegularityReport reg = regularity(bvp.bc.C, bvp.bc.D, bvp.profile);
    if (!reg.regular) {
        report.regular_warning = true;
        report.note = "NotRegular: window counts may be unreliable";
    } else if (reg.warning) {
        report.regular_warning = true;
        report.note = "NearSingularBoundaryPair";
    }

    auto memo = std::make_shared<DeltaMemo>();
    const DiracBVP* problem = &bvp;
    auto compute = [memo, problem, tol](Complex z) -> DeltaDerivative {
        std::pair<double, double> key{z.real(), z.imag()};
        {
            std::lock_guard<std::mutex> lock(memo->mu);
            auto it = memo->values.find(key);
            if (it != memo->values.end()) return it->second;
        }
        DeltaDerivative d = delta_with_derivative(*problem, z, tol);
        std::lock_guard<std::mutex> lock(memo->mu);
        if (memo->values.size() > 200000) memo->values.clear();
        memo->values.emplace(key, d);
        return d;
    };

    AnalyticFunction fn;
    fn.f = [compute](Complex z) { return compute(z).value; };
    fn.df = [compute](Complex z) { return compute(z).derivative; };
    double sum_b = 0.0;
    for (int k = 0; k < bvp.n(); ++k) sum_b += std::abs(bvp.profile.b(k));
    fn.phase_scale = std::max(sum_b, 1e-3);

    Box window{re_lo, re_hi, -strip, strip};
    for (const auto& z : analytic_zeros(fn, window, 1e-12)) {
        double margin = 1e-9 * (1.0 + std::abs(z.lambda));
        if (z.lambda.real() < re_lo - margin || z.lambda.real() > re_hi + margin) continue;
        if (std::abs(z.lambda.imag()) > strip + margin) continue;
        report.eigenvalues.push_back(Eigenvalue{z.lambda, z.multiplicity, z.residual});
    }
    std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) {
                  if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
                  return a.lambda.imag() < b.lambda.imag();
              });
    return report;
}

SpectrumPairing pair_spectra(const std::vector<Eigenvalue>& a, const std::vector<Eigenvalue>& b,
                             double onset_threshold, double band_base) {
    auto expand = [](const std::vector<Eigenvalue>& list) {
        std::vector<Complex> flat;
        for (const auto& e : list)
            for (int m = 0; m < e.multiplicity; ++m) flat.push_back(e.lambda);
        std::sort(flat.begin(), flat.end(), [](Complex x, Complex y) {
            if (x.real() != y.real()) return x.real() < y.real();
            return x.imag() < y.imag();
        });
        return flat;
    };
    std::vector<Complex> fa = expand(a), fb = expand(b);
    SpectrumPairing out;

    // a zero farther than half a typical model gap from every partner should
    // stay unmatched rather than poison the statistics
    double cap = std::numeric_limits<double>::infinity();
    if (fb.size() >= 2) {
        std::vector<double> gaps;
        for (std::size_t j = 1; j < fb.size(); ++j) {
            double g = std::abs(fb[j] - fb[j - 1]);
            if (g > 0.0) gaps.push_back(g);
        }
        if (!gaps.empty()) {
            std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
            cap = 0.5 * gaps[gaps.size() / 2];
        }
    }

    // both lists are Re-sorted, so true partners sit at nearby ranks; match
    // nearest-first inside that window
    struct Edge {
        double dist;
        std::size_t i, j;
    };
    std::vector<Edge> edges;
    const std::size_t K = 8 + (fa.size() > fb.size() ? fa.size() - fb.size()
                                                     : fb.size() - fa.size());
    for (std::size_t i = 0; i < fa.size(); ++i) {
        std::size_t lo = i > K ? i - K : 0;
        std::size_t hi = std::min(fb.size(), i + K + 1);
        for (std::size_t j = lo; j < hi; ++j) {
            double d = std::abs(fa[i] - fb[j]);
            if (d <= cap) edges.push_back(Edge{d, i, j});
        }
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& x, const Edge& y) { return x.dist < y.dist; });

    std::vector<bool> used_a(fa.size(), false), used_b(fb.size(), false);
    for (const auto& e : edges) {
        if (used_a[e.i] || used_b[e.j]) continue;
        used_a[e.i] = used_b[e.j] = true;
        out.pairs.push_back(PairedZero{fa[e.i], fb[e.j], e.dist});
    }
    std::sort(out.pairs.begin(), out.pairs.end(), [](const PairedZero& x, const PairedZero& y) {
        if (x.a.real() != y.a.real()) return x.a.real() < y.a.real();
        return x.a.imag() < y.a.imag();
    });
    for (std::size_t i = 0; i < fa.size(); ++i)
        if (!used_a[i]) out.unmatched_a.push_back(fa[i]);
    for (std::size_t j = 0; j < fb.size(); ++j)
        if (!used_b[j]) out.unmatched_b.push_back(fb[j]);
    if (fa.size() != fb.size()) {
        out.count_mismatch = true;
        out.note = "CountMismatch: " + std::to_string(fa.size()) + " vs " +
                   std::to_string(fb.size());
    } else if (!out.unmatched_a.empty()) {
        out.note = "UnpairableZeros: " + std::to_string(out.unmatched_a.size()) +
                   " beyond the distance cap";
    }

    if (!(band_base > 0.0)) fail("BadRepresentation", "band base must be positive");
    std::map<int, BandDeviation> bands;
    for (const auto& p : out.pairs) {
        double r = std::abs(p.a.real());
        if (r < band_base) continue;
        int k = static_cast<int>(std::floor(std::log2(r / band_base)));
        auto& slot = bands[k];
        slot.band = k;
        slot.max_deviation = std::max(slot.max_deviation, p.deviation);
        ++slot.count;
    }
    for (const auto& kv : bands) out.bands.push_back(kv.second);

    // largest |Re| whose deviation still exceeds the threshold decides the
    // onset; everything farther out stayed below it in this window
    double worst_offender = -1.0;
    double top = -1.0;
    for (const auto& p : out.pairs) {
        double r = std::abs(p.a.real());
        top = std::max(top, r);
        if (p.deviation > onset_threshold) worst_offender = std::max(worst_offender, r);
    }
    if (!out.pairs.empty()) {
        if (worst_offender < 0.0) {
            out.empirical_onset = 0.0;
        } else if (worst_offender < top) {
            double next = top;
            for (const auto& p : out.pairs) {
                double r = std::abs(p.a.real());
                if (r > worst_offender) next = std::min(next, r);
            }
            out.empirical_onset = next;
        } // else: never achieved in this window, stays NaN
    }
    return out;
}

VectorTrajectory eigenvector(const DiracBVP& bvp, Complex lambda, int p, int steps, double tol,
                             double delta_tol) {
    const int n = bvp.n();
    if (p < 0 || p >= n) fail("IndexOutOfRange", "column index " + std::to_string(p));

    FundamentalTrajectory traj = solve_fundamental(bvp, lambda, steps, tol);
    Eigen::MatrixXcd A = bvp.bc.C + bvp.bc.D * traj.at_ell();
    double scale = 1.0 + A.cwiseAbs().maxCoeff();
    if (std::abs(A.determinant()) > delta_tol * std::pow(scale, n))
        fail("NotAnEigenvalue", "characteristic determinant is not small here");

    Eigen::MatrixXcd adj = detsums::adjugate(A);
    Eigen::VectorXcd col = adj.col(p);

    VectorTrajectory out;
    out.lambda = lambda;
    out.grid = traj.grid;
    out.values.reserve(traj.values.size());
    for (const auto& phi : traj.values) out.values.push_back(phi * col);
    out.nontrivial = col.cwiseAbs().maxCoeff() > 1e-10 * (1.0 + adj.cwiseAbs().maxCoeff());
    return out;
}

} // namespace diracbvp
