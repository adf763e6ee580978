#include "diracbvp/riesz.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <utility>

#include "diracbvp/boundary.hpp"
#include "diracbvp/detsums.hpp"
#include "diracbvp/error.hpp"
#include "diracbvp/exppoly.hpp"

namespace diracbvp {

namespace {

constexpr Complex kI{0.0, 1.0};

// magnitude scale of an exponential-sum evaluation at lambda: sum of term
// magnitudes (optionally weighted by |sigma|, matching the derivative)
double term_scale(const ExponentialPolynomial& poly, Complex lambda, bool with_sigma) {
    double s = 0.0;
    for (const ExpTerm& t : poly.terms()) {
        double mag = std::abs(t.gamma) * std::exp(-lambda.imag() * t.sigma);
        if (with_sigma)
            mag *= std::abs(t.sigma);
        s += mag;
    }
    return s;
}

void check_mode_index(const WeightProfile& profile, int p, const char* who) {
    if (p < 0 || p >= profile.n())
        fail("IndexOutOfRange", std::string(who) + ": column index out of range");
}

void check_imag_range(const WeightProfile& profile, Complex lambda) {
    double bmax = 0.0;
    for (int k = 0; k < profile.n(); ++k)
        bmax = std::max(bmax, std::abs(profile.b(k)));
    if (std::abs(lambda.imag()) * bmax > 300.0)
        fail("NonFiniteValue", "mode phases overflow at this imaginary part");
}

WeightedVectorFunction mode_from_column(std::shared_ptr<const WeightProfile> profile,
                                        const std::vector<double>& grid,
                                        const Eigen::VectorXcd& column, Complex lambda) {
    WeightedVectorFunction f;
    f.profile = std::move(profile);
    f.grid = grid;
    f.values.reserve(grid.size());
    const int n = f.profile->n();
    for (double x : grid) {
        Eigen::VectorXcd v(n);
        for (int k = 0; k < n; ++k)
            v[k] = column[k] * std::exp(kI * lambda * f.profile->rho(k, x));
        f.values.push_back(std::move(v));
    }
    return f;
}

// Delta0'(lambda) = i b_- Delta0 + i sum_k |b_k| e^{i lambda b_k^+} adj_kk
Complex delta0_prime_from_adjugate(const WeightProfile& profile, Complex delta0,
                                   const Eigen::MatrixXcd& adj, Complex lambda) {
    Complex acc = profile.b_minus() * delta0;
    for (int k = 0; k < profile.n(); ++k) {
        const double bk_plus = std::max(profile.b(k), 0.0);
        acc += std::abs(profile.b(k)) * std::exp(kI * lambda * bk_plus) * adj(k, k);
    }
    return kI * acc;
}

} // namespace

Eigen::MatrixXcd unperturbed_characteristic_matrix(const WeightProfile& profile,
                                                   const Eigen::MatrixXcd& C,
                                                   const Eigen::MatrixXcd& D, Complex lambda) {
    const int n = profile.n();
    if (C.rows() != n || C.cols() != n || D.rows() != n || D.cols() != n)
        fail("BadRepresentation", "boundary matrices must be n x n");
    Eigen::MatrixXcd A = C;
    for (int k = 0; k < n; ++k)
        A.col(k) += D.col(k) * std::exp(kI * lambda * profile.b(k));
    return A;
}

WeightedVectorFunction unperturbed_mode(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                        const Eigen::MatrixXcd& D, Complex lambda, int p,
                                        int grid_intervals) {
    check_mode_index(profile, p, "unperturbed_mode");
    check_imag_range(profile, lambda);
    const Eigen::MatrixXcd adj =
        detsums::adjugate(unperturbed_characteristic_matrix(profile, C, D, lambda));
    return mode_from_column(std::make_shared<const WeightProfile>(profile),
                            uniform_grid(profile.ell(), grid_intervals), adj.col(p), lambda);
}

WeightedVectorFunction adjoint_unperturbed_mode(const WeightProfile& profile,
                                                const Eigen::MatrixXcd& C,
                                                const Eigen::MatrixXcd& D, Complex mu, int q,
                                                int grid_intervals) {
    check_mode_index(profile, q, "adjoint_unperturbed_mode");
    check_imag_range(profile, mu);
    const BoundaryPair star = adjoint_boundary_pair(BoundaryPair{C, D}, profile);
    const Eigen::MatrixXcd adj =
        detsums::adjugate(unperturbed_characteristic_matrix(profile, star.C, star.D, mu));
    return mode_from_column(std::make_shared<const WeightProfile>(profile),
                            uniform_grid(profile.ell(), grid_intervals), adj.col(q), mu);
}

PairingIdentity pairing_identity(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                 const Eigen::MatrixXcd& D, Complex lambda, int p, int q,
                                 int grid_intervals) {
    if (!is_canonical(BoundaryPair{C, D}, profile))
        fail("NotCanonical", "pairing identity requires the canonical boundary pair");
    check_mode_index(profile, p, "pairing_identity");
    check_mode_index(profile, q, "pairing_identity");
    check_imag_range(profile, lambda);

    const Eigen::MatrixXcd A0 = unperturbed_characteristic_matrix(profile, C, D, lambda);
    const Eigen::MatrixXcd adj = detsums::adjugate(A0);
    const Complex delta0 = A0.determinant();

    const ExponentialPolynomial poly = delta0_expansion(C, D, profile);
    const double scale0 = term_scale(poly, lambda, false);
    const double scale1 = term_scale(poly, lambda, true);
    if (std::abs(delta0) > 1e-6 * std::max(scale0, 1e-300))
        fail("NotSimpleZero", "lambda is not a zero of the reduced determinant");

    PairingIdentity out;
    out.delta0 = delta0;
    out.a_qp = adj(q, p);
    out.delta0_prime = delta0_prime_from_adjugate(profile, delta0, adj, lambda);
    if (std::abs(out.delta0_prime) <= 1e-8 * std::max(scale1, 1e-300))
        fail("NotSimpleZero", "reduced determinant has a multiple zero here");

    const double b_total = profile.b_minus() + profile.b_plus();
    const Complex E = std::exp(-kI * lambda * b_total);
    const double bq_minus = std::min(profile.b(q), 0.0);
    out.rhs = -kI * E * std::exp(kI * lambda * bq_minus) * out.a_qp * out.delta0_prime;

    const WeightedVectorFunction f = unperturbed_mode(profile, C, D, lambda, p, grid_intervals);
    const WeightedVectorFunction fs =
        adjoint_unperturbed_mode(profile, C, D, std::conj(lambda), q, grid_intervals);
    out.lhs = weighted_inner_product(f, fs);
    out.residual = std::abs(out.lhs - out.rhs);
    return out;
}

double pairing_identity_residual(const WeightProfile& profile, const Eigen::MatrixXcd& C,
                                 const Eigen::MatrixXcd& D, Complex lambda, int p, int q,
                                 int grid_intervals) {
    return pairing_identity(profile, C, D, lambda, p, q, grid_intervals).residual;
}

BiorthogonalSet biorthogonal_normalize(const std::vector<RawEigenpair>& raw) {
    BiorthogonalSet set;
    std::vector<const RawEigenpair*> simple;
    for (const RawEigenpair& r : raw) {
        if (r.multiplicity > 1)
            set.excluded.push_back(r.lambda);
        else
            simple.push_back(&r);
    }
    if (simple.empty()) {
        set.cross.resize(0, 0);
        return set;
    }

    const WeightTable table =
        build_weight_table(*simple.front()->f.profile, simple.front()->f.grid);
    for (const RawEigenpair* r : simple) {
        const Complex pairing = weighted_inner_product(r->f, r->f_star, table);
        if (std::abs(pairing) < 1e-12)
            fail("DegeneratePairing", "pairing value below 1e-12; cannot normalize");
        BiorthogonalPair bp;
        bp.lambda = r->lambda;
        bp.f = r->f;
        bp.f_star = scaled(r->f_star, Complex(1.0, 0.0) / std::conj(pairing));
        bp.pairing_value = pairing;
        set.pairs.push_back(std::move(bp));
    }

    const Eigen::Index m = static_cast<Eigen::Index>(set.pairs.size());
    set.cross.resize(m, m);
    set.max_off_diagonal = 0.0;
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = 0; k < m; ++k) {
            set.cross(j, k) = weighted_inner_product(set.pairs[static_cast<std::size_t>(j)].f,
                                                     set.pairs[static_cast<std::size_t>(k)].f_star,
                                                     table);
            if (j != k)
                set.max_off_diagonal = std::max(set.max_off_diagonal, std::abs(set.cross(j, k)));
        }
    }
    return set;
}

double uniform_minimality_index(const std::vector<BiorthogonalPair>& pairs) {
    double index = 0.0;
    for (const BiorthogonalPair& p : pairs)
        index = std::max(index, weighted_norm(p.f) * weighted_norm(p.f_star));
    return index;
}

namespace {

double gram_condition_impl(const std::vector<WeightedVectorFunction>& vectors,
                           const WeightTable* table) {
    const Eigen::Index m = static_cast<Eigen::Index>(vectors.size());
    if (m == 0)
        return 1.0;
    Eigen::MatrixXcd G(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        for (Eigen::Index k = j; k < m; ++k) {
            const Complex v =
                table ? weighted_inner_product(vectors[static_cast<std::size_t>(j)],
                                               vectors[static_cast<std::size_t>(k)], *table)
                      : weighted_inner_product(vectors[static_cast<std::size_t>(j)],
                                               vectors[static_cast<std::size_t>(k)]);
            G(j, k) = v;
            G(k, j) = std::conj(v);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(G);
    if (solver.info() != Eigen::Success)
        fail("NonFiniteValue", "Gram eigenvalue computation failed");
    const double lam_max = std::abs(solver.eigenvalues()(m - 1));
    const double lam_min = std::max(solver.eigenvalues()(0), 0.0);
    if (lam_max == 0.0 || lam_min == 0.0)
        return std::numeric_limits<double>::infinity();
    return lam_max / lam_min;
}

} // namespace

double gram_condition(const std::vector<WeightedVectorFunction>& vectors) {
    return gram_condition_impl(vectors, nullptr);
}

double gram_condition(const std::vector<WeightedVectorFunction>& vectors,
                      const WeightTable& table) {
    return gram_condition_impl(vectors, &table);
}

RieszDiagnostics unperturbed_riesz_diagnostics(const WeightProfile& profile,
                                               const Eigen::MatrixXcd& C,
                                               const Eigen::MatrixXcd& D,
                                               const std::vector<Eigenvalue>& eigenvalues,
                                               int grid_intervals) {
    if (!is_canonical(BoundaryPair{C, D}, profile))
        fail("NotCanonical", "riesz diagnostics require the canonical boundary pair");
    const BoundaryPair star = adjoint_boundary_pair(BoundaryPair{C, D}, profile);
    const ExponentialPolynomial poly = delta0_expansion(C, D, profile);

    const int n = profile.n();
    const std::vector<double> grid = uniform_grid(profile.ell(), grid_intervals);
    const WeightTable table = build_weight_table(profile, grid);
    auto sp = std::make_shared<const WeightProfile>(profile);

    // lambda-independent phase arguments rho_k(x_i), shared by every mode
    Eigen::MatrixXd rho_t(static_cast<Eigen::Index>(grid.size()), n);
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (int k = 0; k < n; ++k)
            rho_t(static_cast<Eigen::Index>(i), k) = profile.rho(k, grid[i]);

    auto make_mode = [&](const Eigen::VectorXcd& column, Complex lam) {
        WeightedVectorFunction f;
        f.profile = sp;
        f.grid = grid;
        f.values.reserve(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            Eigen::VectorXcd v(n);
            for (int k = 0; k < n; ++k)
                v[k] = column[k] * std::exp(kI * lam * rho_t(static_cast<Eigen::Index>(i), k));
            f.values.push_back(std::move(v));
        }
        return f;
    };

    auto best_column = [](const Eigen::MatrixXcd& adj) {
        int best = 0;
        double best_norm = -1.0;
        for (int p = 0; p < adj.cols(); ++p) {
            const double norm = adj.col(p).norm();
            if (norm > best_norm) {
                best_norm = norm;
                best = p;
            }
        }
        return best;
    };

    RieszDiagnostics out;
    std::vector<Complex> gate_failures;
    std::vector<RawEigenpair> raws;
    for (const Eigenvalue& ev : eigenvalues) {
        if (ev.multiplicity > 1) {
            raws.push_back(RawEigenpair{ev.lambda, ev.multiplicity, {}, {}});
            continue;
        }
        const double scale0 = term_scale(poly, ev.lambda, false);
        const double scale1 = term_scale(poly, ev.lambda, true);
        if (std::abs(poly.eval(ev.lambda)) > 1e-6 * std::max(scale0, 1e-300) ||
            std::abs(poly.derivative(ev.lambda)) <= 1e-8 * std::max(scale1, 1e-300)) {
            gate_failures.push_back(ev.lambda);
            continue;
        }
        const Eigen::MatrixXcd adj = detsums::adjugate(
            unperturbed_characteristic_matrix(profile, C, D, ev.lambda));
        const Eigen::MatrixXcd adjS = detsums::adjugate(
            unperturbed_characteristic_matrix(profile, star.C, star.D, std::conj(ev.lambda)));
        WeightedVectorFunction f = make_mode(adj.col(best_column(adj)), ev.lambda);
        WeightedVectorFunction fs = make_mode(adjS.col(best_column(adjS)), std::conj(ev.lambda));
        const double nf = weighted_norm(f, table);
        const double ns = weighted_norm(fs, table);
        if (nf < 1e-14 || ns < 1e-14) {
            gate_failures.push_back(ev.lambda);
            continue;
        }
        raws.push_back(RawEigenpair{ev.lambda, 1, scaled(f, Complex(1.0 / nf, 0.0)),
                                    scaled(fs, Complex(1.0 / ns, 0.0))});
    }

    out.set = biorthogonal_normalize(raws);
    out.set.excluded.insert(out.set.excluded.end(), gate_failures.begin(), gate_failures.end());

    std::vector<WeightedVectorFunction> fs_list;
    for (std::size_t idx = 0; idx < out.set.pairs.size(); ++idx) {
        const BiorthogonalPair& bp = out.set.pairs[idx];
        RieszDiagnosticsRow row;
        row.index = static_cast<int>(idx);
        row.lambda = bp.lambda;
        row.norm_f = weighted_norm(bp.f, table);
        row.norm_f_star = weighted_norm(bp.f_star, table);
        row.product = row.norm_f * row.norm_f_star;
        out.rows.push_back(row);
        out.minimality_index = std::max(out.minimality_index, row.product);
        fs_list.push_back(bp.f);
    }
    out.gram_cond = gram_condition(fs_list, table);
    return out;
}

} // namespace diracbvp
