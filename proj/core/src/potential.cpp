#include "diracbvp/potential.hpp"

#include <algorithm>

#include "diracbvp/error.hpp"

namespace diracbvp {

PotentialMatrix::PotentialMatrix(int n) : n_(n), entries_(std::size_t(n) * n) {}

PotentialMatrix PotentialMatrix::from_entries(int n, std::vector<ScalarFunction> row_major) {
    if (static_cast<int>(row_major.size()) != n * n)
        fail("DimensionMismatch", "expected n*n entries");
    PotentialMatrix q;
    q.n_ = n;
    q.entries_ = std::move(row_major);
    return q;
}

PotentialMatrix PotentialMatrix::from_callable(
    int n, std::function<Eigen::MatrixXcd(double)> eval,
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> zero_mask, std::vector<double> breakpoints) {
    PotentialMatrix q;
    q.n_ = n;
    q.callable_ = std::move(eval);
    q.zero_mask_ = std::move(zero_mask);
    q.extra_breaks_ = std::move(breakpoints);
    return q;
}

Eigen::MatrixXcd PotentialMatrix::eval(double x) const {
    Eigen::MatrixXcd m(n_, n_);
    eval_into(x, m);
    return m;
}

void PotentialMatrix::eval_into(double x, Eigen::MatrixXcd& out) const {
    if (callable_) {
        out = callable_(x);
        return;
    }
    for (int j = 0; j < n_; ++j)
        for (int k = 0; k < n_; ++k) out(j, k) = entries_[std::size_t(j) * n_ + k].eval(x);
}

Complex PotentialMatrix::entry_eval(int j, int k, double x) const {
    if (callable_) {
        if (zero_mask_.size() && zero_mask_(j, k)) return {0.0, 0.0};
        return callable_(x)(j, k);
    }
    return entries_[std::size_t(j) * n_ + k].eval(x);
}

const ScalarFunction& PotentialMatrix::entry(int j, int k) const {
    if (callable_) fail("BadRepresentation", "callable potential has no per-entry representation");
    return entries_[std::size_t(j) * n_ + k];
}

void PotentialMatrix::set_entry(int j, int k, ScalarFunction f) {
    if (callable_) fail("BadRepresentation", "callable potential is immutable");
    entries_[std::size_t(j) * n_ + k] = std::move(f);
}

bool PotentialMatrix::entry_is_zero(int j, int k) const {
    if (callable_) return zero_mask_.size() ? zero_mask_(j, k) : false;
    return entries_[std::size_t(j) * n_ + k].is_structurally_zero();
}

std::vector<double> PotentialMatrix::interior_breakpoints(double a, double b) const {
    std::vector<double> xs = extra_breaks_;
    xs.erase(std::remove_if(xs.begin(), xs.end(), [&](double x) { return x <= a || x >= b; }),
             xs.end());
    for (const auto& e : entries_)
        for (double x : e.interior_breakpoints(a, b)) xs.push_back(x);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

double PotentialMatrix::sup_norm(double a, double b, int grid) const {
    double m = 0.0;
    if (callable_) {
        for (int i = 0; i <= grid; ++i) {
            double x = a + (b - a) * double(i) / double(grid);
            m = std::max(m, callable_(x).cwiseAbs().maxCoeff());
        }
        return m;
    }
    for (const auto& e : entries_) m = std::max(m, e.sup_norm(a, b, grid));
    return m;
}

double PotentialMatrix::l1_norm(double a, double b, int grid) const {
    if (callable_) {
        if (grid % 2) ++grid;
        double h = (b - a) / grid, s = 0.0;
        auto f = [&](double x) { return callable_(x).cwiseAbs().maxCoeff(); };
        s = f(a) + f(b);
        for (int i = 1; i < grid; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
        return s * h / 3.0;
    }
    double m = 0.0;
    for (const auto& e : entries_) m = std::max(m, e.l1_norm(a, b, grid));
    return m;
}

ZeroBlockDiagonalReport validate_zero_block_diagonal(const PotentialMatrix& Q,
                                                     const WeightProfile& profile) {
    if (Q.n() != profile.n()) fail("DimensionMismatch", "potential and profile dimensions differ");
    ZeroBlockDiagonalReport rep;
    for (int j = 0; j < Q.n(); ++j)
        for (int k = 0; k < Q.n(); ++k)
            if (profile.beta_equiv(j, k) && !Q.entry_is_zero(j, k)) {
                rep.ok = false;
                rep.offenders.emplace_back(j, k);
            }
    return rep;
}

} // namespace diracbvp
