#include "diracbvp/detsums.hpp"

#include <algorithm>

#include "diracbvp/error.hpp"

namespace diracbvp::detsums {

std::vector<Tuple> increasing_tuples(int n, int m) {
    std::vector<Tuple> out;
    if (m < 0 || m > n) return out;
    if (m == 0) {
        out.push_back({});
        return out;
    }
    Tuple t(m);
    for (int i = 0; i < m; ++i) t[i] = i;
    while (true) {
        out.push_back(t);
        int i = m - 1;
        while (i >= 0 && t[i] == n - m + i) --i;
        if (i < 0) break;
        ++t[i];
        for (int j = i + 1; j < m; ++j) t[j] = t[j - 1] + 1;
    }
    return out;
}

Tuple complement(const Tuple& p, int n) {
    Tuple out;
    out.reserve(n - p.size());
    std::size_t i = 0;
    for (int v = 0; v < n; ++v) {
        if (i < p.size() && p[i] == v) {
            ++i;
        } else {
            out.push_back(v);
        }
    }
    return out;
}

int index_sum(const Tuple& p) {
    int s = 0;
    for (int v : p) s += v;
    return s;
}

bool contains(const Tuple& p, int v) { return std::binary_search(p.begin(), p.end(), v); }

Complex minor_det(const Eigen::MatrixXcd& A, const Tuple& rows, const Tuple& cols) {
    if (rows.size() != cols.size()) fail("OrderMismatch", "minor needs equal row/column counts");
    const int m = static_cast<int>(rows.size());
    if (m == 0) return {1.0, 0.0};
    Eigen::MatrixXcd sub(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub(i, j) = A(rows[i], cols[j]);
    return sub.determinant();
}

Complex cofactor(const Eigen::MatrixXcd& A, int j, int k) {
    const int n = static_cast<int>(A.rows());
    Tuple rows = complement({k}, n);
    Tuple cols = complement({j}, n);
    double sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
    return sign * minor_det(A, rows, cols);
}

Eigen::MatrixXcd adjugate(const Eigen::MatrixXcd& A) {
    const int n = static_cast<int>(A.rows());
    Eigen::MatrixXcd out(n, n);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) out(j, k) = cofactor(A, j, k);
    return out;
}

Complex det_sum_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B) {
    const int n = static_cast<int>(A.rows());
    Complex total = A.determinant();
    for (int m = 1; m <= n; ++m) {
        auto tuples = increasing_tuples(n, m);
        for (const auto& q : tuples)
            for (const auto& p : tuples) {
                double sign = ((index_sum(p) + index_sum(q)) % 2 == 0) ? 1.0 : -1.0;
                total += sign * minor_det(A, complement(q, n), complement(p, n)) *
                         minor_det(B, q, p);
            }
    }
    return total;
}

Complex cauchy_binet_minor(const Eigen::MatrixXcd& B, const Eigen::MatrixXcd& C, const Tuple& q,
                           const Tuple& p) {
    const int n = static_cast<int>(B.rows());
    Complex s{0.0, 0.0};
    for (const auto& r : increasing_tuples(n, static_cast<int>(q.size())))
        s += minor_det(B, q, r) * minor_det(C, r, p);
    return s;
}

Complex det_sum_product_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                  const Eigen::MatrixXcd& C) {
    const int n = static_cast<int>(A.rows());
    Complex total = A.determinant();
    for (int m = 1; m <= n; ++m) {
        auto tuples = increasing_tuples(n, m);
        for (const auto& q : tuples)
            for (const auto& p : tuples) {
                double sign = ((index_sum(p) + index_sum(q)) % 2 == 0) ? 1.0 : -1.0;
                Complex inner{0.0, 0.0};
                for (const auto& r : tuples) inner += minor_det(B, q, r) * minor_det(C, r, p);
                total += sign * minor_det(A, complement(q, n), complement(p, n)) * inner;
            }
    }
    return total;
}

namespace {
// number of entries of p exceeding v; corrects global index sums to the
// index sums within the deleted-row/column submatrix
int count_above(const Tuple& p, int v) {
    int c = 0;
    for (int u : p)
        if (u > v) ++c;
    return c;
}
} // namespace

Complex cofactor_sum_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B, int j, int k) {
    const int n = static_cast<int>(A.rows());
    Complex total = cofactor(A, j, k);
    double base_sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
    for (int m = 1; m <= n - 1; ++m) {
        auto tuples = increasing_tuples(n, m);
        for (const auto& q : tuples) {
            if (contains(q, k)) continue;
            for (const auto& p : tuples) {
                if (contains(p, j)) continue;
                Tuple arows = complement(q, n); // drop row k: complement within the submatrix
                arows.erase(std::find(arows.begin(), arows.end(), k));
                Tuple acols = complement(p, n);
                acols.erase(std::find(acols.begin(), acols.end(), j));
                int parity = index_sum(p) + index_sum(q) + count_above(q, k) + count_above(p, j);
                double sign = (parity % 2 == 0) ? 1.0 : -1.0;
                total += base_sign * sign * minor_det(A, arows, acols) * minor_det(B, q, p);
            }
        }
    }
    return total;
}

Complex cofactor_sum_product_expansion(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                       const Eigen::MatrixXcd& C, int j, int k) {
    const int n = static_cast<int>(A.rows());
    Complex total = cofactor(A, j, k);
    double base_sign = ((j + k) % 2 == 0) ? 1.0 : -1.0;
    for (int m = 1; m <= n - 1; ++m) {
        auto tuples = increasing_tuples(n, m);
        for (const auto& q : tuples) {
            if (contains(q, k)) continue;
            for (const auto& p : tuples) {
                if (contains(p, j)) continue;
                Tuple arows = complement(q, n);
                arows.erase(std::find(arows.begin(), arows.end(), k));
                Tuple acols = complement(p, n);
                acols.erase(std::find(acols.begin(), acols.end(), j));
                int parity = index_sum(p) + index_sum(q) + count_above(q, k) + count_above(p, j);
                double sign = (parity % 2 == 0) ? 1.0 : -1.0;
                Complex inner{0.0, 0.0};
                for (const auto& r : tuples) inner += minor_det(B, q, r) * minor_det(C, r, p);
                total += base_sign * sign * minor_det(A, arows, acols) * inner;
            }
        }
    }
    return total;
}

} // namespace diracbvp::detsums
