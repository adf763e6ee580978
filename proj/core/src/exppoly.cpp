#include "diracbvp/exppoly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "diracbvp/error.hpp"

namespace diracbvp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

ExponentialPolynomial::ExponentialPolynomial(std::vector<ExpTerm> terms, double merge_tol) {
    std::sort(terms.begin(), terms.end(),
              [](const ExpTerm& a, const ExpTerm& b) { return a.sigma < b.sigma; });
    double scale = 1.0;
    for (const auto& t : terms) scale = std::max(scale, std::abs(t.sigma));
    for (const auto& t : terms) {
        if (!terms_.empty() && std::abs(t.sigma - terms_.back().sigma) <= merge_tol * scale)
            terms_.back().gamma += t.gamma;
        else
            terms_.push_back(t);
    }
    terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                [](const ExpTerm& t) { return std::abs(t.gamma) == 0.0; }),
                 terms_.end());
}

double ExponentialPolynomial::min_exponent() const {
    if (terms_.empty()) fail("InsufficientTerms", "exponential sum has no terms");
    return terms_.front().sigma;
}

double ExponentialPolynomial::max_exponent() const {
    if (terms_.empty()) fail("InsufficientTerms", "exponential sum has no terms");
    return terms_.back().sigma;
}

Complex ExponentialPolynomial::eval(Complex lambda) const {
    Complex s(0.0, 0.0);
    const Complex il = Complex(0.0, 1.0) * lambda;
    for (const auto& t : terms_) s += t.gamma * std::exp(il * t.sigma);
    return s;
}

Complex ExponentialPolynomial::derivative(Complex lambda) const {
    Complex s(0.0, 0.0);
    const Complex il = Complex(0.0, 1.0) * lambda;
    for (const auto& t : terms_) s += t.gamma * Complex(0.0, t.sigma) * std::exp(il * t.sigma);
    return s;
}

namespace {

struct Candidate {
    Complex lambda;
    int multiplicity;
};

std::vector<Candidate> companion_candidates(const ExponentialPolynomial& poly, double re_lo,
                                            double re_hi, double strip, double unit) {
    if (!(unit > 0.0)) fail("BadRepresentation", "frequency unit must be positive");

    long long m_min = 0, m_max = 0;
    std::vector<long long> index(poly.size());
    for (std::size_t j = 0; j < poly.size(); ++j) {
        double s = poly.terms()[j].sigma;
        long long m = std::llround(s / unit);
        if (std::abs(s - double(m) * unit) > 1e-9 * (1.0 + std::abs(s)))
            fail("NotCommensurable", "frequency " + std::to_string(s) +
                                         " is not an integer multiple of the declared unit");
        index[j] = m;
        if (j == 0) m_min = m_max = m;
        m_min = std::min(m_min, m);
        m_max = std::max(m_max, m);
    }
    long long degree = m_max - m_min;
    if (degree <= 0) fail("InsufficientTerms", "all frequencies coincide under the declared unit");
    if (degree > 4096) fail("BadRepresentation", "declared unit is too fine for this sum");

    std::vector<Complex> coeff(static_cast<std::size_t>(degree) + 1, Complex(0.0, 0.0));
    for (std::size_t j = 0; j < poly.size(); ++j)
        coeff[static_cast<std::size_t>(index[j] - m_min)] += poly.terms()[j].gamma;

    // monic companion matrix in z = e^{i lambda unit}
    const std::size_t d = static_cast<std::size_t>(degree);
    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(degree, degree);
    for (std::size_t r = 1; r < d; ++r) comp(r, r - 1) = Complex(1.0, 0.0);
    for (std::size_t r = 0; r < d; ++r) comp(r, d - 1) = -coeff[r] / coeff[d];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
    if (solver.info() != Eigen::Success) fail("IntegrationFailure", "companion eigensolver failed");

    // cluster multiple roots: the eigensolver splits an m-fold root into a
    // tight cloud, so group within 1e-6 before lifting to lambda
    std::vector<Complex> roots(solver.eigenvalues().data(),
                               solver.eigenvalues().data() + degree);
    std::vector<std::pair<Complex, int>> clusters; // (sum, count)
    for (Complex z : roots) {
        bool placed = false;
        for (auto& c : clusters) {
            Complex mean = c.first / double(c.second);
            if (std::abs(z - mean) < 1e-6 * (1.0 + std::abs(mean))) {
                c.first += z;
                ++c.second;
                placed = true;
                break;
            }
        }
        if (!placed) clusters.emplace_back(z, 1);
    }

    std::vector<Candidate> out;
    for (const auto& c : clusters) {
        Complex z0 = c.first / double(c.second);
        double mag = std::abs(z0);
        if (!(mag > 1e-300)) continue; // constant coefficient is nonzero, z = 0 is impossible
        double im = -std::log(mag) / unit;
        if (std::abs(im) > strip + 1e-6 * (1.0 + strip)) continue;
        double arg = std::arg(z0);
        double margin = 1e-9 * (1.0 + std::max(std::abs(re_lo), std::abs(re_hi)));
        long long k_lo = static_cast<long long>(std::ceil((re_lo - margin) * unit / kTwoPi - arg / kTwoPi));
        long long k_hi = static_cast<long long>(std::floor((re_hi + margin) * unit / kTwoPi - arg / kTwoPi));
        for (long long k = k_lo; k <= k_hi; ++k) {
            double re = (arg + kTwoPi * double(k)) / unit;
            out.push_back(Candidate{Complex(re, im), c.second});
        }
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

} // namespace

std::vector<LocatedZero> exp_poly_zeros(const ExponentialPolynomial& poly, double re_lo,
                                        double re_hi, double strip,
                                        std::optional<CommensurableFrequencies> decl, double tol) {
    if (poly.size() < 2)
        fail("InsufficientTerms", "an exponential sum needs at least two terms to vanish");
    if (!(re_hi > re_lo) || !(strip >= 0.0))
        fail("BadRepresentation", "empty search window");

    AnalyticFunction fn;
    fn.f = [&poly](Complex z) { return poly.eval(z); };
    fn.df = [&poly](Complex z) { return poly.derivative(z); };
    fn.phase_scale = std::max(std::abs(poly.min_exponent()), std::abs(poly.max_exponent()));

    std::vector<LocatedZero> out;
    if (!decl) {
        Box window{re_lo, re_hi, -strip, strip};
        for (const auto& z : analytic_zeros(fn, window, tol)) {
            double margin = 1e-9 * (1.0 + std::abs(z.lambda));
            if (z.lambda.real() < re_lo - margin || z.lambda.real() > re_hi + margin) continue;
            if (std::abs(z.lambda.imag()) > strip + margin) continue;
            out.push_back(z);
        }
        return out;
    }

    auto candidates = companion_candidates(poly, re_lo, re_hi, strip, decl->unit);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const Candidate& c = candidates[i];
        double r = 0.02 * (1.0 + std::abs(c.lambda));
        for (std::size_t j = 0; j < candidates.size(); ++j) {
            if (j == i) continue;
            double dist = std::abs(candidates[j].lambda - c.lambda);
            if (dist > 0.0) r = std::min(r, 0.35 * dist);
        }
        r = std::max(r, 1e-8 * (1.0 + std::abs(c.lambda)));
        Box small{c.lambda.real() - r, c.lambda.real() + r, c.lambda.imag() - r,
                  c.lambda.imag() + r};
        // multiple zeros are noise-limited to ~1e-8 (|f| grows quadratically
        // off the zero), so anything tighter would split them spuriously
        auto confirmed = analytic_zeros(fn, small, tol, 1e-7);
        int found = 0;
        for (const auto& z : confirmed) found += z.multiplicity;
        if (found != c.multiplicity)
            fail("WindingMismatch",
                 "contour count " + std::to_string(found) + " near Re lambda = " +
                     std::to_string(c.lambda.real()) + " disagrees with companion multiplicity " +
                     std::to_string(c.multiplicity));
        for (const auto& z : confirmed) {
            double margin = 1e-9 * (1.0 + std::abs(z.lambda));
            if (z.lambda.real() < re_lo - margin || z.lambda.real() > re_hi + margin) continue;
            if (std::abs(z.lambda.imag()) > strip + margin) continue;
            bool merged = false;
            for (auto& e : out)
                if (std::abs(e.lambda - z.lambda) < 1e-10 * (1.0 + std::abs(z.lambda))) {
                    merged = true;
                    break;
                }
            if (!merged) out.push_back(z);
        }
    }
    std::sort(out.begin(), out.end(), [](const LocatedZero& a, const LocatedZero& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

} // namespace diracbvp
