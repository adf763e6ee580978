#include "diracbvp/classify.hpp"

#include <cmath>
#include <numeric>

#include "diracbvp/error.hpp"

namespace diracbvp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

enum class PairOutcome { Strict, NotStrict, Undecidable };

struct PairVerdict {
    PairOutcome outcome;
    std::string reason;
};

std::string pair_name(int j, int k) {
    return "(" + std::to_string(j + 1) + "," + std::to_string(k + 1) + ")";
}

// gcd of the two exponents as a real number, available only by declaration
std::optional<double> declared_gcd(const std::optional<RationalDecl>& decl, int j, int k) {
    if (!decl) return std::nullopt;
    long long mj = std::llabs(decl->multipliers[j]);
    long long mk = std::llabs(decl->multipliers[k]);
    return decl->unit * double(std::gcd(mj, mk));
}

PairVerdict test_pair(double sj, Complex tj, double sk, Complex tk, std::optional<double> gcd_jk,
                      int j, int k) {
    double lj = std::log(std::abs(tj)), lk = std::log(std::abs(tk));
    double ln_gap = std::abs(sj * lk - sk * lj);
    double ln_scale = 1.0 + std::abs(sj * lk) + std::abs(sk * lj);
    if (ln_gap > 1e-12 * ln_scale)
        return {PairOutcome::Strict, "pair " + pair_name(j, k) + ": moduli separate"};

    double psi = sj * std::arg(tk) - sk * std::arg(tj);
    double psi_scale = 1.0 + std::abs(sj * std::arg(tk)) + std::abs(sk * std::arg(tj));
    if (std::abs(psi) < 1e-12 * psi_scale)
        return {PairOutcome::NotStrict, "pair " + pair_name(j, k) + ": exponents resonate"};

    if (!gcd_jk)
        return {PairOutcome::Undecidable,
                "pair " + pair_name(j, k) +
                    ": phase residue needs a declared rational dependency of the exponents"};

    double r = psi / (kTwoPi * *gcd_jk);
    double dist = std::abs(r - std::round(r));
    double r_scale = 1.0 + std::abs(r);
    if (dist < 1e-9 * r_scale)
        return {PairOutcome::NotStrict,
                "pair " + pair_name(j, k) + ": phase residue is an integer"};
    if (dist < 1e-7 * r_scale)
        return {PairOutcome::Undecidable,
                "pair " + pair_name(j, k) + ": phase residue too close to an integer to call"};
    return {PairOutcome::Strict, "pair " + pair_name(j, k) + ": phase residue separates"};
}

void check_decl(const std::optional<RationalDecl>& decl, const std::vector<double>& s,
                const char* what) {
    if (!decl) return;
    if (!(decl->unit > 0.0)) fail("BadRepresentation", "declared unit must be positive");
    if (decl->multipliers.size() != s.size())
        fail("OrderMismatch", std::string("declaration covers a different number of ") + what);
    for (std::size_t k = 0; k < s.size(); ++k) {
        double target = decl->unit * double(decl->multipliers[k]);
        if (std::abs(s[k] - target) > 1e-9 * (1.0 + std::abs(s[k])))
            fail("NotCommensurable", std::string(what) + " " + std::to_string(k + 1) +
                                         " does not match its declared multiple");
        if (decl->multipliers[k] == 0)
            fail("BadRepresentation", "declared multiplier must be nonzero");
    }
}

StrictRegularityVerdict classify_pairs(const std::vector<double>& s,
                                       const std::vector<Complex>& t,
                                       const std::optional<RationalDecl>& decl) {
    StrictRegularityVerdict verdict;
    bool undecidable = false;
    std::string undecidable_reason;
    for (std::size_t j = 0; j < s.size(); ++j)
        for (std::size_t k = j + 1; k < s.size(); ++k) {
            PairVerdict pv = test_pair(s[j], t[j], s[k], t[k], declared_gcd(decl, int(j), int(k)),
                                       int(j), int(k));
            if (pv.outcome == PairOutcome::NotStrict)
                return {RegularityClass::RegularNotStrict, pv.reason};
            if (pv.outcome == PairOutcome::Undecidable && !undecidable) {
                undecidable = true;
                undecidable_reason = pv.reason;
            }
        }
    if (undecidable) return {RegularityClass::UndecidableNumeric, undecidable_reason};
    return {RegularityClass::StrictlyRegular, "all exponent pairs separate"};
}

} // namespace

StrictRegularityVerdict classify_quasi_periodic(const std::vector<Complex>& c,
                                                const std::vector<double>& b,
                                                std::optional<RationalDecl> decl) {
    if (c.size() != b.size()) fail("OrderMismatch", "one coefficient per channel");
    if (c.empty()) fail("OrderMismatch", "empty problem");
    for (std::size_t k = 0; k < c.size(); ++k)
        if (!(std::abs(c[k]) > 0.0))
            return {RegularityClass::NotRegular,
                    "coefficient " + std::to_string(k + 1) + " vanishes"};
    for (double bk : b)
        if (!(std::abs(bk) > 0.0)) fail("BadRepresentation", "every exponent must be nonzero");
    check_decl(decl, b, "exponents");
    return classify_pairs(b, c, decl);
}

StrictRegularityVerdict classify_separated(const std::vector<Complex>& c,
                                           const std::vector<Complex>& d,
                                           const std::vector<double>& b,
                                           std::optional<RationalDecl> decl) {
    const std::size_t n = b.size();
    if (c.size() != n || d.size() != n) fail("OrderMismatch", "c, d, b must have equal length");
    if (n == 0 || n % 2 != 0) fail("OrderMismatch", "separated conditions need n = 2N channels");
    for (std::size_t k = 0; k < n; k += 2)
        if (!(b[k] < 0.0 && b[k + 1] > 0.0))
            fail("SignPatternViolated",
                 "pair " + std::to_string(k / 2 + 1) + " must couple a negative and a positive "
                 "exponent, in that order");

    const std::size_t N = n / 2;
    std::vector<double> sigma(N);
    std::vector<Complex> tau(N);
    for (std::size_t k = 0; k < N; ++k) {
        Complex denom = c[2 * k] * d[2 * k + 1];
        Complex numer = c[2 * k + 1] * d[2 * k];
        if (!(std::abs(denom) > 0.0) || !(std::abs(numer) > 0.0))
            return {RegularityClass::NotRegular,
                    "pair " + std::to_string(k + 1) + " has a vanishing boundary coefficient"};
        sigma[k] = b[2 * k + 1] - b[2 * k];
        tau[k] = numer / denom;
    }

    std::optional<RationalDecl> sigma_decl;
    if (decl) {
        check_decl(decl, b, "exponents");
        sigma_decl = RationalDecl{decl->unit, {}};
        for (std::size_t k = 0; k < N; ++k)
            sigma_decl->multipliers.push_back(decl->multipliers[2 * k + 1] -
                                              decl->multipliers[2 * k]);
    }
    return classify_pairs(sigma, tau, sigma_decl);
}

} // namespace diracbvp
