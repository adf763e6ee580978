#include "diracbvp/winding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "diracbvp/error.hpp"

namespace diracbvp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Node {
    Complex z, f, df;
};

struct ContourResult {
    int W = 0;
    Complex centroid{0.0, 0.0}; // first moment / W; meaningful when W > 0
};

// samples one segment at t = i/N, reusing previous nodes when doubling
void fill_edge(const AnalyticFunction& fn, Complex a, Complex b, int N, std::vector<Node>& nodes) {
    std::vector<Node> fresh(static_cast<std::size_t>(N) + 1);
    bool doubling = static_cast<int>(nodes.size()) == N / 2 + 1;
    for (int i = 0; i <= N; ++i) {
        if (doubling && i % 2 == 0) {
            fresh[i] = nodes[i / 2];
            continue;
        }
        Complex z = a + (b - a) * (double(i) / double(N));
        fresh[i] = Node{z, fn.f(z), fn.df(z)};
    }
    nodes.swap(fresh);
}

bool edge_ok(const std::vector<Node>& nodes) {
    for (const auto& n : nodes) {
        double m = std::abs(n.f);
        if (!(m > 0.0) || !std::isfinite(m) || !std::isfinite(std::abs(n.df))) return false;
    }
    return true;
}

// trapezoid of f'/f and z f'/f along the cached edge
void edge_sums(const std::vector<Node>& nodes, Complex& wind, Complex& moment) {
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        Complex g0 = nodes[i].df / nodes[i].f;
        Complex g1 = nodes[i + 1].df / nodes[i + 1].f;
        Complex dz = nodes[i + 1].z - nodes[i].z;
        wind += 0.5 * (g0 + g1) * dz;
        moment += 0.5 * (nodes[i].z * g0 + nodes[i + 1].z * g1) * dz;
    }
}

std::optional<ContourResult> try_contour(const AnalyticFunction& fn, const Box& box) {
    Complex c0(box.re_lo, box.im_lo), c1(box.re_hi, box.im_lo), c2(box.re_hi, box.im_hi),
        c3(box.re_lo, box.im_hi);
    const Complex corners[5] = {c0, c1, c2, c3, c0};

    double per_rad = std::max(box.width(), box.height()) * fn.phase_scale;
    int N = 16;
    while (N < per_rad * 4.0 && N < 4096) N *= 2;

    // a zero close to the boundary makes the trapezoid drift slowly, so a
    // single pair of agreeing refinements is not trustworthy: require three
    std::vector<Node> edges[4];
    int last_round = std::numeric_limits<int>::min();
    int agreements = 0;
    for (; N <= (1 << 16); N *= 2) {
        Complex wind(0.0, 0.0), moment(0.0, 0.0);
        for (int e = 0; e < 4; ++e) {
            fill_edge(fn, corners[e], corners[e + 1], N, edges[e]);
            if (!edge_ok(edges[e])) return std::nullopt;
            edge_sums(edges[e], wind, moment);
        }
        wind /= Complex(0.0, kTwoPi);
        moment /= Complex(0.0, kTwoPi);
        double w = wind.real();
        int rounded = static_cast<int>(std::lround(w));
        bool close = std::abs(w - rounded) < 0.2 && std::abs(wind.imag()) < 0.2;
        if (close && rounded == last_round) {
            if (++agreements >= 2) {
                ContourResult r;
                r.W = rounded;
                r.centroid = (rounded > 0) ? moment / double(rounded) : box.center();
                return r;
            }
        } else {
            agreements = 0;
        }
        last_round = close ? rounded : std::numeric_limits<int>::min();
    }
    return std::nullopt;
}

Box jittered(const Box& box, int attempt) {
    double dr = box.width(), di = box.height();
    double g = 0.011 * attempt;
    Box b = box;
    b.re_lo -= g * dr * 1.03;
    b.re_hi += g * dr * 0.97;
    b.im_lo -= g * di * 0.89;
    b.im_hi += g * di * 1.07;
    return b;
}

// multiplicity-corrected steps m * f / f' restore quadratic convergence at an
// m-fold zero (plain Newton would crawl linearly and stall at the noise floor)
std::optional<Complex> newton_polish(const AnalyticFunction& fn, Complex z0, double tol,
                                     double escape, double mult = 1.0) {
    Complex z = z0;
    for (int it = 0; it < 64; ++it) {
        Complex fz = fn.f(z);
        Complex dz = fn.df(z);
        if (!(std::abs(dz) > 0.0)) return std::nullopt;
        Complex step = mult * fz / dz;
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return std::nullopt;
        if (std::abs(z - z0) > escape) return std::nullopt;
        if (std::abs(step) <= tol * (1.0 + std::abs(z))) return z;
    }
    return std::nullopt;
}

// cluster positions come from the contour moment; sharpen them when the
// cluster is actually one multiple zero
Complex polish_cluster(const AnalyticFunction& fn, const Box& box, Complex at, int mult,
                       double tol, double diam) {
    auto polished = newton_polish(fn, at, tol, 4.0 * diam + 1.0, double(mult));
    if (polished && box.contains(*polished, 2.0 * diam) &&
        std::abs(fn.f(*polished)) <= std::abs(fn.f(at)))
        return *polished;
    return at;
}

void push_merged(std::vector<LocatedZero>& out, LocatedZero z) {
    for (auto& existing : out)
        if (std::abs(existing.lambda - z.lambda) < 1e-9 * (1.0 + std::abs(z.lambda))) {
            existing.multiplicity += z.multiplicity;
            existing.residual = std::max(existing.residual, z.residual);
            return;
        }
    out.push_back(z);
}

void recurse_zeros(const AnalyticFunction& fn, const Box& box, int expected,
                   std::vector<LocatedZero>& out, double newton_tol, double cluster_diameter,
                   int depth) {
    if (expected <= 0) return;
    double diam = std::hypot(box.width(), box.height());
    double scale = 1.0 + std::abs(box.center());

    if (expected == 1) {
        // only a strictly interior Newton limit is accepted: with any slack a
        // run from an off-center start can drift into a neighbor's basin and
        // silently merge two distinct zeros
        double escape = 4.0 * diam + 1.0;
        auto z = newton_polish(fn, box.center(), newton_tol, escape);
        if (!z || !box.contains(*z, 0.0)) {
            auto contour = try_contour(fn, box);
            if (contour && contour->W == 1)
                z = newton_polish(fn, contour->centroid, newton_tol, escape);
            if (z && !box.contains(*z, 0.0)) {
                // a zero sitting on the (outer) window boundary is still this
                // box's zero when it only just grazes the edge
                if (!box.contains(*z, 1e-9 * scale)) z = std::nullopt;
            }
            if (!z) {
                Complex at = contour ? contour->centroid : box.center();
                if (!box.contains(at, 0.0)) at = box.center();
                push_merged(out, LocatedZero{at, 1, std::abs(fn.f(at))});
                return;
            }
        }
        push_merged(out, LocatedZero{*z, 1, std::abs(fn.f(*z))});
        return;
    }

    if (diam < cluster_diameter * scale || depth > 64) {
        auto contour = try_contour(fn, box);
        Complex at = contour ? contour->centroid : box.center();
        if (!box.contains(at, 0.0)) at = box.center();
        at = polish_cluster(fn, box, at, expected, newton_tol, diam);
        push_merged(out, LocatedZero{at, expected, std::abs(fn.f(at))});
        return;
    }

    // cut fractions stay away from the center: once bisection has converged
    // onto a multiple zero the center region is exactly where cuts fail
    const double fractions[5] = {0.5, 0.38, 0.62, 0.29, 0.71};
    bool long_re = box.width() >= box.height();
    for (int axis = 0; axis < 2; ++axis) {
        bool split_re = (axis == 0) ? long_re : !long_re;
        for (double fr : fractions) {
            Box a = box, b = box;
            if (split_re) {
                double cut = box.re_lo + fr * box.width();
                a.re_hi = cut;
                b.re_lo = cut;
            } else {
                double cut = box.im_lo + fr * box.height();
                a.im_hi = cut;
                b.im_lo = cut;
            }
            auto ra = try_contour(fn, a);
            if (!ra) continue;
            auto rb = try_contour(fn, b);
            if (!rb) continue;
            if (ra->W + rb->W != expected) continue;
            recurse_zeros(fn, a, ra->W, out, newton_tol, cluster_diameter, depth + 1);
            recurse_zeros(fn, b, rb->W, out, newton_tol, cluster_diameter, depth + 1);
            return;
        }
    }

    // no admissible cut on either axis: report the unresolved cluster honestly
    auto contour = try_contour(fn, box);
    Complex at = contour ? contour->centroid : box.center();
    if (!box.contains(at, 0.0)) at = box.center();
    at = polish_cluster(fn, box, at, expected, newton_tol, diam);
    push_merged(out, LocatedZero{at, expected, std::abs(fn.f(at))});
}

} // namespace

int winding_number(const AnalyticFunction& fn, Box box) {
    for (int attempt = 0; attempt <= 5; ++attempt) {
        auto r = try_contour(fn, attempt == 0 ? box : jittered(box, attempt));
        if (r) return r->W;
    }
    fail("ContourThroughZero", "contour integral would not stabilize after jittering");
}

std::vector<LocatedZero> analytic_zeros(const AnalyticFunction& fn, Box box, double newton_tol,
                                        double cluster_diameter) {
    std::vector<LocatedZero> out;
    int total = 0;
    Box used = box;
    bool have = false;
    for (int attempt = 0; attempt <= 5 && !have; ++attempt) {
        used = attempt == 0 ? box : jittered(box, attempt);
        auto r = try_contour(fn, used);
        if (r) {
            total = r->W;
            have = true;
        }
    }
    if (!have) fail("ContourThroughZero", "window boundary would not stabilize after jittering");
    if (total < 0) fail("WindingMismatch", "negative winding: function is not analytic here");

    recurse_zeros(fn, used, total, out, newton_tol, cluster_diameter, 0);

    int found = 0;
    for (const auto& z : out) found += z.multiplicity;
    if (found != total)
        fail("WindingMismatch", "refined multiplicities " + std::to_string(found) +
                                    " != contour count " + std::to_string(total));
    std::sort(out.begin(), out.end(), [](const LocatedZero& a, const LocatedZero& b) {
        if (a.lambda.real() != b.lambda.real()) return a.lambda.real() < b.lambda.real();
        return a.lambda.imag() < b.lambda.imag();
    });
    return out;
}

} // namespace diracbvp
