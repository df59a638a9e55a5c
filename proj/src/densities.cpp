#include "osel/densities.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace osel {

namespace {

constexpr double kTwoThirds = 2.0 / 3.0;

// Bisection on [lo, hi] for a residual positive at lo and negative at hi.
double bisect_decreasing(const std::function<double(double)>& f, double lo, double hi) {
    for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (f(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double a = std::abs(f(lo));
    const double b = std::abs(f(hi));
    return a <= b ? lo : hi;
}

// Weight alpha + beta * x integrated against a piece's kernel.
struct Linear {
    double alpha;
    double beta;
};

double primitive(const DensityPiece& p, Linear w, double x) {
    switch (p.kind) {
        case PieceKind::reciprocal_2x_minus_1:
            return p.scale * (w.beta * x / 2.0 + (w.alpha + w.beta / 2.0) / 2.0 * std::log(2.0 * x - 1.0));
        case PieceKind::reciprocal_x:
            return p.scale * (w.alpha * std::log(x) + w.beta * x);
        case PieceKind::zero:
        case PieceKind::point_mass:
            return 0.0;
    }
    return 0.0;
}

// int_a^b (alpha + beta x) rho(x) dx restricted to piece p.
double piece_integral(const DensityPiece& p, Linear w, double a, double b) {
    if (p.kind == PieceKind::point_mass) {
        return (p.lo >= a && p.lo < b) || (b == 1.0 && p.lo == 1.0 && a <= 1.0)
                   ? w.alpha + w.beta * p.lo
                   : 0.0;
    }
    const double lo = std::max(a, p.lo);
    const double hi = std::min(b, p.hi);
    if (!(hi > lo) || p.kind == PieceKind::zero) return 0.0;
    return primitive(p, w, hi) - primitive(p, w, lo);
}

double integral(const DensitySpec& spec, Linear w, double a, double b) {
    double sum = 0.0;
    for (const auto& p : spec.pieces) sum += piece_integral(p, w, a, b);
    return sum;
}

double pdf_on_piece(const DensityPiece& p, double x) {
    switch (p.kind) {
        case PieceKind::reciprocal_2x_minus_1: return p.scale / (2.0 * x - 1.0);
        case PieceKind::reciprocal_x: return p.scale / x;
        default: return 0.0;
    }
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace

RootConstants solve_c_656() {
    auto residual = [](double c) { return std::log(1.0 / (2.0 * c - 1.0)) - 2.0 * c - 2.0; };
    RootConstants rc;
    rc.c = bisect_decreasing(residual, 0.5 + 1e-15, 1.0);
    rc.gamma = 2.0 / std::log(1.0 / (2.0 * rc.c - 1.0));
    rc.residual = residual(rc.c);
    return rc;
}

RootConstants solve_c_732() {
    auto residual = [](double c) { return 1.0 / (6.0 * c - 3.0) - std::exp(2.0 * c); };
    RootConstants rc;
    rc.c = bisect_decreasing(residual, 0.5 + 1e-15, kTwoThirds);
    rc.gamma = -2.0 / std::log(16.0 / 27.0 * (2.0 * rc.c - 1.0));
    rc.residual = residual(rc.c);
    return rc;
}

DensitySpec density_656() {
    const auto rc = solve_c_656();
    DensitySpec spec;
    spec.name = "rho-656";
    spec.c = rc.c;
    spec.gamma = rc.gamma;
    spec.pieces = {{0.5, rc.c, PieceKind::zero, 0.0},
                   {rc.c, 1.0, PieceKind::reciprocal_2x_minus_1, rc.gamma}};
    return spec;
}

DensitySpec density_732() {
    const auto rc = solve_c_732();
    DensitySpec spec;
    spec.name = "rho-732";
    spec.c = rc.c;
    spec.gamma = rc.gamma;
    spec.pieces = {{0.5, rc.c, PieceKind::zero, 0.0},
                   {rc.c, kTwoThirds, PieceKind::reciprocal_2x_minus_1, rc.gamma},
                   {kTwoThirds, 1.0, PieceKind::reciprocal_x, 2.0 * rc.gamma}};
    return spec;
}

DensitySpec point_mass_density(double x) {
    if (!(x >= 0.5 && x <= 1.0)) throw std::invalid_argument("point mass must lie in [1/2, 1]");
    DensitySpec spec;
    spec.name = "point-mass";
    spec.c = x;
    spec.pieces = {{x, x, PieceKind::point_mass, 1.0}};
    return spec;
}

double density_pdf(const DensitySpec& spec, double x) {
    if (!(x >= 0.5 && x <= 1.0)) throw std::invalid_argument("density evaluated outside [1/2, 1]");
    if (spec.is_point_mass()) throw std::invalid_argument("point mass has no density");
    // Pieces are half-open on the left except the first; x == 1 belongs to the last.
    for (const auto& p : spec.pieces) {
        if ((x > p.lo && x <= p.hi) || (x == p.lo && x == 0.5)) return pdf_on_piece(p, x);
    }
    return 0.0;
}

double density_cdf(const DensitySpec& spec, double x) {
    if (x <= 0.5) return spec.is_point_mass() && spec.pieces.front().lo <= x ? 1.0 : 0.0;
    if (spec.is_point_mass()) return x >= spec.pieces.front().lo ? 1.0 : 0.0;
    return std::min(1.0, integral(spec, {1.0, 0.0}, 0.5, std::min(x, 1.0)));
}

double density_inverse_cdf(const DensitySpec& spec, double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("inverse cdf needs u in [0, 1]");
    if (spec.is_point_mass()) return spec.pieces.front().lo;
    double before = 0.0;
    const DensityPiece* last = nullptr;
    for (const auto& p : spec.pieces) {
        if (p.kind == PieceKind::zero) continue;
        last = &p;
        const double mass = piece_integral(p, {1.0, 0.0}, p.lo, p.hi);
        if (u <= before + mass) {
            const double m = u - before;
            double x = p.lo;
            if (p.kind == PieceKind::reciprocal_2x_minus_1) {
                x = ((2.0 * p.lo - 1.0) * std::exp(2.0 * m / p.scale) + 1.0) / 2.0;
            } else if (p.kind == PieceKind::reciprocal_x) {
                x = p.lo * std::exp(m / p.scale);
            }
            return std::clamp(x, p.lo, p.hi);
        }
        before += mass;
    }
    return last ? last->hi : 1.0;
}

double density_mass_numeric(const DensitySpec& spec, double tol) {
    if (spec.is_point_mass()) return 1.0;
    double total = 0.0;
    for (const auto& p : spec.pieces) {
        if (p.kind == PieceKind::zero || !(p.hi > p.lo)) continue;
        auto f = [&p](double x) { return pdf_on_piece(p, x); };
        const double fa = f(p.lo);
        const double fb = f(p.hi);
        const double fm = f(0.5 * (p.lo + p.hi));
        const double whole = (p.hi - p.lo) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(f, p.lo, p.hi, fa, fm, fb, whole, tol, 50);
    }
    return total;
}

double sample_density(const DensitySpec& spec, Rng& rng) {
    return density_inverse_cdf(spec, rng.uniform());
}

double guarantee_lhs(const DensitySpec& spec, Envelope env, double y) {
    double lhs = integral(spec, {0.0, 1.0}, 0.5, y);
    if (env == Envelope::tva) {
        lhs += integral(spec, {1.0, -1.0}, y, 1.0);
    } else {
        // max(x/2, 1-x) switches branch at x = 2/3.
        lhs += integral(spec, {1.0, -1.0}, y, std::max(y, kTwoThirds));
        lhs += integral(spec, {0.0, 0.5}, std::max(y, kTwoThirds), 1.0);
    }
    return lhs;
}

GuaranteeCheck verify_guarantee(const DensitySpec& spec, Envelope env, int y_grid) {
    if (y_grid < 1000) throw std::invalid_argument("verify_guarantee needs y_grid >= 1000");
    std::vector<double> ys;
    ys.reserve(static_cast<std::size_t>(y_grid) + 8);
    for (int i = 0; i <= y_grid; ++i) ys.push_back(0.5 + 0.5 * i / y_grid);
    for (const auto& p : spec.pieces) {
        ys.push_back(p.lo);
        ys.push_back(p.hi);
    }
    ys.push_back(kTwoThirds);

    GuaranteeCheck best{std::numeric_limits<double>::infinity(), 0.5};
    for (double y : ys) {
        if (y < 0.5 || y > 1.0) continue;
        const double ratio = guarantee_lhs(spec, env, y) / y;
        if (ratio < best.min_ratio) best = {ratio, y};
    }
    return best;
}

}  // namespace osel
