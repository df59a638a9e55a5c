#pragma once

#include <string>
#include <vector>

#include "osel/distribution.hpp"

namespace osel {

// Randomized targeted values: g_0 = x * E[max_i v_i] with x drawn from a
// density on [1/2, 1] assembled from closed-form pieces.

enum class PieceKind {
    zero,
    reciprocal_2x_minus_1,  // scale / (2x - 1)
    reciprocal_x,           // scale / x
    point_mass,             // all mass at lo == hi
};

struct DensityPiece {
    double lo = 0.5;
    double hi = 1.0;
    PieceKind kind = PieceKind::zero;
    double scale = 0.0;
};

struct DensitySpec {
    std::string name;
    std::vector<DensityPiece> pieces;
    double c = 0.5;
    double gamma = 0.0;

    bool is_point_mass() const {
        return pieces.size() == 1 && pieces.front().kind == PieceKind::point_mass;
    }
};

struct RootConstants {
    double c = 0.0;
    double gamma = 0.0;
    double residual = 0.0;
};

/// Root of ln(1/(2c-1)) - 2c = 2 on (1/2, 1); gamma = 2 / ln(1/(2c-1)).
RootConstants solve_c_656();

/// Root of 1/(6c-3) = e^{2c} on (1/2, 2/3); gamma = -2 / ln(16/27 (2c-1)).
RootConstants solve_c_732();

/// Zero on [1/2, c), gamma / (2x-1) on [c, 1].
DensitySpec density_656();

/// gamma / (2x-1) on (c, 2/3], 2 gamma / x on (2/3, 1].
DensitySpec density_732();

DensitySpec point_mass_density(double x);

double density_pdf(const DensitySpec& spec, double x);

/// Closed-form mass on [1/2, x].
double density_cdf(const DensitySpec& spec, double x);

/// Closed-form inverse of density_cdf; u = 0 maps to the left edge of the support.
double density_inverse_cdf(const DensitySpec& spec, double u);

/// Total mass by adaptive Simpson quadrature of density_pdf, piece by piece.
double density_mass_numeric(const DensitySpec& spec, double tol = 1e-12);

double sample_density(const DensitySpec& spec, Rng& rng);

/// Lower envelope of the per-target guarantee when g_0 overestimates OPT:
/// (1 - x) for the targeted policy, max(x/2, 1 - x) with detection.
enum class Envelope { tva, tvd };

struct GuaranteeCheck {
    double min_ratio = 0.0;
    double argmin_y = 0.0;
};

/// LHS(y) = int_{1/2}^{y} x rho + int_y^1 env(x) rho, computed from exact
/// antiderivatives; returns min_y LHS(y) / y over an even grid of [1/2, 1]
/// with y_grid intervals (plus the density's breakpoints).
double guarantee_lhs(const DensitySpec& spec, Envelope env, double y);
GuaranteeCheck verify_guarantee(const DensitySpec& spec, Envelope env, int y_grid);

}  // namespace osel
