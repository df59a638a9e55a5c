#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "osel/densities.hpp"
#include "osel/instance.hpp"
#include "osel/simplex.hpp"

namespace osel {

// Hard instances for order-unaware selection, their adversarial arrival
// orders, the discretized LPs bounding any algorithm on them, and checks of
// closed-form dual certificates for the continuous limits.

/// A free-reward box {(1/delta, delta), (0, 1 - delta)} plus deterministic
/// boxes at phi, phi - eps, ..., down to the last grid value >= 1.
struct EzraInstance {
    double epsilon = 0.0;
    double delta = 0.0;
    std::vector<double> grid;  // descending
    Instance instance;
    std::size_t free_box;
};

EzraInstance make_ezra_instance(double epsilon, double delta);

/// Deterministic boxes descending, then the free-reward box.
ArrivalOrder build_order_pi(const EzraInstance& inst);

/// As build_order_pi with the free-reward box moved right after the box of value x.
ArrivalOrder build_order_pi_x(const EzraInstance& inst, double x);

/// Deterministic values c, c - eps, ..., (>= 0), each repeated `copies`
/// times, plus `copies` free-reward boxes {(eps/delta, delta), (0, 1 - delta)}.
/// copies = round((1 - c) / eps); the unrounded ratio is kept for tolerance accounting.
struct TvdHardInstance {
    double c = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    std::size_t copies = 0;
    double raw_copies = 0.0;
    std::vector<double> values;  // descending
    Instance instance;

    /// copies * epsilon, the total expected free reward.
    double free_mass() const { return static_cast<double>(copies) * epsilon; }
};

TvdHardInstance make_tvd_hard_instance(double c, double epsilon, double delta);

/// Grid values usable as x in build_tvd_order: those in (2c - 1, c].
std::vector<double> tvd_order_points(const TvdHardInstance& inst);

/// Deterministic boxes above x descending; then `copies` rounds of
/// (free-reward box, box of value x); then the remaining boxes descending.
ArrivalOrder build_tvd_order(const TvdHardInstance& inst, double x);

/// 1 - c + x for g0 <= 1 - c + x, else max(1 - c, g0 - (1 - c)).
double tvd_limit_value(double c, double x, double g0);

enum class SwitchBranch { none, deterministic, free_reward };

const char* to_string(SwitchBranch b);

struct TvdOnOrder {
    double value = 0.0;
    double opt = 0.0;
    double limit = 0.0;
    std::optional<std::size_t> switch_stage;
    std::optional<double> threshold;
    /// Whether the conservative threshold still accepts a deterministic box
    /// or only the free rewards.
    SwitchBranch branch = SwitchBranch::none;
};

TvdOnOrder tvd_on_pi_x(const TvdHardInstance& inst, double x, double g0);

/// Variables p_x (x in the grid phi, phi - step, ...) then Gamma; maximize Gamma.
FiniteLP build_primal_general(double grid_step);

/// Variables rho_y on an even grid of [c, 1] then Gamma, one constraint per
/// x on the matching grid of (2c - 1, c]; maximize Gamma.
FiniteLP build_primal_tvd(double c, double grid_step);

struct DualReport {
    std::string bound_name;
    int grid = 0;
    double objective = 0.0;
    double max_violation = 0.0;
    /// Left side of the normalization constraint minus 1.
    double normalization_slack = 0.0;
    double c = 0.0;
    double a = 0.0;
    double b = 0.0;
};

/// Closed-form value 2 e^{sqrt5/2} / (3 sqrt(e) + 2 e^{sqrt5/2} - sqrt(5e)).
double general_bound_closed_form();

/// mu = K e and lambda(x) = K e^x on [1, phi]. `lambda_scale` multiplies
/// lambda and mu (1 leaves the certificate intact).
DualReport verify_dual_general(int grid, double lambda_scale = 1.0);

/// Root of c = -1 + 1/(2(1-c)) + (1-c) ln((1-c)/(2c-1)) on (1/2, 2/3).
double solve_c_tvd_hardness();

/// lambda = a/x^2 on [2c-1, 1-c), b/(1-c) on [1-c, c] with (a, b) from the
/// defining 2x2 system; mu = c * int lambda. Throws on a singular system.
DualReport verify_dual_tvd(int grid, double lambda_scale = 1.0);

void write_dual_csv_header(std::ostream& os);
void write_dual_csv_row(std::ostream& os, const DualReport& r);

struct OrderRatio {
    std::string order_name;
    double opt = 0.0;
    double alg = 0.0;
    double ratio = 0.0;
};

/// Targeted policy with g0 = prophet / phi over pi and every pi_x.
std::vector<OrderRatio> deterministic_ratios_on_ezra(const EzraInstance& inst);

/// Randomized detection policy over the orders pi_x of the hard instance.
std::vector<OrderRatio> randomized_ratios_on_tvd_hard(const TvdHardInstance& inst,
                                                      const DensitySpec& density, int grid_points,
                                                      std::size_t max_orders = 0);

}  // namespace osel
