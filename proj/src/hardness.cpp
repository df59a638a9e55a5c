#include "osel/hardness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "osel/benchmarks.hpp"
#include "osel/policies.hpp"
#include "osel/tolerance.hpp"

namespace osel {

namespace {

constexpr double kGridMatch = 1e-9;

std::size_t grid_count(double span, double step) {
    return static_cast<std::size_t>(std::floor(span / step + 1e-9)) + 1;
}

DiscreteDistribution free_reward(double payout, double delta) {
    return DiscreteDistribution({{0.0, 1.0 - delta}, {payout, delta}});
}

std::size_t find_grid_value(const std::vector<double>& grid, double x) {
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (std::abs(grid[k] - x) <= kGridMatch) return k;
    }
    throw std::invalid_argument("value " + std::to_string(x) + " is not on the instance grid");
}

void check_regime(double epsilon, double delta) {
    if (!(epsilon > 0.0) || !(delta > 0.0)) {
        throw std::invalid_argument("epsilon and delta must be positive");
    }
    if (!(delta < epsilon * epsilon)) {
        throw std::invalid_argument("hard instances need delta < epsilon^2");
    }
}

}  // namespace

EzraInstance make_ezra_instance(double epsilon, double delta) {
    check_regime(epsilon, delta);
    const std::size_t count = grid_count(kGoldenRatio - 1.0, epsilon);
    std::vector<double> grid;
    std::vector<Box> boxes;
    for (std::size_t k = 0; k < count; ++k) {
        const double v = kGoldenRatio - static_cast<double>(k) * epsilon;
        grid.push_back(v);
        boxes.push_back({"det-" + std::to_string(k), DiscreteDistribution::point(v)});
    }
    const std::size_t free_box = boxes.size();
    boxes.push_back({"free", free_reward(1.0 / delta, delta)});
    return EzraInstance{epsilon, delta, std::move(grid), Instance(std::move(boxes)), free_box};
}

ArrivalOrder build_order_pi(const EzraInstance& inst) {
    return ArrivalOrder::identity(inst.instance.size());
}

ArrivalOrder build_order_pi_x(const EzraInstance& inst, double x) {
    const std::size_t k = find_grid_value(inst.grid, x);
    std::vector<std::size_t> p;
    for (std::size_t j = 0; j < inst.grid.size(); ++j) {
        p.push_back(j);
        if (j == k) p.push_back(inst.free_box);
    }
    return ArrivalOrder(std::move(p));
}

TvdHardInstance make_tvd_hard_instance(double c, double epsilon, double delta) {
    check_regime(epsilon, delta);
    if (!(c >= 0.5 && c < 1.0)) throw std::invalid_argument("c must lie in [1/2, 1)");
    const double raw_copies = (1.0 - c) / epsilon;
    const auto copies = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(raw_copies)));
    const std::size_t count = grid_count(c, epsilon);
    std::vector<double> values;
    std::vector<Box> boxes;
    boxes.reserve((count + 1) * copies);
    for (std::size_t j = 0; j < count; ++j) {
        const double v = std::max(0.0, c - static_cast<double>(j) * epsilon);
        values.push_back(v);
        for (std::size_t i = 0; i < copies; ++i) {
            boxes.push_back({"det-" + std::to_string(j) + "-" + std::to_string(i),
                             DiscreteDistribution::point(v)});
        }
    }
    for (std::size_t i = 0; i < copies; ++i) {
        boxes.push_back({"free-" + std::to_string(i), free_reward(epsilon / delta, delta)});
    }
    return TvdHardInstance{c,          epsilon, delta, copies, raw_copies, std::move(values),
                           Instance(std::move(boxes))};
}

std::vector<double> tvd_order_points(const TvdHardInstance& inst) {
    std::vector<double> out;
    for (double v : inst.values) {
        if (v > 2.0 * inst.c - 1.0 + kGridMatch) out.push_back(v);
    }
    return out;
}

ArrivalOrder build_tvd_order(const TvdHardInstance& inst, double x) {
    if (!(x > 2.0 * inst.c - 1.0 + kGridMatch)) {
        throw std::invalid_argument("x must lie in (2c - 1, c]");
    }
    const std::size_t jx = find_grid_value(inst.values, x);
    const std::size_t k = inst.copies;
    const std::size_t free_base = inst.values.size() * k;
    std::vector<std::size_t> p;
    p.reserve(inst.instance.size());
    for (std::size_t j = 0; j < jx; ++j) {
        for (std::size_t i = 0; i < k; ++i) p.push_back(j * k + i);
    }
    for (std::size_t i = 0; i < k; ++i) {
        p.push_back(free_base + i);
        p.push_back(jx * k + i);
    }
    for (std::size_t j = jx + 1; j < inst.values.size(); ++j) {
        for (std::size_t i = 0; i < k; ++i) p.push_back(j * k + i);
    }
    return ArrivalOrder(std::move(p));
}

double tvd_limit_value(double c, double x, double g0) {
    const double opt = 1.0 - c + x;
    return g0 <= opt ? g0 : std::max(1.0 - c, g0 - (1.0 - c));
}

const char* to_string(SwitchBranch b) {
    switch (b) {
        case SwitchBranch::none: return "none";
        case SwitchBranch::deterministic: return "deterministic";
        case SwitchBranch::free_reward: return "free-reward";
    }
    return "?";
}

TvdOnOrder tvd_on_pi_x(const TvdHardInstance& inst, double x, double g0) {
    OrderEvaluator ev(inst.instance, build_tvd_order(inst, x));
    const auto res = ev.tvd(g0);
    TvdOnOrder out;
    out.value = res.total;
    out.opt = ev.opt().total;
    out.limit = tvd_limit_value(inst.c, x, g0);
    out.switch_stage = res.switch_stage;
    out.threshold = res.threshold;
    if (res.threshold) {
        out.branch = *res.threshold > inst.c ? SwitchBranch::free_reward : SwitchBranch::deterministic;
    }
    return out;
}

FiniteLP build_primal_general(double grid_step) {
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
    const std::size_t m = grid_count(kGoldenRatio - 1.0, grid_step);
    std::vector<double> grid(m);
    for (std::size_t k = 0; k < m; ++k) grid[k] = kGoldenRatio - static_cast<double>(k) * grid_step;

    FiniteLP lp;
    lp.direction = Direction::maximize;
    lp.objective.assign(m + 1, 0.0);
    lp.objective[m] = 1.0;
    for (std::size_t k = 0; k < m; ++k) lp.names.push_back("p[" + std::to_string(grid[k]) + "]");
    lp.names.push_back("Gamma");

    // Order pi: sum p_x x + (1 - sum p_x) >= Gamma phi.
    std::vector<double> row(m + 1, 0.0);
    for (std::size_t k = 0; k < m; ++k) row[k] = -(grid[k] - 1.0);
    row[m] = kGoldenRatio;
    lp.add_row(row, Sense::less_equal, 1.0);

    // Order pi_x: sum_{y >= x} p_y y + (1 - sum_{y >= x} p_y)(x + 1) >= Gamma (x + 1).
    for (std::size_t k = 0; k < m; ++k) {
        std::fill(row.begin(), row.end(), 0.0);
        const double x = grid[k];
        for (std::size_t j = 0; j <= k; ++j) row[j] = x + 1.0 - grid[j];
        row[m] = x + 1.0;
        lp.add_row(row, Sense::less_equal, x + 1.0);
    }

    std::fill(row.begin(), row.end(), 1.0);
    row[m] = 0.0;
    lp.add_row(row, Sense::less_equal, 1.0);
    return lp;
}

FiniteLP build_primal_tvd(double c, double grid_step) {
    if (!(c > 0.5 && c < 1.0)) throw std::invalid_argument("c must lie in (1/2, 1)");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");
    const std::size_t cells =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((1.0 - c) / grid_step - 1e-9)));
    const double h = (1.0 - c) / static_cast<double>(cells);
    const std::size_t ny = cells + 1;

    FiniteLP lp;
    lp.direction = Direction::maximize;
    lp.objective.assign(ny + 1, 0.0);
    lp.objective[ny] = 1.0;
    std::vector<double> ys(ny);
    for (std::size_t j = 0; j < ny; ++j) {
        ys[j] = j + 1 == ny ? 1.0 : c + static_cast<double>(j) * h;
        lp.names.push_back("rho[" + std::to_string(ys[j]) + "]");
    }
    lp.names.push_back("Gamma");

    std::vector<double> row(ny + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k) {
        const double x = c - static_cast<double>(k) * h;
        const double opt = 1.0 - c + x;
        for (std::size_t j = 0; j < ny; ++j) {
            const double y = ys[j];
            row[j] = -(y <= opt + 1e-12 ? y : std::max(1.0 - c, y - (1.0 - c)));
        }
        row[ny] = opt;
        lp.add_row(row, Sense::less_equal, 0.0);
    }
    std::fill(row.begin(), row.end(), 1.0);
    row[ny] = 0.0;
    lp.add_row(row, Sense::less_equal, 1.0);
    return lp;
}

double general_bound_closed_form() {
    const double s5 = std::sqrt(5.0);
    const double e = std::exp(1.0);
    return 2.0 * std::exp(s5 / 2.0) / (3.0 * std::sqrt(e) + 2.0 * std::exp(s5 / 2.0) - std::sqrt(5.0 * e));
}

DualReport verify_dual_general(int grid, double lambda_scale) {
    if (grid < 10000) throw std::invalid_argument("verify_dual_general needs grid >= 10^4");
    const double s5 = std::sqrt(5.0);
    const double e = std::exp(1.0);
    const double phi = kGoldenRatio;
    const double k = lambda_scale * (s5 - 1.0) / (3.0 * e - s5 * e + 2.0 * std::exp(0.5 + s5 / 2.0));
    const double mu = k * e;

    // int_1^x e^y dy and int_1^x y e^y dy.
    auto exp_integral = [e](double x) { return std::exp(x) - e; };
    auto y_exp_integral = [](double x) { return (x - 1.0) * std::exp(x); };

    DualReport r;
    r.bound_name = "general";
    r.grid = grid;
    const double weighted = k * (y_exp_integral(phi) + exp_integral(phi));  // int lambda (x + 1)
    r.objective = mu + weighted;
    const double normalization = phi * mu + weighted;
    r.normalization_slack = normalization - 1.0;
    r.max_violation = std::max(0.0, 1.0 - normalization);
    for (int i = 0; i <= grid; ++i) {
        const double x = 1.0 + (phi - 1.0) * i / grid;
        // mu (x - 1) + int_1^x lambda(y) (x - y - 1) dy <= 0
        const double lhs = mu * (x - 1.0) + k * ((x - 1.0) * exp_integral(x) - y_exp_integral(x));
        r.max_violation = std::max(r.max_violation, lhs);
    }
    return r;
}

double solve_c_tvd_hardness() {
    auto residual = [](double c) {
        return -1.0 + 1.0 / (2.0 * (1.0 - c)) + (1.0 - c) * std::log((1.0 - c) / (2.0 * c - 1.0)) - c;
    };
    double lo = 0.5 + 1e-12;
    double hi = 2.0 / 3.0;
    if (!(residual(lo) > 0.0 && residual(hi) < 0.0)) {
        throw std::runtime_error("hardness constant is not bracketed");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (residual(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

DualReport verify_dual_tvd(int grid, double lambda_scale) {
    if (grid < 10000) throw std::invalid_argument("verify_dual_tvd needs grid >= 10^4");
    const double c = solve_c_tvd_hardness();
    const double lo = 2.0 * c - 1.0;
    const double mid = 1.0 - c;

    // a * i1 + b * b1 = b and a * i2 + b * b2 = 1.
    const double i1 = 1.0 / lo - 1.0 / mid;
    const double i2 = mid * i1 + std::log(mid / lo);
    const double b1 = (c - mid) / mid;
    const double b2 = (mid * (c - mid) + 0.5 * (c * c - mid * mid)) / mid;
    const double det = i1 * b2 - (b1 - 1.0) * i2;
    if (std::abs(det) < 1e-14) throw std::runtime_error("dual certificate system is singular");
    const double a = -(b1 - 1.0) / det;
    const double b = i1 / det;

    const double sa = lambda_scale * a;
    const double sb = lambda_scale * b;
    auto cumulative = [&](double z) {  // int_{2c-1}^z lambda
        if (z < mid) return sa * (1.0 / lo - 1.0 / z);
        return sa * i1 + sb * (z - mid) / mid;
    };
    const double total = cumulative(c);

    DualReport r;
    r.bound_name = "tvd";
    r.grid = grid;
    r.c = c;
    r.a = a;
    r.b = b;
    r.objective = c * total;
    const double normalization = sa * i2 + sb * b2;
    r.normalization_slack = normalization - 1.0;
    r.max_violation = std::max(0.0, 1.0 - normalization);
    for (int i = 0; i <= grid; ++i) {
        const double y = c + (1.0 - c) * i / grid;
        const double z = std::clamp(y - mid, lo, c);
        const double below = cumulative(z);
        const double lhs = y * (total - below) + std::max(mid, z) * below;
        r.max_violation = std::max(r.max_violation, lhs - r.objective);
    }
    return r;
}

void write_dual_csv_header(std::ostream& os) {
    os << "bound_name,grid,objective,max_violation\n";
}

void write_dual_csv_row(std::ostream& os, const DualReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s,%d,%.10f,%.3e\n", r.bound_name.c_str(), r.grid, r.objective,
                  r.max_violation);
    os << buf;
}

std::vector<OrderRatio> deterministic_ratios_on_ezra(const EzraInstance& inst) {
    const double g0 = prophet_value(inst.instance) / kGoldenRatio;
    std::vector<OrderRatio> out;
    auto run = [&](const std::string& name, const ArrivalOrder& order) {
        const auto seq = arrange(inst.instance, order);
        const double opt = opt_online(seq).total;
        const double alg = tva_exact(seq, g0).total;
        out.push_back({name, opt, alg, alg / opt});
    };
    run("pi", build_order_pi(inst));
    for (double x : inst.grid) run("pi_x=" + std::to_string(x), build_order_pi_x(inst, x));
    return out;
}

std::vector<OrderRatio> randomized_ratios_on_tvd_hard(const TvdHardInstance& inst,
                                                      const DensitySpec& density, int grid_points,
                                                      std::size_t max_orders) {
    const double prophet = prophet_value(inst.instance);
    auto points = tvd_order_points(inst);
    if (max_orders > 0 && points.size() > max_orders) {
        std::vector<double> picked;
        for (std::size_t i = 0; i < max_orders; ++i) {
            picked.push_back(points[i * (points.size() - 1) / std::max<std::size_t>(1, max_orders - 1)]);
        }
        picked.erase(std::unique(picked.begin(), picked.end()), picked.end());
        points = std::move(picked);
    }
    std::vector<OrderRatio> out;
    for (double x : points) {
        OrderEvaluator ev(inst.instance, build_tvd_order(inst, x));
        const double opt = ev.opt().total;
        const auto q = randomized_value(ev, prophet, density, grid_points, PolicyKind::tvd);
        out.push_back({"pi_x=" + std::to_string(x), opt, q.value, q.value / opt});
    }
    return out;
}

}  // namespace osel
