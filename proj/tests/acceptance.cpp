// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "osel/benchmarks.hpp"
#include "osel/densities.hpp"
#include "osel/hardness.hpp"
#include "osel/harness.hpp"
#include "osel/policies.hpp"
#include "osel/simplex.hpp"
#include "osel/tolerance.hpp"

using namespace osel;

namespace {

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, bool ok, const std::string& what) {
    lines[id] = std::string(ok ? "[PASS]" : "[FAIL]") + " criterion " + std::to_string(id) + ": " + what;
    if (!ok) ++failures;
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Criteria 1, 2, 3 and 6 share one sweep: 500 instances, n <= 6, <= 4 atoms,
// values in [0, 10], every arrival order.
void deterministic_sweep() {
    oracle::Generator gen(2024);
    std::size_t orders = 0;
    std::size_t under_checks = 0, over_checks = 0, over_skipped = 0;
    double worst1 = INFINITY;            // min TVA - g0 on [0, OPT]
    double worst2_tva = INFINITY;        // min TVA - (prophet - g0)
    double worst2_tvd = INFINITY;        // min TVD - max(prophet - g0, g0 / 2)
    double worst3 = INFINITY;            // min ratio at g0 = prophet / phi
    double worst6_under = -INFINITY;     // max g_t - OPT_t for g0 <= OPT
    double worst6_over = INFINITY;       // min g_t - OPT_t for g0 > OPT
    for (int i = 0; i < 500; ++i) {
        const auto inst = gen.instance(6, 4);
        const double prophet = prophet_value(inst);
        for (const auto& order : oracle::all_orders(inst.size())) {
            ++orders;
            OrderEvaluator ev(inst, order);
            const auto opt = ev.opt();
            for (int k = 0; k < 20; ++k) {
                const double g0 = opt.total * k / 19.0;
                const auto a = ev.tva(g0);
                worst1 = std::min(worst1, a.total - g0);
                for (std::size_t t = 1; t < a.targets.size(); ++t) {
                    worst6_under = std::max(worst6_under, a.targets[t] - opt.per_stage[t]);
                }
                ++under_checks;
            }
            for (int k = 1; k <= 20; ++k) {
                const double g0 = opt.total + (prophet - opt.total) * k / 20.0;
                if (!(g0 > opt.total)) continue;
                const auto a = ev.tva(g0);
                worst2_tva = std::min(worst2_tva, a.total - (prophet - g0));
                worst2_tvd = std::min(worst2_tvd, ev.tvd(g0).total - std::max(prophet - g0, g0 / 2.0));
                ++over_checks;
                // Numerically indistinguishable from OPT: the inversion snaps to it.
                if (g0 - opt.total <= kSnapTol * std::max(1.0, g0)) {
                    ++over_skipped;
                    continue;
                }
                for (std::size_t t = 1; t < a.targets.size(); ++t) {
                    worst6_over = std::min(worst6_over, a.targets[t] - opt.per_stage[t]);
                }
            }
            if (opt.total > 0.0) {
                worst3 = std::min(worst3, ev.tva(prophet / kGoldenRatio).total / opt.total);
            }
        }
    }
    report(1, worst1 >= -1e-9,
           fmt("TVA(g0) >= g0 - 1e-9 for g0 in [0, OPT]: 500 instances, %zu orders, %zu targets, "
               "min TVA - g0 = %.3g",
               orders, under_checks, worst1));
    report(2, worst2_tva >= -1e-9 && worst2_tvd >= -1e-9,
           fmt("g0 in (OPT, prophet], %zu targets: min TVA - (prophet - g0) = %.3g, "
               "min TVD - max(prophet - g0, g0/2) = %.3g (need >= -1e-9)",
               over_checks, worst2_tva, worst2_tvd));
    report(3, worst3 >= 0.618033 - 1e-6,
           fmt("g0 = prophet/phi: min TVA/OPT over %zu orders = %.9f (need >= 0.618033 - 1e-6)", orders,
               worst3));
    report(6, worst6_under <= 1e-9 && worst6_over >= -1e-9,
           fmt("stagewise targets: max g_t - OPT_t (g0 <= OPT) = %.3g, min g_t - OPT_t (g0 > OPT) = %.3g; "
               "%zu over-targets within 1e-9 of OPT treated as OPT",
               worst6_under, worst6_over, over_skipped));
}

void randomized_ratios() {
    oracle::Generator gen(4040);
    const auto rho656 = density_656();
    const auto rho732 = density_732();
    std::size_t orders = 0;
    double min656 = INFINITY, min732 = INFINITY, max_err = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto inst = gen.instance(5, 4);
        const double prophet = prophet_value(inst);
        for (const auto& order : oracle::all_orders(inst.size())) {
            OrderEvaluator ev(inst, order);
            const double opt = ev.opt().total;
            if (opt <= 0.0) continue;
            ++orders;
            const auto a = randomized_value(ev, prophet, rho656, 200, PolicyKind::tva);
            const auto d = randomized_value(ev, prophet, rho732, 200, PolicyKind::tvd);
            min656 = std::min(min656, a.value / opt);
            min732 = std::min(min732, d.value / opt);
            max_err = std::max({max_err, a.error_bound, d.error_bound});
        }
    }
    const auto g656 = verify_guarantee(rho656, Envelope::tva, 10000);
    const auto g732 = verify_guarantee(rho732, Envelope::tvd, 10000);
    const bool ok = min656 >= rho656.gamma - 1e-3 && min732 >= rho732.gamma - 1e-3 &&
                    g656.min_ratio >= rho656.gamma - 1e-6 && g732.min_ratio >= rho732.gamma - 1e-6;
    report(4, ok,
           fmt("100 instances, %zu orders, grid 200: min ratio rho656/tva = %.6f (Gamma %.6f), "
               "rho732/tvd = %.6f (Gamma %.6f), max |Q(N)-Q(2N)| = %.2g; verify_guarantee %.9f, %.9f",
               orders, min656, rho656.gamma, min732, rho732.gamma, max_err, g656.min_ratio,
               g732.min_ratio));
}

void density_constants() {
    const auto a = solve_c_656();
    const auto b = solve_c_732();
    const double m656 = density_mass_numeric(density_656());
    const double m732 = density_mass_numeric(density_732());
    const bool ok = std::abs(a.c - 0.523) <= 1e-3 && std::abs(a.gamma - 0.656) <= 1e-3 &&
                    std::abs(b.c - 0.555) <= 1e-3 && std::abs(b.gamma - 0.732) <= 1e-3 &&
                    std::abs(m656 - 1.0) <= 1e-8 && std::abs(m732 - 1.0) <= 1e-8;
    report(5, ok,
           fmt("(c, Gamma) = (%.6f, %.6f) and (%.6f, %.6f); numeric mass - 1 = %.2g, %.2g", a.c, a.gamma, b.c,
               b.gamma, m656 - 1.0, m732 - 1.0));
}

void general_hardness() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto dual = verify_dual_general(10000);
    const auto lp = build_primal_general(1e-3);
    const auto r = simplex_solve(lp);
    const double secs = seconds_since(t0);
    const bool ok = r.status == SimplexStatus::optimal && std::abs(dual.objective - 0.8293) <= 1e-3 &&
                    dual.max_violation <= 1e-8 && std::abs(r.value - 0.8293) <= 5e-3 && secs <= 60.0;
    report(7, ok,
           fmt("dual objective %.10f, max violation %.2g; primal at step 1e-3 = %.6f (%s, %zu pivots); %.1f s",
               dual.objective, dual.max_violation, r.value, to_string(r.status), r.pivots, secs));
}

void tvd_hardness() {
    const auto d = verify_dual_tvd(10000);
    const double c = solve_c_tvd_hardness();
    const bool ok = std::abs(c - 0.583027) <= 1e-5 && std::abs(d.a - 0.215941) <= 1e-5 &&
                    std::abs(d.b - 1.300426) <= 1e-5 && std::abs(d.objective - 0.758184) <= 1e-4 &&
                    d.max_violation <= 1e-8;
    report(8, ok,
           fmt("c = %.9f, a = %.9f, b = %.9f, dual objective %.9f, max violation on 10^4 points %.2g", c, d.a,
               d.b, d.objective, d.max_violation));
}

struct HardGridResult {
    double opt_err = 0.0;
    double tvd_err = 0.0;
    std::size_t points = 0;
    std::size_t skipped = 0;
    std::size_t deterministic = 0;
    std::size_t free_reward = 0;
};

// (x, g0) grid on the interleaved hard orders. g0 strictly between 1 - c + x and
// OPT(pi_x) lies in the finite-eps jump band of the piecewise limit and is
// left out (and counted).
HardGridResult hard_grid(double c, double eps, double delta) {
    const auto inst = make_tvd_hard_instance(c, eps, delta);
    HardGridResult out;
    for (double x : tvd_order_points(inst)) {
        const double opt = opt_online(inst.instance, build_tvd_order(inst, x)).total;
        out.opt_err = std::max(out.opt_err, std::abs(opt - (1.0 - c + x)));
        const double jump = 1.0 - c + x;
        for (int k = 0; k <= 20; ++k) {
            const double g0 = c + (1.0 - c) * k / 20.0;
            if (std::min(jump, opt) - 1e-12 < g0 && g0 <= std::max(jump, opt) + 1e-12 && g0 != jump) {
                ++out.skipped;
                continue;
            }
            const auto r = tvd_on_pi_x(inst, x, g0);
            out.tvd_err = std::max(out.tvd_err, std::abs(r.value - r.limit));
            ++out.points;
            if (r.branch == SwitchBranch::deterministic) ++out.deterministic;
            if (r.branch == SwitchBranch::free_reward) ++out.free_reward;
        }
    }
    return out;
}

void hard_instance_grid() {
    const double c = solve_c_tvd_hardness();
    const auto fine = hard_grid(c, 0.01, 1e-5);
    const auto coarse = hard_grid(c, 0.02, 1e-5);
    const bool ok = fine.opt_err <= 0.01 && fine.tvd_err <= 0.06 && fine.tvd_err < coarse.tvd_err;
    report(9, ok,
           fmt("eps 0.01: max |OPT - (1-c+x)| = %.5f, max |TVD - limit| = %.5f over %zu points "
               "(%zu in the jump band skipped; switches: %zu deterministic, %zu free-reward); "
               "eps 0.02: %.5f, %.5f",
               fine.opt_err, fine.tvd_err, fine.points, fine.skipped, fine.deterministic, fine.free_reward,
               coarse.opt_err, coarse.tvd_err));
}

void oracle_equivalence() {
    oracle::Generator gen(1010);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const auto inst = gen.instance(4, 3);
        const auto order = gen.order(inst.size());
        const auto seq = oracle::sequence(inst, order);
        OrderEvaluator ev(inst, order);
        const double prophet = prophet_value(inst);
        worst = std::max(worst, std::abs(ev.opt().total - oracle::opt_tree(seq)));
        for (double g0 : {gen.uniform(0.0, prophet), gen.uniform(0.0, 1.3 * prophet), ev.opt().total}) {
            worst = std::max(worst, std::abs(ev.tva(g0).total -
                                             oracle::policy_by_enumeration(oracle::Policy::tva, seq, g0)));
            worst = std::max(worst, std::abs(ev.tvd(g0).total -
                                             oracle::policy_by_enumeration(oracle::Policy::tvd, seq, g0)));
        }
    }
    report(10, worst <= 1e-12,
           fmt("1000 cases: max |exact - enumeration| over opt, tva, tvd = %.2g (need <= 1e-12)", worst));
}

std::string simulate_csv(const Instance& inst, ExperimentConfig cfg, unsigned threads) {
    cfg.threads = threads;
    std::ostringstream os;
    write_simulation_csv(os, cmd_simulate(inst, cfg));
    return os.str();
}

void monte_carlo() {
    oracle::Generator gen(1111);
    double worst_z = 0.0;
    std::size_t rows = 0;
    bool identical = true;
    for (int i = 0; i < 3; ++i) {
        const auto inst = gen.instance(4, 3);
        for (auto policy : {PolicyChoice::sta, PolicyChoice::tva, PolicyChoice::tvd, PolicyChoice::tva_rand_656,
                            PolicyChoice::tvd_rand_732}) {
            ExperimentConfig cfg;
            cfg.policy = policy;
            cfg.orders.kind = OrderMode::Kind::all;
            cfg.seed = 100 + i;
            cfg.runs = 100000;
            cfg.grid = 200;
            cfg.threads = 0;
            for (const auto& r : cmd_simulate(inst, cfg)) {
                worst_z = std::max(worst_z, std::abs(r.z));
                ++rows;
            }
            if (i == 0) {
                const auto one = simulate_csv(inst, cfg, 1);
                identical = identical && one == simulate_csv(inst, cfg, 3) && one == simulate_csv(inst, cfg, 8) &&
                            one == simulate_csv(inst, cfg, 1);
            }
        }
    }
    report(11, worst_z <= 4.0 && identical,
           fmt("%zu (instance, policy, order) rows of 10^5 runs: max |z| = %.3f (need <= 4); "
               "CSV identical across 1, 3, 8 threads and re-runs: %s",
               rows, worst_z, identical ? "yes" : "no"));
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    deterministic_sweep();
    randomized_ratios();
    density_constants();
    general_hardness();
    tvd_hardness();
    hard_instance_grid();
    oracle_equivalence();
    monte_carlo();
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("%d failing criteria, %.1f s\n", failures, seconds_since(t0));
    return failures == 0 ? 0 : 1;
}
