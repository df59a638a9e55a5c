// Command-line front end: eval | hardness | simulate | verify-density.

#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "osel/harness.hpp"

namespace {

struct Options {
    std::string instance;
    std::string policy = "tva";
    std::string g0 = "phi";
    std::optional<double> tau;
    std::string orders = "given";
    std::optional<std::uint64_t> seed;
    std::optional<int> grid;
    std::string out;
    bool force_enumeration = false;
    std::size_t runs = 100000;
    unsigned threads = 0;
    double primal_step = 1e-3;
    bool refine = false;
    bool inject_broken = false;
};

osel::ExperimentConfig to_config(const Options& o) {
    osel::ExperimentConfig cfg;
    cfg.policy = osel::parse_policy(o.policy);
    cfg.g0 = osel::parse_target(o.g0);
    cfg.tau = o.tau;
    cfg.orders = osel::parse_order_mode(o.orders);
    cfg.grid = o.grid.value_or(1000);
    cfg.seed = o.seed;
    cfg.force_enumeration = o.force_enumeration;
    cfg.runs = o.runs;
    cfg.threads = o.threads;
    return cfg;
}

osel::Instance load(const Options& o) {
    std::vector<std::string> warnings;
    auto inst = osel::load_instance(o.instance, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
    return inst;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Order-unaware online selection: exact evaluation, simulation and hardness bounds"};
    app.require_subcommand(1);
    Options o;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out, "Write CSV here instead of stdout");
        sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    };
    auto add_experiment = [&](CLI::App* sub) {
        sub->add_option("--instance", o.instance, "Instance JSON file")->required();
        sub->add_option("--policy", o.policy, "sta | tva | tvd | tva-rand-656 | tvd-rand-732")
            ->capture_default_str();
        sub->add_option("--g0", o.g0, "Initial target: number, 'opt' or 'phi' (prophet / phi)")
            ->capture_default_str();
        sub->add_option("--tau", o.tau, "Threshold for sta (default: best single threshold)");
        sub->add_option("--orders", o.orders, "given | all | random:K | path to an order file")
            ->capture_default_str();
        sub->add_option("--seed", o.seed, "Seed for random orders and simulation");
        sub->add_option("--grid", o.grid, "Quadrature points for randomized policies (>= 100)");
        sub->add_flag("--force-enumeration", o.force_enumeration, "Allow 'all' orders beyond 9 boxes");
        add_common(sub);
    };

    auto* eval = app.add_subcommand("eval", "Exact ALG/OPT ratio per arrival order");
    add_experiment(eval);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo mean against the exact value");
    add_experiment(simulate);
    simulate->add_option("--runs", o.runs, "Sampled runs per order")->capture_default_str();
    auto* hardness = app.add_subcommand("hardness", "Dual certificates and discretized primal LPs");
    hardness->add_option("--grid", o.grid, "Dual verification grid (>= 10000)");
    hardness->add_option("--primal-step", o.primal_step, "Primal LP grid step")->capture_default_str();
    hardness->add_flag("--refine", o.refine, "Primal LPs on a halving sequence of steps");
    hardness->add_flag("--inject-broken-certificate", o.inject_broken,
                       "Halve the dual certificates (testing aid; must fail)");
    add_common(hardness);
    auto* density = app.add_subcommand("verify-density", "Check the randomized target densities");
    density->add_option("--grid", o.grid, "Points in the y grid (>= 1000)");
    add_common(density);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? osel::kExitOk : osel::kExitUsage;
    }

    std::unique_ptr<std::ofstream> file;
    if (!o.out.empty()) {
        file = std::make_unique<std::ofstream>(o.out);
        if (!*file) {
            std::cerr << "error: cannot write " << o.out << '\n';
            return osel::kExitUsage;
        }
    }
    std::ostream& out = file ? *file : std::cout;

    try {
        if (*eval) {
            const auto inst = load(o);
            osel::write_ratio_csv(out, osel::cmd_eval(inst, to_config(o)));
            return osel::kExitOk;
        }
        if (*simulate) {
            const auto inst = load(o);
            osel::write_simulation_csv(out, osel::cmd_simulate(inst, to_config(o)));
            return osel::kExitOk;
        }
        if (*hardness) {
            osel::HardnessConfig cfg;
            cfg.dual_grid = o.grid.value_or(cfg.dual_grid);
            cfg.primal_step = o.primal_step;
            cfg.refine = o.refine;
            cfg.inject_broken = o.inject_broken;
            const int code = osel::cmd_hardness(cfg, out);
            if (code != osel::kExitOk) std::cerr << "error: dual certificate violated\n";
            return code;
        }
        if (*density) {
            const int code = osel::cmd_verify_density(o.grid.value_or(10000), out);
            if (code != osel::kExitOk) std::cerr << "error: density guarantee below its constant\n";
            return code;
        }
    } catch (const osel::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return osel::kExitUsage;
    } catch (const osel::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return osel::kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return osel::kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return osel::kExitValidation;
    }
    return osel::kExitUsage;
}
