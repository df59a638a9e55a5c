#include "osel/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "osel/benchmarks.hpp"
#include "osel/densities.hpp"
#include "osel/hardness.hpp"
#include "osel/simplex.hpp"
#include "osel/tolerance.hpp"

namespace osel {

namespace {

using json = nlohmann::json;

std::string box_label(const json& box, std::size_t index) {
    if (box.is_object() && box.contains("id") && box["id"].is_string()) {
        return "box '" + box["id"].get<std::string>() + "'";
    }
    return "box #" + std::to_string(index);
}

DiscreteDistribution parse_atoms(const json& atoms, const std::string& label,
                                 std::vector<std::string>* warnings) {
    if (!atoms.is_array() || atoms.empty()) {
        throw ValidationError(label + ": \"atoms\" must be a nonempty array");
    }
    std::vector<Atom> parsed;
    double total = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
        const json& pair = atoms[k];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
            throw ValidationError(label + ": atom " + std::to_string(k) +
                                  " is not a [value, probability] pair of numbers");
        }
        const double v = pair[0].get<double>();
        const double p = pair[1].get<double>();
        if (!std::isfinite(v) || v < 0.0) {
            throw ValidationError(label + ": atom " + std::to_string(k) + " has a negative value");
        }
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            throw ValidationError(label + ": atom " + std::to_string(k) +
                                  " has a probability outside [0, 1]");
        }
        parsed.push_back({v, p});
        total += p;
    }
    const double off = std::abs(total - 1.0);
    if (off > kUserTol * (1.0 + 1e-6)) {
        std::ostringstream msg;
        msg << label << ": probabilities sum to " << std::setprecision(17) << total;
        throw ValidationError(msg.str());
    }
    if (off > kExactTol) {
        for (auto& a : parsed) a.prob /= total;
        if (warnings) {
            std::ostringstream msg;
            msg << label << ": probabilities sum to " << std::setprecision(17) << total
                << "; renormalized";
            warnings->push_back(msg.str());
        }
    }
    try {
        return DiscreteDistribution::from_unsorted(std::move(parsed));
    } catch (const std::exception& e) {
        throw ValidationError(label + ": " + e.what());
    }
}

// Runs job(i) for i in [0, count) over a pool of threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& job) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::ostream& csv_number(std::ostream& os, double v) {
    os << std::setprecision(12) << v;
    return os;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

double resolve_target(const TargetSpec& spec, double opt, double prophet) {
    switch (spec.kind) {
        case TargetSpec::Kind::value: return spec.value;
        case TargetSpec::Kind::opt: return opt;
        case TargetSpec::Kind::phi: return prophet / kGoldenRatio;
    }
    return spec.value;
}

DensitySpec density_for(PolicyChoice p) {
    return p == PolicyChoice::tva_rand_656 ? density_656() : density_732();
}

PolicyKind base_kind(PolicyChoice p) {
    switch (p) {
        case PolicyChoice::sta: return PolicyKind::sta;
        case PolicyChoice::tva:
        case PolicyChoice::tva_rand_656: return PolicyKind::tva;
        case PolicyChoice::tvd:
        case PolicyChoice::tvd_rand_732: return PolicyKind::tvd;
    }
    return PolicyKind::tva;
}

double default_tau(const Instance& instance) {
    std::vector<const DiscreteDistribution*> all;
    for (const auto& b : instance.boxes()) all.push_back(&b.dist);
    return best_single_threshold(all).tau;
}

std::vector<ArrivalOrder> read_order_file(const Instance& instance, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open order file " + path);
    std::vector<ArrivalOrder> orders;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::vector<std::string> ids;
        std::stringstream ss(line);
        std::string id;
        while (std::getline(ss, id, ',')) {
            const auto b = id.find_first_not_of(" \t\r");
            const auto e = id.find_last_not_of(" \t\r");
            ids.push_back(b == std::string::npos ? "" : id.substr(b, e - b + 1));
        }
        try {
            orders.push_back(ArrivalOrder::from_ids(instance, ids));
        } catch (const std::exception& ex) {
            throw ValidationError(path + ":" + std::to_string(lineno) + ": " + ex.what());
        }
    }
    if (orders.empty()) throw ValidationError("order file " + path + " lists no orders");
    return orders;
}

}  // namespace

Instance parse_instance(const std::string& text, std::vector<std::string>* warnings) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("instance is not valid JSON: ") + e.what());
    }
    if (!root.is_object() || !root.contains("boxes") || !root["boxes"].is_array()) {
        throw ValidationError("instance must be an object with a \"boxes\" array");
    }
    const json& boxes = root["boxes"];
    if (boxes.empty()) throw ValidationError("instance has no boxes");
    std::vector<Box> parsed;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const json& box = boxes[i];
        const std::string label = box_label(box, i);
        if (!box.is_object() || !box.contains("id") || !box["id"].is_string()) {
            throw ValidationError(label + ": missing string \"id\"");
        }
        if (!box.contains("atoms")) throw ValidationError(label + ": missing \"atoms\"");
        parsed.push_back({box["id"].get<std::string>(), parse_atoms(box["atoms"], label, warnings)});
    }
    try {
        return Instance(std::move(parsed));
    } catch (const std::invalid_argument& e) {
        throw ValidationError(e.what());
    }
}

Instance load_instance(const std::string& path, std::vector<std::string>* warnings) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open instance file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_instance(buf.str(), warnings);
}

PolicyChoice parse_policy(const std::string& name) {
    for (auto p : {PolicyChoice::sta, PolicyChoice::tva, PolicyChoice::tvd, PolicyChoice::tva_rand_656,
                   PolicyChoice::tvd_rand_732}) {
        if (name == to_string(p)) return p;
    }
    throw UsageError("unknown policy '" + name + "'");
}

const char* to_string(PolicyChoice p) {
    switch (p) {
        case PolicyChoice::sta: return "sta";
        case PolicyChoice::tva: return "tva";
        case PolicyChoice::tvd: return "tvd";
        case PolicyChoice::tva_rand_656: return "tva-rand-656";
        case PolicyChoice::tvd_rand_732: return "tvd-rand-732";
    }
    return "?";
}

bool is_randomized(PolicyChoice p) {
    return p == PolicyChoice::tva_rand_656 || p == PolicyChoice::tvd_rand_732;
}

OrderMode parse_order_mode(const std::string& text) {
    OrderMode m;
    if (text == "given") return m;
    if (text == "all") {
        m.kind = OrderMode::Kind::all;
        return m;
    }
    if (text.rfind("random:", 0) == 0) {
        const std::string k = text.substr(7);
        std::size_t used = 0;
        long long n = -1;
        try {
            n = std::stoll(k, &used);
        } catch (const std::exception&) {
        }
        if (used != k.size() || n <= 0) throw UsageError("random:K needs a positive integer K");
        m.kind = OrderMode::Kind::random;
        m.count = static_cast<std::size_t>(n);
        return m;
    }
    if (text.empty()) throw UsageError("empty --orders value");
    m.kind = OrderMode::Kind::file;
    m.path = text;
    return m;
}

TargetSpec parse_target(const std::string& text) {
    TargetSpec t;
    if (text == "phi") return t;
    if (text == "opt") {
        t.kind = TargetSpec::Kind::opt;
        return t;
    }
    std::size_t used = 0;
    double v = -1.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v) || v < 0.0) {
        throw UsageError("--g0 must be a nonnegative number, 'opt' or 'phi'");
    }
    t.kind = TargetSpec::Kind::value;
    t.value = v;
    return t;
}

std::vector<ArrivalOrder> resolve_orders(const Instance& instance, const ExperimentConfig& config) {
    const std::size_t n = instance.size();
    switch (config.orders.kind) {
        case OrderMode::Kind::given: return {ArrivalOrder::identity(n)};
        case OrderMode::Kind::file: return read_order_file(instance, config.orders.path);
        case OrderMode::Kind::all: {
            if (n > kMaxEnumeratedBoxes && !config.force_enumeration) {
                throw UsageError("refusing to enumerate " + std::to_string(n) +
                                 "! orders; pass --force-enumeration to override");
            }
            std::vector<std::size_t> perm(n);
            std::iota(perm.begin(), perm.end(), 0);
            std::vector<ArrivalOrder> out;
            do {
                out.emplace_back(perm);
            } while (std::next_permutation(perm.begin(), perm.end()));
            return out;
        }
        case OrderMode::Kind::random: {
            if (!config.seed) throw UsageError("random orders need --seed");
            Rng rng = Rng::stream(*config.seed, 0);
            std::vector<ArrivalOrder> out;
            for (std::size_t k = 0; k < config.orders.count; ++k) {
                std::vector<std::size_t> perm(n);
                std::iota(perm.begin(), perm.end(), 0);
                for (std::size_t i = n; i-- > 1;) {
                    const auto j = std::min<std::size_t>(i, static_cast<std::size_t>(rng.uniform() * (i + 1)));
                    std::swap(perm[i], perm[j]);
                }
                out.emplace_back(std::move(perm));
            }
            return out;
        }
    }
    return {};
}

RatioReport cmd_eval(const Instance& instance, const ExperimentConfig& config) {
    if (is_randomized(config.policy) && config.grid < 100) {
        throw UsageError("--grid must be at least 100 for randomized policies");
    }
    const auto orders = resolve_orders(instance, config);
    const double prophet = prophet_value(instance);
    const double tau = config.tau.value_or(config.policy == PolicyChoice::sta ? default_tau(instance) : 0.0);
    const DensitySpec density = density_for(config.policy);

    RatioReport report;
    report.rows.resize(orders.size());
    parallel_for(orders.size(), config.threads, [&](std::size_t i) {
        OrderEvaluator ev(instance, orders[i]);
        RatioRow row;
        row.order_index = i;
        row.order = orders[i].describe(instance);
        row.opt = ev.opt().total;
        if (config.policy == PolicyChoice::sta) {
            row.g0 = tau;
            row.alg = ev.sta(tau).total;
        } else if (is_randomized(config.policy)) {
            row.g0 = prophet;
            row.alg = randomized_value(ev, prophet, density, config.grid, base_kind(config.policy)).value;
        } else {
            row.g0 = resolve_target(config.g0, row.opt, prophet);
            row.alg = ev.evaluate(base_kind(config.policy), row.g0).total;
        }
        row.ratio = row.opt > 0.0 ? row.alg / row.opt : 1.0;
        report.rows[i] = std::move(row);
    });
    report.min_ratio = report.rows.front().ratio;
    for (const auto& r : report.rows) {
        if (r.ratio < report.min_ratio) {
            report.min_ratio = r.ratio;
            report.argmin = r.order_index;
        }
    }
    return report;
}

void write_ratio_csv(std::ostream& os, const RatioReport& report) {
    os << "order_index,order,opt,param,alg,ratio\n";
    for (const auto& r : report.rows) {
        os << r.order_index << ',' << csv_field(r.order) << ',';
        csv_number(os, r.opt) << ',';
        csv_number(os, r.g0) << ',';
        csv_number(os, r.alg) << ',';
        csv_number(os, r.ratio) << '\n';
    }
    os << "# min_ratio,";
    csv_number(os, report.min_ratio) << ",argmin_order_index," << report.argmin << '\n';
}

int cmd_hardness(const HardnessConfig& config, std::ostream& os) {
    if (config.dual_grid < 10000) throw UsageError("--grid must be at least 10000 for hardness");
    if (!(config.primal_step > 0.0 && config.primal_step < 0.5)) {
        throw UsageError("--primal-step must lie in (0, 0.5)");
    }
    const double scale = config.inject_broken ? 0.5 : 1.0;
    write_dual_csv_header(os);
    bool violated = false;
    for (const auto& d : {verify_dual_general(config.dual_grid, scale), verify_dual_tvd(config.dual_grid, scale)}) {
        DualReport named = d;
        named.bound_name = d.bound_name + "-dual";
        write_dual_csv_row(os, named);
        violated = violated || !(d.max_violation <= config.violation_tol);
    }

    std::vector<double> steps{config.primal_step};
    if (config.refine) {
        steps.clear();
        for (double s = 0.016; s >= config.primal_step * (1.0 - 1e-9); s /= 2.0) steps.push_back(s);
    }
    const double c = solve_c_tvd_hardness();
    for (const char* family : {"general-primal", "tvd-primal"}) {
        for (double step : steps) {
            const FiniteLP lp = std::string(family) == "general-primal" ? build_primal_general(step)
                                                                        : build_primal_tvd(c, step);
            const auto res = simplex_solve(lp);
            DualReport row;
            row.bound_name = family;
            row.grid = static_cast<int>(lp.variables()) - 1;
            if (res.status != SimplexStatus::optimal) {
                throw std::runtime_error(std::string(family) + " LP: " + to_string(res.status));
            }
            row.objective = res.value;
            row.max_violation = lp.max_violation(res.solution);
            write_dual_csv_row(os, row);
        }
    }
    return violated ? kExitCertificate : kExitOk;
}

std::vector<SimulationRow> cmd_simulate(const Instance& instance, const ExperimentConfig& config) {
    if (!config.seed) throw UsageError("simulate needs --seed");
    if (config.runs == 0) throw UsageError("--runs must be positive");
    const auto orders = resolve_orders(instance, config);
    const double prophet = prophet_value(instance);
    const double tau = config.tau.value_or(config.policy == PolicyChoice::sta ? default_tau(instance) : 0.0);
    const DensitySpec density = density_for(config.policy);
    const PolicyKind kind = base_kind(config.policy);

    struct Tally {
        double sum = 0.0;
        double sumsq = 0.0;
        double lo = 0.0;
        double hi = 0.0;
        std::size_t runs = 0;
    };
    const std::size_t streams = std::min(kSimulationStreams, config.runs);
    std::vector<Tally> tallies(orders.size() * streams);
    std::vector<double> exact(orders.size());
    std::vector<double> param(orders.size());

    for (std::size_t o = 0; o < orders.size(); ++o) {
        OrderEvaluator ev(instance, orders[o]);
        if (config.policy == PolicyChoice::sta) {
            param[o] = tau;
            exact[o] = ev.sta(tau).total;
        } else if (is_randomized(config.policy)) {
            param[o] = prophet;
            exact[o] = randomized_value(ev, prophet, density, std::max(config.grid, 100), kind).value;
        } else {
            param[o] = resolve_target(config.g0, ev.opt().total, prophet);
            exact[o] = ev.evaluate(kind, param[o]).total;
        }
    }

    parallel_for(tallies.size(), config.threads, [&](std::size_t job) {
        const std::size_t o = job / streams;
        const std::size_t s = job % streams;
        const std::size_t runs = config.runs / streams + (s < config.runs % streams ? 1 : 0);
        Rng rng = Rng::stream(*config.seed, job);
        OrderEvaluator ev(instance, orders[o]);
        Tally t;
        for (std::size_t r = 0; r < runs; ++r) {
            const double p = is_randomized(config.policy) ? sample_density(density, rng) * prophet : param[o];
            const double v = run_policy_sampled(kind, p, ev, rng);
            if (t.runs == 0) t.lo = t.hi = v;
            t.lo = std::min(t.lo, v);
            t.hi = std::max(t.hi, v);
            t.sum += v;
            t.sumsq += v * v;
            ++t.runs;
        }
        tallies[job] = t;
    });

    std::vector<SimulationRow> rows;
    for (std::size_t o = 0; o < orders.size(); ++o) {
        Tally all;
        for (std::size_t s = 0; s < streams; ++s) {
            const Tally& t = tallies[o * streams + s];
            if (t.runs == 0) continue;
            all.lo = all.runs == 0 ? t.lo : std::min(all.lo, t.lo);
            all.hi = all.runs == 0 ? t.hi : std::max(all.hi, t.hi);
            all.sum += t.sum;
            all.sumsq += t.sumsq;
            all.runs += t.runs;
        }
        SimulationRow row;
        row.order_index = o;
        row.order = orders[o].describe(instance);
        row.runs = all.runs;
        row.exact = exact[o];
        const double n = static_cast<double>(all.runs);
        if (all.lo == all.hi) {
            // Every run returned the same value.
            row.mean = all.lo;
            row.z = std::abs(row.mean - row.exact) <= kUserTol ? 0.0
                                                              : std::copysign(INFINITY, row.mean - row.exact);
        } else {
            row.mean = all.sum / n;
            const double var = std::max(0.0, (all.sumsq - n * row.mean * row.mean) / (n - 1.0));
            row.z = (row.mean - row.exact) / std::sqrt(var / n);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_simulation_csv(std::ostream& os, const std::vector<SimulationRow>& rows) {
    os << "order_index,order,runs,mean,exact,z\n";
    for (const auto& r : rows) {
        os << r.order_index << ',' << csv_field(r.order) << ',' << r.runs << ',';
        csv_number(os, r.mean) << ',';
        csv_number(os, r.exact) << ',';
        csv_number(os, r.z) << '\n';
    }
}

int cmd_verify_density(int y_grid, std::ostream& os) {
    if (y_grid < 1000) throw UsageError("--grid must be at least 1000 for verify-density");
    os << "density,c,gamma,mass,envelope,min_ratio,argmin_y\n";
    bool ok = true;
    struct Case {
        DensitySpec spec;
        Envelope env;
        const char* env_name;
    };
    const Case cases[] = {{density_656(), Envelope::tva, "tva"},
                          {density_656(), Envelope::tvd, "tvd"},
                          {density_732(), Envelope::tvd, "tvd"}};
    for (const auto& cs : cases) {
        const auto g = verify_guarantee(cs.spec, cs.env, y_grid);
        os << cs.spec.name << ',';
        csv_number(os, cs.spec.c) << ',';
        csv_number(os, cs.spec.gamma) << ',';
        csv_number(os, density_mass_numeric(cs.spec)) << ',' << cs.env_name << ',';
        csv_number(os, g.min_ratio) << ',';
        csv_number(os, g.argmin_y) << '\n';
        if (g.min_ratio < cs.spec.gamma - 1e-6) ok = false;
    }
    return ok ? kExitOk : kExitCertificate;
}

}  // namespace osel
