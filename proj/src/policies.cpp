#include "osel/policies.hpp"

#include <cmath>
#include <stdexcept>

#include "osel/tolerance.hpp"

namespace osel {

const char* to_string(PolicyKind k) {
    switch (k) {
        case PolicyKind::sta: return "sta";
        case PolicyKind::tva: return "tva";
        case PolicyKind::tvd: return "tvd";
    }
    return "?";
}

PolicyState PolicyState::start(double g0) {
    if (g0 < 0.0) throw std::invalid_argument("targeted value must be nonnegative");
    PolicyState s;
    s.target = g0;
    return s;
}

namespace {

bool meets_target(double value, double target) { return value >= target - kExactTol; }

void require_live(const PolicyState& state) {
    if (state.mode == Mode::terminated) {
        throw std::logic_error("policy already accepted a box");
    }
}

StepResult finish_step(PolicyState next, bool accept) {
    ++next.stage;
    if (accept) next.mode = Mode::terminated;
    return {next, Decision{accept}};
}

}  // namespace

StepResult tva_step(const PolicyState& state, const DiscreteDistribution& box, double value) {
    require_live(state);
    if (state.mode != Mode::targeted) throw std::logic_error("tva_step on a conservative state");
    PolicyState next = state;
    next.target = inverse_target(box, state.target);
    return finish_step(next, meets_target(value, next.target));
}

StepResult tvd_step(const PolicyState& state, const DiscreteDistribution& box,
                    double expected_after, const std::function<double()>& conservative_threshold,
                    double value) {
    require_live(state);
    PolicyState next = state;
    if (state.mode == Mode::conservative) {
        return finish_step(next, value >= *state.threshold);
    }
    next.target = inverse_target(box, state.target);
    if (next.target > expected_after + kExactTol) {
        next.mode = Mode::conservative;
        next.switch_stage = state.stage;
        next.threshold = conservative_threshold();
        return finish_step(next, value >= *next.threshold);
    }
    return finish_step(next, meets_target(value, next.target));
}

StepResult tvd_step(const PolicyState& state, const DiscreteDistribution& box,
                    std::span<const DiscreteDistribution* const> remaining, double value) {
    const double expected_after = remaining.empty() ? 0.0 : max_distribution(remaining).mean();
    auto threshold = [&] {
        std::vector<const DiscreteDistribution*> scope{&box};
        scope.insert(scope.end(), remaining.begin(), remaining.end());
        return best_single_threshold(scope).tau;
    };
    return tvd_step(state, box, expected_after, threshold, value);
}

std::vector<double> targeted_values(const StageSequence& seq, double g0) {
    if (g0 < 0.0) throw std::invalid_argument("targeted value must be nonnegative");
    std::vector<double> g;
    g.reserve(seq.size() + 1);
    g.push_back(g0);
    for (const auto* d : seq) g.push_back(inverse_target(*d, g.back()));
    return g;
}

namespace {

double accept_step(const DiscreteDistribution& d, double target, double next, bool exact) {
    double taken = 0.0;
    double below = 0.0;
    for (const Atom& a : d.atoms()) {
        if (exact ? a.value >= target : meets_target(a.value, target)) {
            taken += a.prob * a.value;
        } else {
            below += a.prob;
        }
    }
    return taken + below * next;
}

}  // namespace

EvaluationResult tva_exact(const StageSequence& seq, double g0) {
    EvaluationResult res;
    res.recursion = Recursion::targeted;
    res.targets = targeted_values(seq, g0);
    const std::size_t n = seq.size();
    res.per_stage.assign(n + 1, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        res.per_stage[t] = accept_step(*seq[t], res.targets[t + 1], res.per_stage[t + 1], false);
    }
    res.total = res.per_stage.front();
    return res;
}

EvaluationResult tva_exact(const Instance& instance, const ArrivalOrder& order, double g0) {
    return tva_exact(arrange(instance, order), g0);
}

EvaluationResult tvd_exact(const Instance& instance, const ArrivalOrder& order, double g0) {
    OrderEvaluator ev(instance, order);
    return ev.tvd(g0);
}

OrderEvaluator::OrderEvaluator(StageSequence seq)
    : seq_(std::move(seq)), suffix_(seq_), thresholds_(seq_.size()) {}

OrderEvaluator::OrderEvaluator(const Instance& instance, const ArrivalOrder& order)
    : OrderEvaluator(arrange(instance, order)) {}

const ThresholdChoice& OrderEvaluator::conservative_threshold(std::size_t s) {
    auto& slot = thresholds_.at(s);
    if (!slot) slot = best_single_threshold_of_max(suffix_.max_from(s));
    return *slot;
}

EvaluationResult OrderEvaluator::tvd(double g0) {
    if (g0 < 0.0) throw std::invalid_argument("targeted value must be nonnegative");
    EvaluationResult res;
    res.recursion = Recursion::targeted_detection;
    const std::size_t n = seq_.size();
    res.targets.push_back(g0);
    for (std::size_t t = 0; t < n; ++t) {
        const double g = inverse_target(*seq_[t], res.targets.back());
        res.targets.push_back(g);
        if (g > suffix_.expected_max_after(t) + kExactTol) {
            res.switch_stage = t;
            res.threshold = conservative_threshold(t).tau;
            break;
        }
    }
    const std::size_t s = res.switch_stage.value_or(n);
    res.per_stage.assign(n + 1, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        res.per_stage[t] = t >= s
                               ? accept_step(*seq_[t], *res.threshold, res.per_stage[t + 1], true)
                               : accept_step(*seq_[t], res.targets[t + 1], res.per_stage[t + 1], false);
    }
    res.total = res.per_stage.front();
    return res;
}

EvaluationResult OrderEvaluator::evaluate(PolicyKind kind, double g0_or_tau) {
    switch (kind) {
        case PolicyKind::sta: return sta(g0_or_tau);
        case PolicyKind::tva: return tva(g0_or_tau);
        case PolicyKind::tvd: return tvd(g0_or_tau);
    }
    throw std::invalid_argument("unknown policy kind");
}

double run_policy_sampled(PolicyKind kind, double g0, OrderEvaluator& evaluator, Rng& rng) {
    const auto& seq = evaluator.sequence();
    if (kind == PolicyKind::sta) {
        for (const auto* d : seq) {
            const double v = sample(*d, rng);
            if (v >= g0) return v;
        }
        return 0.0;
    }
    PolicyState state = PolicyState::start(g0);
    for (std::size_t t = 0; t < seq.size(); ++t) {
        const double v = sample(*seq[t], rng);
        StepResult step;
        if (kind == PolicyKind::tva) {
            step = tva_step(state, *seq[t], v);
        } else {
            step = tvd_step(state, *seq[t], evaluator.suffix().expected_max_after(t),
                            [&] { return evaluator.conservative_threshold(t).tau; }, v);
        }
        if (step.decision.accept) return v;
        state = step.state;
    }
    return 0.0;
}

double run_policy_sampled(PolicyKind kind, double g0, const Instance& instance,
                          const ArrivalOrder& order, Rng& rng) {
    OrderEvaluator ev(instance, order);
    return run_policy_sampled(kind, g0, ev, rng);
}

namespace {

// ALG(g0) is piecewise constant: targets move monotonically with g0 and the
// value changes only when an acceptance set (or the switch stage) does. Cells
// whose end values agree contribute value * mass; the others are bisected
// until the jump is pinned to a sliver, which takes its midpoint value.
struct CellIntegrator {
    OrderEvaluator& ev;
    const DensitySpec& density;
    double prophet;
    PolicyKind kind;

    double alg(double x) const { return ev.evaluate(kind, x * prophet).total; }

    static bool same(double u, double v) { return std::abs(u - v) <= kExactTol * std::max(1.0, std::abs(u)); }

    double cell(double a, double b, double fa, double fb, int depth) const {
        const double mass = density_cdf(density, b) - density_cdf(density, a);
        if (same(fa, fb)) return mass * fa;
        const double m = 0.5 * (a + b);
        if (depth >= 48 || !(m > a && m < b)) return mass * alg(m);
        const double fm = alg(m);
        return cell(a, m, fa, fm, depth + 1) + cell(m, b, fm, fb, depth + 1);
    }
};

double quadrature(OrderEvaluator& ev, double prophet, const DensitySpec& density, int points,
                  PolicyKind kind) {
    if (density.is_point_mass()) {
        return ev.evaluate(kind, density.pieces.front().lo * prophet).total;
    }
    double support = 0.0;
    for (const auto& p : density.pieces) {
        if (p.kind != PieceKind::zero) support += p.hi - p.lo;
    }
    const CellIntegrator integ{ev, density, prophet, kind};
    double sum = 0.0;
    for (const auto& p : density.pieces) {
        if (p.kind == PieceKind::zero || !(p.hi > p.lo)) continue;
        const int cells =
            std::max(1, static_cast<int>(std::lround(points * (p.hi - p.lo) / support)));
        const double h = (p.hi - p.lo) / cells;
        double a = p.lo;
        double fa = integ.alg(a);
        for (int i = 0; i < cells; ++i) {
            const double b = (i + 1 == cells) ? p.hi : p.lo + (i + 1) * h;
            const double fb = integ.alg(b);
            sum += integ.cell(a, b, fa, fb, 0);
            a = b;
            fa = fb;
        }
    }
    return sum;
}

}  // namespace

QuadratureResult randomized_value(OrderEvaluator& evaluator, double prophet,
                                  const DensitySpec& density, int grid_points, PolicyKind kind) {
    if (grid_points < 100) throw std::invalid_argument("randomized_value needs grid_points >= 100");
    if (kind == PolicyKind::sta) {
        throw std::invalid_argument("randomized targets apply to tva or tvd only");
    }
    QuadratureResult r;
    r.value = quadrature(evaluator, prophet, density, grid_points, kind);
    const double fine = density.is_point_mass()
                            ? r.value
                            : quadrature(evaluator, prophet, density, 2 * grid_points, kind);
    r.error_bound = std::abs(fine - r.value);
    return r;
}

QuadratureResult randomized_value(const Instance& instance, const ArrivalOrder& order,
                                  const DensitySpec& density, int grid_points, PolicyKind kind) {
    OrderEvaluator ev(instance, order);
    return randomized_value(ev, prophet_value(instance), density, grid_points, kind);
}

}  // namespace osel
