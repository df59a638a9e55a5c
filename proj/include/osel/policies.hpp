#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "osel/benchmarks.hpp"
#include "osel/densities.hpp"
#include "osel/distribution.hpp"
#include "osel/instance.hpp"

namespace osel {

enum class PolicyKind { sta, tva, tvd };

const char* to_string(PolicyKind k);

enum class Mode { targeted, conservative, terminated };

/// Mutable state of an order-unaware policy between arrivals.
///
/// In targeted mode `target` is the running goal g_t. After a switch the
/// policy keeps `threshold` until it accepts. A terminated state must not
/// be stepped again.
struct PolicyState {
    Mode mode = Mode::targeted;
    double target = 0.0;
    std::optional<std::size_t> switch_stage;
    std::optional<double> threshold;
    std::size_t stage = 0;

    static PolicyState start(double g0);
};

struct Decision {
    bool accept = false;
};

struct StepResult {
    PolicyState state;
    Decision decision;
};

/// Update g via inverse_target, then accept iff v >= g (1e-12 slack on ties).
StepResult tva_step(const PolicyState& state, const DiscreteDistribution& box, double value);

/// Detection step: `remaining` are the boxes strictly after the current one.
StepResult tvd_step(const PolicyState& state, const DiscreteDistribution& box,
                    std::span<const DiscreteDistribution* const> remaining, double value);

/// Same step with the suffix quantities supplied by the caller:
/// `expected_after` is E[max of later boxes] and `conservative_threshold`
/// yields the best single threshold over this box and all later ones.
StepResult tvd_step(const PolicyState& state, const DiscreteDistribution& box,
                    double expected_after, const std::function<double()>& conservative_threshold,
                    double value);

/// g_0 .. g_n for a fixed arrival order.
std::vector<double> targeted_values(const StageSequence& seq, double g0);

EvaluationResult tva_exact(const StageSequence& seq, double g0);
EvaluationResult tva_exact(const Instance& instance, const ArrivalOrder& order, double g0);

EvaluationResult tvd_exact(const Instance& instance, const ArrivalOrder& order, double g0);

/// Exact evaluators for one arrival order sharing the suffix-maximum tables
/// and the conservative thresholds across many g_0 values. Not thread safe;
/// give each worker its own instance.
class OrderEvaluator {
public:
    explicit OrderEvaluator(StageSequence seq);
    OrderEvaluator(const Instance& instance, const ArrivalOrder& order);

    const StageSequence& sequence() const { return seq_; }
    const SuffixMaxima& suffix() const { return suffix_; }

    EvaluationResult opt() const { return opt_online(seq_); }
    EvaluationResult sta(double tau) const { return sta_exact(seq_, tau); }
    EvaluationResult tva(double g0) const { return tva_exact(seq_, g0); }
    EvaluationResult tvd(double g0);
    EvaluationResult evaluate(PolicyKind kind, double g0_or_tau);

    /// Best single threshold over stages [s, n).
    const ThresholdChoice& conservative_threshold(std::size_t s);

private:
    StageSequence seq_;
    SuffixMaxima suffix_;
    std::vector<std::optional<ThresholdChoice>> thresholds_;
};

/// Sample every box in order and return the accepted value, or 0.
/// For sta the parameter is the threshold, otherwise g_0.
double run_policy_sampled(PolicyKind kind, double g0, const Instance& instance,
                          const ArrivalOrder& order, Rng& rng);
double run_policy_sampled(PolicyKind kind, double g0, OrderEvaluator& evaluator, Rng& rng);

struct QuadratureResult {
    double value = 0.0;
    /// |Q(N) - Q(2N)|.
    double error_bound = 0.0;
};

/// E_x[ALG(x * prophet)] with x drawn from the density. Each smooth piece is
/// cut into cells weighted by their exact mass; cells where ALG jumps are
/// bisected down to the jump.
QuadratureResult randomized_value(const Instance& instance, const ArrivalOrder& order,
                                  const DensitySpec& density, int grid_points,
                                  PolicyKind kind = PolicyKind::tvd);
QuadratureResult randomized_value(OrderEvaluator& evaluator, double prophet,
                                  const DensitySpec& density, int grid_points, PolicyKind kind);

}  // namespace osel
