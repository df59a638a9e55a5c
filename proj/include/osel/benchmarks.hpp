#pragma once

#include <optional>
#include <span>
#include <vector>

#include "osel/distribution.hpp"
#include "osel/instance.hpp"

namespace osel {

/// Which recursion filled an EvaluationResult.
enum class Recursion { online_optimum, single_threshold, targeted, targeted_detection, two_threshold };

const char* to_string(Recursion r);

/// Exact value-to-go vector for a fixed arrival order.
///
/// Stages are 0-based: per_stage[t] is the expected reward collected from
/// stage t to the end, and per_stage[n] = 0. For the targeted policies the
/// targets g_0..g_n are kept as well, and for the detection policy the stage
/// and threshold of the switch to single-threshold mode, if it happened.
struct EvaluationResult {
    Recursion recursion = Recursion::online_optimum;
    std::vector<double> per_stage;
    double total = 0.0;
    std::vector<double> targets;
    std::optional<std::size_t> switch_stage;
    std::optional<double> threshold;

    std::size_t stages() const { return per_stage.size() - 1; }
};

struct ThresholdChoice {
    double tau = 0.0;
    double value = 0.0;
};

/// Pr[M >= tau] * tau + Pr[M < tau] * E[(M - tau)^+] for M ~ max_dist.
double threshold_objective(const DiscreteDistribution& max_dist, double tau);

/// Backward induction OPT_t = E[max(v_t, OPT_{t+1})].
EvaluationResult opt_online(const StageSequence& seq);
EvaluationResult opt_online(const Instance& instance, const ArrivalOrder& order);

/// E[max_t v_t].
double prophet_value(const Instance& instance);

/// Accept the first value >= tau.
EvaluationResult sta_exact(const StageSequence& seq, double tau);
EvaluationResult sta_exact(const Instance& instance, const ArrivalOrder& order, double tau);

/// Order-independent lower bound on the single-threshold reward.
double sta_lower_bound(const Instance& instance, double tau);

/// Maximizer of threshold_objective over {0} and the atoms of the max
/// distribution; the smallest tau wins ties (within 1e-12).
ThresholdChoice best_single_threshold(std::span<const DiscreteDistribution* const> suffix);
ThresholdChoice best_single_threshold_of_max(const DiscreteDistribution& max_dist);

/// Threshold `early` on stages [0, switch_stage) then `late` to the end.
EvaluationResult two_threshold_exact(const StageSequence& seq, double early,
                                     std::size_t switch_stage, double late);

/// Suffix maxima of a stage sequence, precomputed once per order.
///
/// Holds Pr[max_{i >= t} v_i <= u] on the union support for every t, so
/// the detection comparison and the conservative threshold are lookups.
class SuffixMaxima {
public:
    explicit SuffixMaxima(const StageSequence& seq);

    std::size_t stages() const { return expected_from_.size() - 1; }

    /// E[max_{i >= t} v_i]; 0 for t = n.
    double expected_max_from(std::size_t t) const { return expected_from_[t]; }
    /// E[max_{i > t} v_i]; 0 for the last stage.
    double expected_max_after(std::size_t t) const { return expected_from_[t + 1]; }

    /// Distribution of max_{i >= t} v_i, t < n.
    DiscreteDistribution max_from(std::size_t t) const;

private:
    std::vector<double> support_;
    std::vector<std::vector<double>> cdf_from_;
    std::vector<double> expected_from_;
};

}  // namespace osel
