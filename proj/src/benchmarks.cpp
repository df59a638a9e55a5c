#include "osel/benchmarks.hpp"

#include <algorithm>
#include <stdexcept>

#include "osel/tolerance.hpp"

namespace osel {

const char* to_string(Recursion r) {
    switch (r) {
        case Recursion::online_optimum: return "opt";
        case Recursion::single_threshold: return "sta";
        case Recursion::targeted: return "tva";
        case Recursion::targeted_detection: return "tvd";
        case Recursion::two_threshold: return "two-threshold";
    }
    return "?";
}

namespace {

EvaluationResult empty_result(Recursion r, std::size_t n) {
    EvaluationResult res;
    res.recursion = r;
    res.per_stage.assign(n + 1, 0.0);
    return res;
}

// E[v 1{v >= tau}] + Pr[v < tau] * next
double threshold_step(const DiscreteDistribution& d, double tau, double next) {
    double taken = 0.0;
    double below = 0.0;
    for (const Atom& a : d.atoms()) {
        if (a.value >= tau) {
            taken += a.prob * a.value;
        } else {
            below += a.prob;
        }
    }
    return taken + below * next;
}

}  // namespace

double threshold_objective(const DiscreteDistribution& max_dist, double tau) {
    const double p_ge = prob_ge(max_dist, tau);
    return p_ge * tau + (1.0 - p_ge) * expected_plus(max_dist, tau);
}

EvaluationResult opt_online(const StageSequence& seq) {
    const std::size_t n = seq.size();
    auto res = empty_result(Recursion::online_optimum, n);
    for (std::size_t t = n; t-- > 0;) {
        res.per_stage[t] = expected_max_with(*seq[t], res.per_stage[t + 1]);
    }
    res.total = res.per_stage.front();
    return res;
}

EvaluationResult opt_online(const Instance& instance, const ArrivalOrder& order) {
    return opt_online(arrange(instance, order));
}

double prophet_value(const Instance& instance) {
    std::vector<const DiscreteDistribution*> dists;
    for (const Box& b : instance.boxes()) dists.push_back(&b.dist);
    return max_distribution(dists).mean();
}

EvaluationResult sta_exact(const StageSequence& seq, double tau) {
    if (tau < 0.0) throw std::invalid_argument("threshold must be nonnegative");
    const std::size_t n = seq.size();
    auto res = empty_result(Recursion::single_threshold, n);
    for (std::size_t t = n; t-- > 0;) {
        res.per_stage[t] = threshold_step(*seq[t], tau, res.per_stage[t + 1]);
    }
    res.total = res.per_stage.front();
    res.threshold = tau;
    return res;
}

EvaluationResult sta_exact(const Instance& instance, const ArrivalOrder& order, double tau) {
    return sta_exact(arrange(instance, order), tau);
}

double sta_lower_bound(const Instance& instance, double tau) {
    if (tau < 0.0) throw std::invalid_argument("threshold must be nonnegative");
    std::vector<const DiscreteDistribution*> dists;
    for (const Box& b : instance.boxes()) dists.push_back(&b.dist);
    return threshold_objective(max_distribution(dists), tau);
}

ThresholdChoice best_single_threshold_of_max(const DiscreteDistribution& max_dist) {
    // Between atoms the objective is q^2 tau + const with q = Pr[M >= next atom],
    // so its supremum over each gap is reached at the atom closing the gap.
    const auto atoms = max_dist.atoms();
    ThresholdChoice best{0.0, threshold_objective(max_dist, 0.0)};
    double tail_mass = 1.0;
    double tail_weighted = max_dist.mean();
    for (const Atom& a : atoms) {
        // At tau = a: Pr[M >= a] = tail_mass, E[(M - a)^+] sums atoms strictly above a.
        const double above_mass = tail_mass - a.prob;
        const double above_weighted = tail_weighted - a.prob * a.value;
        const double plus = std::max(0.0, above_weighted - a.value * above_mass);
        const double value = tail_mass * a.value + (1.0 - tail_mass) * plus;
        if (value > best.value + kExactTol) best = {a.value, value};
        tail_mass = above_mass;
        tail_weighted = above_weighted;
    }
    return best;
}

ThresholdChoice best_single_threshold(std::span<const DiscreteDistribution* const> suffix) {
    return best_single_threshold_of_max(max_distribution(suffix));
}

EvaluationResult two_threshold_exact(const StageSequence& seq, double early,
                                     std::size_t switch_stage, double late) {
    const std::size_t n = seq.size();
    auto res = empty_result(Recursion::two_threshold, n);
    for (std::size_t t = n; t-- > 0;) {
        const double tau = t < switch_stage ? early : late;
        res.per_stage[t] = threshold_step(*seq[t], tau, res.per_stage[t + 1]);
    }
    res.total = res.per_stage.front();
    return res;
}

SuffixMaxima::SuffixMaxima(const StageSequence& seq) {
    const std::size_t n = seq.size();
    for (const auto* d : seq) {
        for (const Atom& a : d->atoms()) support_.push_back(a.value);
    }
    std::sort(support_.begin(), support_.end());
    support_.erase(std::unique(support_.begin(), support_.end()), support_.end());

    const std::size_t u_count = support_.size();
    cdf_from_.assign(n + 1, std::vector<double>(u_count, 1.0));
    expected_from_.assign(n + 1, 0.0);
    for (std::size_t t = n; t-- > 0;) {
        const auto atoms = seq[t]->atoms();
        const auto& next = cdf_from_[t + 1];
        auto& cur = cdf_from_[t];
        std::size_t k = 0;
        double cdf = 0.0;
        double prev = 0.0;
        double mean = 0.0;
        for (std::size_t u = 0; u < u_count; ++u) {
            while (k < atoms.size() && atoms[k].value <= support_[u]) {
                cdf = (k + 1 == atoms.size()) ? 1.0 : std::min(cdf + atoms[k].prob, 1.0);
                ++k;
            }
            cur[u] = next[u] * cdf;
            mean += support_[u] * (cur[u] - prev);
            prev = cur[u];
        }
        expected_from_[t] = mean;
    }
}

DiscreteDistribution SuffixMaxima::max_from(std::size_t t) const {
    if (t >= stages()) throw std::out_of_range("max_from past the last stage");
    const auto& cdf = cdf_from_[t];
    std::vector<Atom> atoms;
    double prev = 0.0;
    for (std::size_t u = 0; u < support_.size(); ++u) {
        const double p = cdf[u] - prev;
        if (p > 0.0) atoms.push_back({support_[u], p});
        prev = cdf[u];
    }
    return DiscreteDistribution(std::move(atoms));
}

}  // namespace osel
