#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace osel {

struct Atom {
    double value;
    double prob;
};

/// A probability in [0, 1]. Inputs within 1e-12 outside the interval are
/// clamped; anything further out is rejected.
class Probability {
public:
    Probability() = default;
    explicit Probability(double p);

    double value() const { return p_; }
    operator double() const { return p_; }

private:
    double p_ = 0.0;
};

/// Finite distribution over nonnegative reals.
///
/// Atoms are kept sorted strictly ascending by value, every probability lies
/// in (0, 1] and the total mass is 1 within 1e-12. The cumulative vector is
/// cached so that CDF queries are a binary search; its last entry is exactly 1.
class DiscreteDistribution {
public:
    /// Validates and takes ownership of sorted, distinct atoms.
    explicit DiscreteDistribution(std::vector<Atom> atoms);

    /// Sorts, merges equal values and drops zero-mass atoms before validating.
    static DiscreteDistribution from_unsorted(std::vector<Atom> atoms);

    static DiscreteDistribution point(double value);

    std::span<const Atom> atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    double min_value() const { return atoms_.front().value; }
    double max_value() const { return atoms_.back().value; }
    double mean() const { return mean_; }

    /// Pr[v <= x].
    double cdf(double x) const;
    /// Pr[v < x].
    double cdf_below(double x) const;

    friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b);

private:
    std::vector<Atom> atoms_;
    std::vector<double> cumulative_;
    double mean_ = 0.0;
};

/// Pr[v >= tau]; atoms equal to tau count.
Probability prob_ge(const DiscreteDistribution& dist, double tau);

/// E[(v - tau)^+].
double expected_plus(const DiscreteDistribution& dist, double tau);

/// E[max(v, x)] for x >= 0.
double expected_max_with(const DiscreteDistribution& dist, double x);

/// Smallest x >= 0 with E[max(v, x)] >= g_prev.
///
/// E[max(v, x)] is piecewise linear with breakpoints at the atoms, so the
/// root is found by locating the first breakpoint that reaches g_prev and
/// solving the linear piece to its left. Returns exactly 0 when
/// g_prev <= E[v] + 1e-12, and snaps to a breakpoint when that breakpoint
/// already meets g_prev within 1e-12. The result never exceeds g_prev.
double inverse_target(const DiscreteDistribution& dist, double g_prev);

/// Distribution of the componentwise maximum of independent draws.
DiscreteDistribution max_distribution(std::span<const DiscreteDistribution* const> dists);
DiscreteDistribution max_distribution(std::span<const DiscreteDistribution> dists);

/// Seeded generator with a platform-independent uniform draw.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent stream for worker `index` derived from a base seed.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();

private:
    explicit Rng(std::mt19937_64 engine) : engine_(engine) {}
    std::mt19937_64 engine_;
};

double sample(const DiscreteDistribution& dist, Rng& rng);

}  // namespace osel
