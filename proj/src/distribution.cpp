#include "osel/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "osel/tolerance.hpp"

namespace osel {

Probability::Probability(double p) {
    if (!(p >= -kExactTol && p <= 1.0 + kExactTol)) {
        throw std::invalid_argument("probability out of range: " + std::to_string(p));
    }
    p_ = std::clamp(p, 0.0, 1.0);
}

DiscreteDistribution::DiscreteDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) throw std::invalid_argument("distribution has no atoms");
    double total = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        const Atom& a = atoms_[i];
        if (!std::isfinite(a.value) || a.value < 0.0) {
            throw std::invalid_argument("atom value must be finite and nonnegative");
        }
        if (!(a.prob > 0.0 && a.prob <= 1.0)) {
            throw std::invalid_argument("atom probability must lie in (0, 1]");
        }
        if (i > 0 && !(atoms_[i - 1].value < a.value)) {
            throw std::invalid_argument("atoms must be sorted strictly ascending");
        }
        total += a.prob;
    }
    if (std::abs(total - 1.0) > kExactTol) {
        throw std::invalid_argument("atom probabilities sum to " + std::to_string(total));
    }
    cumulative_.reserve(atoms_.size());
    double running = 0.0;
    for (const Atom& a : atoms_) {
        running += a.prob;
        cumulative_.push_back(std::min(running, 1.0));
        mean_ += a.prob * a.value;
    }
    cumulative_.back() = 1.0;
}

DiscreteDistribution DiscreteDistribution::from_unsorted(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    merged.reserve(atoms.size());
    for (const Atom& a : atoms) {
        if (a.prob == 0.0) continue;
        if (!merged.empty() && merged.back().value == a.value) {
            // Rounding can push a merged mass a hair past 1.
            merged.back().prob = Probability(merged.back().prob + a.prob);
        } else {
            merged.push_back(a);
        }
    }
    return DiscreteDistribution(std::move(merged));
}

DiscreteDistribution DiscreteDistribution::point(double value) {
    return DiscreteDistribution({{value, 1.0}});
}

double DiscreteDistribution::cdf(double x) const {
    auto it = std::upper_bound(atoms_.begin(), atoms_.end(), x,
                               [](double v, const Atom& a) { return v < a.value; });
    if (it == atoms_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

double DiscreteDistribution::cdf_below(double x) const {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), x,
                               [](const Atom& a, double v) { return a.value < v; });
    if (it == atoms_.begin()) return 0.0;
    return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
}

bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return std::equal(a.atoms_.begin(), a.atoms_.end(), b.atoms_.begin(), b.atoms_.end(),
                      [](const Atom& x, const Atom& y) {
                          return x.value == y.value && x.prob == y.prob;
                      });
}

Probability prob_ge(const DiscreteDistribution& dist, double tau) {
    return Probability(1.0 - dist.cdf_below(tau));
}

double expected_plus(const DiscreteDistribution& dist, double tau) {
    double sum = 0.0;
    for (const Atom& a : dist.atoms()) {
        if (a.value > tau) sum += a.prob * (a.value - tau);
    }
    return sum;
}

double expected_max_with(const DiscreteDistribution& dist, double x) {
    if (x < 0.0) throw std::invalid_argument("expected_max_with requires x >= 0");
    double below = 0.0;
    double upper = 0.0;
    for (const Atom& a : dist.atoms()) {
        if (a.value < x) {
            below += a.prob;
        } else {
            upper += a.prob * a.value;
        }
    }
    return x * below + upper;
}

double inverse_target(const DiscreteDistribution& dist, double g_prev) {
    if (g_prev < 0.0) throw std::invalid_argument("inverse_target requires g_prev >= 0");
    const double mean = dist.mean();
    const double snap = kSnapTol * std::max(1.0, g_prev);
    if (g_prev <= mean + snap) return 0.0;

    // h(a_k) = a_k * Pr[v < a_k] + sum_{j >= k} p_j a_j, evaluated left to right.
    const auto atoms = dist.atoms();
    double mass_below = 0.0;     // Pr[v < a_k]
    double weighted_below = 0.0; // sum_{j < k} p_j a_j
    double left = 0.0;
    double h_left = mean;
    for (const Atom& a : atoms) {
        if (a.value > 0.0) {
            const double h_here = a.value * mass_below + (mean - weighted_below);
            if (h_here >= g_prev - snap) {
                if (h_here <= g_prev + snap) return std::min(a.value, g_prev);
                // mass_below > 0 here: h is flat only on [0, a_0] where h = mean < g_prev.
                const double x = left + (g_prev - h_left) / mass_below;
                return std::clamp(x, left, std::min(a.value, g_prev));
            }
            left = a.value;
            h_left = h_here;
        }
        mass_below += a.prob;
        weighted_below += a.prob * a.value;
    }
    // Past the largest atom E[max(v, x)] = x.
    return g_prev;
}

namespace {

DiscreteDistribution max_of(std::span<const DiscreteDistribution* const> dists) {
    if (dists.empty()) throw std::invalid_argument("max_distribution of an empty list");
    std::vector<double> support;
    for (const auto* d : dists) {
        for (const Atom& a : d->atoms()) support.push_back(a.value);
    }
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    std::vector<double> joint(support.size(), 1.0);
    for (const auto* d : dists) {
        const auto atoms = d->atoms();
        std::size_t k = 0;
        double cdf = 0.0;
        for (std::size_t u = 0; u < support.size(); ++u) {
            while (k < atoms.size() && atoms[k].value <= support[u]) {
                cdf = (k + 1 == atoms.size()) ? 1.0 : std::min(cdf + atoms[k].prob, 1.0);
                ++k;
            }
            joint[u] *= cdf;
        }
    }

    std::vector<Atom> atoms;
    double prev = 0.0;
    for (std::size_t u = 0; u < support.size(); ++u) {
        const double p = joint[u] - prev;
        if (p > 0.0) atoms.push_back({support[u], p});
        prev = joint[u];
    }
    return DiscreteDistribution(std::move(atoms));
}

}  // namespace

DiscreteDistribution max_distribution(std::span<const DiscreteDistribution* const> dists) {
    return max_of(dists);
}

DiscreteDistribution max_distribution(std::span<const DiscreteDistribution> dists) {
    std::vector<const DiscreteDistribution*> ptrs;
    ptrs.reserve(dists.size());
    for (const auto& d : dists) ptrs.push_back(&d);
    return max_of(ptrs);
}

Rng::Rng(std::uint64_t seed) : Rng(stream(seed, 0)) {}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32), 0x9e3779b9u};
    return Rng(std::mt19937_64(seq));
}

double Rng::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double sample(const DiscreteDistribution& dist, Rng& rng) {
    const double u = rng.uniform();
    double running = 0.0;
    const auto atoms = dist.atoms();
    for (std::size_t i = 0; i + 1 < atoms.size(); ++i) {
        running += atoms[i].prob;
        if (u < running) return atoms[i].value;
    }
    return atoms.back().value;
}

}  // namespace osel
