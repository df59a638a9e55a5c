#pragma once

#include <string>
#include <vector>

namespace osel {

enum class Sense { less_equal, greater_equal, equal };
enum class Direction { maximize, minimize };

struct LinearRow {
    std::vector<double> coeffs;
    Sense sense = Sense::less_equal;
    double rhs = 0.0;
};

/// Dense LP over nonnegative variables: optimize c.x subject to the rows.
struct FiniteLP {
    Direction direction = Direction::maximize;
    std::vector<double> objective;
    std::vector<LinearRow> rows;
    std::vector<std::string> names;

    std::size_t variables() const { return objective.size(); }
    void add_row(std::vector<double> coeffs, Sense sense, double rhs);
    /// Largest amount by which x breaks a row or a sign bound.
    double max_violation(const std::vector<double>& x) const;
};

enum class SimplexStatus { optimal, infeasible, unbounded, iteration_limit };

const char* to_string(SimplexStatus s);

enum class PivotRule {
    bland,
    /// Largest reduced cost, falling back to Bland's rule while pivots are degenerate.
    dantzig_bland_fallback,
};

struct SimplexResult {
    SimplexStatus status = SimplexStatus::infeasible;
    double value = 0.0;
    std::vector<double> solution;
    std::size_t pivots = 0;
};

/// Two-phase tableau simplex.
SimplexResult simplex_solve(const FiniteLP& lp, PivotRule rule = PivotRule::dantzig_bland_fallback);

}  // namespace osel
