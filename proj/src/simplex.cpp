#include "osel/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace osel {

namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kCostTol = 1e-11;
constexpr double kFeasTol = 1e-9;

class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), a_(rows * (cols + 1), 0.0), cost_(cols + 1, 0.0), basis_(rows) {}

    double& at(std::size_t i, std::size_t j) { return a_[i * (cols_ + 1) + j]; }
    double at(std::size_t i, std::size_t j) const { return a_[i * (cols_ + 1) + j]; }
    double& rhs(std::size_t i) { return at(i, cols_); }
    double rhs(std::size_t i) const { return at(i, cols_); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::vector<std::size_t>& basis() { return basis_; }
    std::vector<double>& reduced() { return cost_; }
    double objective() const { return cost_[cols_]; }

    // Reduced costs for maximizing c.x from the current basis.
    void price(const std::vector<double>& c) {
        for (std::size_t j = 0; j <= cols_; ++j) cost_[j] = j < cols_ ? -c[j] : 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) cost_[j] += cb * at(i, j);
        }
    }

    void pivot(std::size_t r, std::size_t col) {
        const double inv = 1.0 / at(r, col);
        double* prow = &a_[r * (cols_ + 1)];
        for (std::size_t j = 0; j <= cols_; ++j) prow[j] *= inv;
        prow[col] = 1.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            if (i == r) continue;
            double* row = &a_[i * (cols_ + 1)];
            const double f = row[col];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j <= cols_; ++j) row[j] -= f * prow[j];
            row[col] = 0.0;
        }
        const double f = cost_[col];
        if (f != 0.0) {
            for (std::size_t j = 0; j <= cols_; ++j) cost_[j] -= f * prow[j];
            cost_[col] = 0.0;
        }
        basis_[r] = col;
    }

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<double> a_;
    std::vector<double> cost_;
    std::vector<std::size_t> basis_;
};

// Runs simplex iterations on the priced tableau; columns with blocked[j] never enter.
SimplexStatus iterate(Tableau& t, const std::vector<bool>& blocked, PivotRule rule,
                      std::size_t& pivots) {
    const std::size_t limit = 50 * (t.rows() + t.cols()) + 1000;
    bool degenerate_run = false;
    for (std::size_t iter = 0; iter < limit; ++iter) {
        const auto& d = t.reduced();
        const bool bland = rule == PivotRule::bland || degenerate_run;
        std::size_t enter = t.cols();
        double best = -kCostTol;
        for (std::size_t j = 0; j < t.cols(); ++j) {
            if (blocked[j] || d[j] >= -kCostTol) continue;
            if (bland) {
                enter = j;
                break;
            }
            if (d[j] < best) {
                best = d[j];
                enter = j;
            }
        }
        if (enter == t.cols()) return SimplexStatus::optimal;

        std::size_t leave = t.rows();
        double ratio = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double a = t.at(i, enter);
            if (a <= kPivotTol) continue;
            const double r = std::max(t.rhs(i), 0.0) / a;
            if (r < ratio - 1e-12 ||
                (r <= ratio + 1e-12 && leave < t.rows() && t.basis()[i] < t.basis()[leave])) {
                if (r < ratio) ratio = r;
                leave = i;
            }
        }
        if (leave == t.rows()) return SimplexStatus::unbounded;
        degenerate_run = ratio <= 1e-12;
        t.pivot(leave, enter);
        ++pivots;
    }
    return SimplexStatus::iteration_limit;
}

}  // namespace

void FiniteLP::add_row(std::vector<double> coeffs, Sense sense, double rhs) {
    if (coeffs.size() != objective.size()) {
        throw std::invalid_argument("row width does not match the number of variables");
    }
    rows.push_back({std::move(coeffs), sense, rhs});
}

double FiniteLP::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (double v : x) worst = std::max(worst, -v);
    for (const auto& row : rows) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coeffs[j] * x[j];
        switch (row.sense) {
            case Sense::less_equal: worst = std::max(worst, lhs - row.rhs); break;
            case Sense::greater_equal: worst = std::max(worst, row.rhs - lhs); break;
            case Sense::equal: worst = std::max(worst, std::abs(lhs - row.rhs)); break;
        }
    }
    return worst;
}

const char* to_string(SimplexStatus s) {
    switch (s) {
        case SimplexStatus::optimal: return "optimal";
        case SimplexStatus::infeasible: return "infeasible";
        case SimplexStatus::unbounded: return "unbounded";
        case SimplexStatus::iteration_limit: return "iteration-limit";
    }
    return "?";
}

SimplexResult simplex_solve(const FiniteLP& lp, PivotRule rule) {
    const std::size_t n = lp.variables();
    const std::size_t m = lp.rows.size();
    for (const auto& row : lp.rows) {
        if (row.coeffs.size() != n) throw std::invalid_argument("malformed LP row");
    }

    // Flip rows so every right-hand side is nonnegative.
    std::vector<Sense> senses(m);
    std::vector<double> sign(m, 1.0);
    std::size_t slacks = 0;
    std::size_t artificials = 0;
    for (std::size_t i = 0; i < m; ++i) {
        Sense s = lp.rows[i].sense;
        if (lp.rows[i].rhs < 0.0) {
            sign[i] = -1.0;
            if (s == Sense::less_equal) {
                s = Sense::greater_equal;
            } else if (s == Sense::greater_equal) {
                s = Sense::less_equal;
            }
        }
        senses[i] = s;
        if (s != Sense::equal) ++slacks;
        if (s != Sense::less_equal) ++artificials;
    }

    const std::size_t cols = n + slacks + artificials;
    Tableau t(m, cols);
    std::vector<bool> is_artificial(cols, false);
    std::size_t next_slack = n;
    std::size_t next_art = n + slacks;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) t.at(i, j) = sign[i] * lp.rows[i].coeffs[j];
        t.rhs(i) = sign[i] * lp.rows[i].rhs;
        switch (senses[i]) {
            case Sense::less_equal:
                t.at(i, next_slack) = 1.0;
                t.basis()[i] = next_slack++;
                break;
            case Sense::greater_equal:
                t.at(i, next_slack++) = -1.0;
                [[fallthrough]];
            case Sense::equal:
                t.at(i, next_art) = 1.0;
                is_artificial[next_art] = true;
                t.basis()[i] = next_art++;
                break;
        }
    }

    SimplexResult result;
    std::vector<bool> blocked(cols, false);
    if (artificials > 0) {
        std::vector<double> phase1(cols, 0.0);
        for (std::size_t j = 0; j < cols; ++j) {
            if (is_artificial[j]) phase1[j] = -1.0;
        }
        t.price(phase1);
        const auto status = iterate(t, blocked, rule, result.pivots);
        if (status == SimplexStatus::iteration_limit) {
            result.status = status;
            return result;
        }
        if (t.objective() < -kFeasTol) {
            result.status = SimplexStatus::infeasible;
            return result;
        }
        // Drive zero-valued artificials out of the basis where possible.
        for (std::size_t i = 0; i < m; ++i) {
            if (!is_artificial[t.basis()[i]]) continue;
            for (std::size_t j = 0; j < cols; ++j) {
                if (!is_artificial[j] && std::abs(t.at(i, j)) > kPivotTol) {
                    t.pivot(i, j);
                    ++result.pivots;
                    break;
                }
            }
        }
        blocked = is_artificial;
    }

    std::vector<double> c(cols, 0.0);
    const double dir = lp.direction == Direction::maximize ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n; ++j) c[j] = dir * lp.objective[j];
    t.price(c);
    result.status = iterate(t, blocked, rule, result.pivots);
    if (result.status != SimplexStatus::optimal) return result;

    result.solution.assign(n, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        if (t.basis()[i] < n) result.solution[t.basis()[i]] = std::max(t.rhs(i), 0.0);
    }
    result.value = 0.0;
    for (std::size_t j = 0; j < n; ++j) result.value += lp.objective[j] * result.solution[j];
    return result;
}

}  // namespace osel
