#include "fair_amdp/lp.hpp"

#include <cmath>
#include <limits>

namespace fairmdp {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-8;

/**
 * Dense tableau with columns [structural | surplus | artificial | rhs].
 * The artificial block starts as the identity, so after any sequence of
 * pivots it holds B^{-1}; duals follow as c_B^T B^{-1}.
 */
struct Tableau {
    Mat body;                // n_rows x (n_cols + 1)
    std::vector<int> basis;  // basic variable per row
    std::vector<char> row_active;
    int n_struct;
    int n_surplus;
    int n_rows;

    int art_col(int row) const { return n_struct + n_surplus + row; }
    int rhs_col() const { return n_struct + n_surplus + n_rows; }

    void pivot(int row, int col) {
        body.row(row) /= body(row, col);
        for (int i = 0; i < n_rows; ++i) {
            if (i == row) continue;
            const double factor = body(i, col);
            if (factor != 0.0) body.row(i) -= factor * body.row(row);
        }
        basis[row] = col;
    }
};

enum class PivotResult { optimal, unbounded, step_taken };

// One Bland pivot for maximize costs^T x over the current tableau.
// Entering: lowest-index eligible column with positive reduced cost.
// Leaving: min-ratio row, ties broken by lowest basic-variable index.
PivotResult bland_step(Tableau& t, const Vec& costs, bool allow_artificial_entering) {
    const int n_decision = t.n_struct + t.n_surplus;
    const int limit = allow_artificial_entering ? n_decision + t.n_rows : n_decision;

    int entering = -1;
    for (int j = 0; j < limit; ++j) {
        double reduced = costs[j];
        for (int i = 0; i < t.n_rows; ++i)
            reduced -= costs[t.basis[i]] * t.body(i, j);
        if (reduced > kPivotTol) {
            entering = j;
            break;
        }
    }
    if (entering < 0) return PivotResult::optimal;

    int leaving = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < t.n_rows; ++i) {
        if (!t.row_active[i]) continue;
        const double coef = t.body(i, entering);
        if (coef <= kPivotTol) continue;
        const double ratio = t.body(i, t.rhs_col()) / coef;
        if (ratio < best_ratio - kPivotTol ||
            (ratio < best_ratio + kPivotTol &&
             (leaving < 0 || t.basis[i] < t.basis[leaving]))) {
            best_ratio = std::min(ratio, best_ratio);
            leaving = i;
        }
    }
    if (leaving < 0) return PivotResult::unbounded;

    t.pivot(leaving, entering);
    return PivotResult::step_taken;
}

} // namespace

const char* to_string(LpStatus status) {
    switch (status) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    case LpStatus::iteration_limit: return "iteration-limit";
    }
    return "unknown";
}

LpSolution simplex_solve(const LinearProgram& lp, int max_iters) {
    const int n_x = lp.n_vars();
    const int n_eq = static_cast<int>(lp.eq_b.size());
    const int n_ge = static_cast<int>(lp.ge_b.size());
    const int n_rows = n_eq + n_ge;
    if (lp.eq_A.rows() != n_eq || (n_eq > 0 && lp.eq_A.cols() != n_x) ||
        lp.ge_A.rows() != n_ge || (n_ge > 0 && lp.ge_A.cols() != n_x))
        throw std::invalid_argument("LP dimensions are inconsistent");

    Tableau t;
    t.n_struct = n_x;
    t.n_surplus = n_ge;
    t.n_rows = n_rows;
    t.body = Mat::Zero(n_rows, n_x + n_ge + n_rows + 1);
    t.basis.resize(n_rows);
    t.row_active.assign(n_rows, 1);

    std::vector<int> row_sign(n_rows, 1);
    for (int i = 0; i < n_rows; ++i) {
        Vec coeffs(n_x);
        double rhs;
        if (i < n_eq) {
            coeffs = lp.eq_A.row(i);
            rhs = lp.eq_b[i];
        } else {
            coeffs = lp.ge_A.row(i - n_eq);
            rhs = lp.ge_b[i - n_eq];
        }
        double surplus = (i < n_eq) ? 0.0 : -1.0;
        if (rhs < 0.0) {
            coeffs = -coeffs;
            rhs = -rhs;
            surplus = -surplus;
            row_sign[i] = -1;
        }
        t.body.row(i).head(n_x) = coeffs;
        if (i >= n_eq) t.body(i, n_x + (i - n_eq)) = surplus;
        t.body(i, t.art_col(i)) = 1.0;
        t.body(i, t.rhs_col()) = rhs;
        t.basis[i] = t.art_col(i);
    }

    LpSolution sol;
    const int n_cols = n_x + n_ge + n_rows;
    int iters_left = max_iters;

    // Phase 1: maximize -sum(artificials).
    Vec phase1 = Vec::Zero(n_cols);
    for (int i = 0; i < n_rows; ++i) phase1[t.art_col(i)] = -1.0;
    while (true) {
        if (iters_left-- <= 0) return sol; // iteration_limit
        const PivotResult r = bland_step(t, phase1, false);
        if (r != PivotResult::step_taken) break; // bounded by 0, so optimal
    }
    double artificial_mass = 0.0;
    for (int i = 0; i < n_rows; ++i)
        if (t.basis[i] >= n_x + n_ge) artificial_mass += t.body(i, t.rhs_col());
    if (artificial_mass > kFeasTol) {
        sol.status = LpStatus::infeasible;
        return sol;
    }

    // Drive basic artificials out; rows that admit no pivot are redundant.
    for (int i = 0; i < n_rows; ++i) {
        if (t.basis[i] < n_x + n_ge) continue;
        int col = -1;
        for (int j = 0; j < n_x + n_ge; ++j) {
            if (std::abs(t.body(i, j)) > kPivotTol) {
                col = j;
                break;
            }
        }
        if (col >= 0)
            t.pivot(i, col);
        else
            t.row_active[i] = 0;
    }

    // Phase 2: the real objective (artificial costs are zero, so inactive
    // rows contribute nothing to reduced costs or duals).
    Vec phase2 = Vec::Zero(n_cols);
    phase2.head(n_x) = lp.objective;
    while (true) {
        if (iters_left-- <= 0) return sol;
        const PivotResult r = bland_step(t, phase2, false);
        if (r == PivotResult::optimal) break;
        if (r == PivotResult::unbounded) {
            sol.status = LpStatus::unbounded;
            return sol;
        }
    }

    sol.status = LpStatus::optimal;
    sol.point = Vec::Zero(n_x);
    for (int i = 0; i < n_rows; ++i)
        if (t.basis[i] < n_x) sol.point[t.basis[i]] = t.body(i, t.rhs_col());
    sol.value = lp.objective.dot(sol.point);

    // y_i = c_B^T B^{-1} e_i, read off the artificial column of row i;
    // undo the standardization sign flips.
    Vec y = Vec::Zero(n_rows);
    for (int i = 0; i < n_rows; ++i) {
        double yi = 0.0;
        for (int row = 0; row < n_rows; ++row)
            yi += phase2[t.basis[row]] * t.body(row, t.art_col(i));
        y[i] = row_sign[i] * yi;
    }
    sol.dual_eq = y.head(n_eq);
    sol.dual_ge = y.tail(n_ge);
    return sol;
}

LinearProgram build_uc_lp(const MdpModel& model) {
    const int n = model.n_states;
    const int l = model.pair_count();
    LinearProgram lp;
    lp.objective = model.rewards;
    lp.eq_A = Mat::Zero(n + 1, l);
    lp.eq_b = Vec::Zero(n + 1);
    for (int idx = 0; idx < l; ++idx) {
        lp.eq_A(model.pair_state(idx), idx) += 1.0;
        for (int sp = 0; sp < n; ++sp)
            lp.eq_A(sp, idx) -= model.transitions(idx, sp);
    }
    lp.eq_A.row(n).setOnes();
    lp.eq_b[n] = 1.0;
    lp.ge_A = Mat(0, l);
    lp.ge_b = Vec(0);
    return lp;
}

LinearProgram build_fair_lp(const MdpModel& model, const FairnessSpec& fairness) {
    if (fairness.rho.size() != model.n_states)
        throw std::invalid_argument("fairness vector length does not match model");
    if (fairness.sum() > 1.0 + 1e-12)
        throw std::invalid_argument("fairness floors sum to more than 1");
    LinearProgram lp = build_uc_lp(model);
    const int n = model.n_states;
    const int m = model.n_actions;
    const int l = model.pair_count();
    int n_pos = 0;
    for (int s = 0; s < n; ++s)
        if (fairness.rho[s] > 0.0) ++n_pos;
    lp.ge_A = Mat::Zero(n_pos, l);
    lp.ge_b = Vec::Ones(n_pos);
    int row = 0;
    for (int s = 0; s < n; ++s) {
        if (fairness.rho[s] <= 0.0) continue;
        for (int a = 0; a < m; ++a)
            lp.ge_A(row, model.pair_index(s, a)) = 1.0 / fairness.rho[s];
        ++row;
    }
    return lp;
}

FairOptimal fair_optimal(const MdpModel& model, const FairnessSpec& fairness,
                         int max_iters) {
    const LinearProgram lp = build_fair_lp(model, fairness);
    const LpSolution sol = simplex_solve(lp, max_iters);
    FairOptimal out;
    out.status = sol.status;
    if (sol.status != LpStatus::optimal) return out;

    const int n = model.n_states;
    out.value = sol.value;
    out.occupancy = OccupancyMeasure{sol.point};
    out.policy = policy_from_occupancy(sol.point, n, model.n_actions);
    out.lambda = -sol.dual_eq.head(n);
    out.beta = sol.dual_eq[n];
    out.mu = Vec::Zero(n);
    int row = 0;
    for (int s = 0; s < n; ++s)
        if (fairness.rho[s] > 0.0) out.mu[s] = -sol.dual_ge[row++];
    return out;
}

} // namespace fairmdp
