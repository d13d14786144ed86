#include "icap/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace icap {
namespace {

constexpr double kPivotTol = 1e-10;
constexpr double kReducedCostTol = 1e-9;
constexpr double kRankTol = 1e-9;
constexpr double kPhase1Tol = 1e-7;
constexpr double kFeasResidual = 1e-6;

struct StandardForm {
    Mat a;       // rows kept after rank preprocessing
    Vec b;       // b >= 0
    Vec cost;    // minimization costs over shifted variables
    int n_real;  // original variable count (before upper-bound slacks)
    int n_vars;  // with slacks
    Vec shift;   // x_original = shift + x_standard[0..n_real)
    double sign = 1.0;        // +1 minimize, -1 maximize
    double cost_offset = 0.0;  // objective value at x_standard = 0
};

// Gaussian elimination over [A|b]: keeps a maximal independent row set and
// detects inconsistent dependent rows.
struct RowBasis {
    std::vector<int> kept;
    bool inconsistent = false;
};

RowBasis independent_rows(const Mat& a, const Vec& b) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Mat r(0, n + 1);
    RowBasis out;
    for (int i = 0; i < m; ++i) {
        Eigen::RowVectorXd row(n + 1);
        row << a.row(i), b(i);
        for (int k = 0; k < r.rows(); ++k) {
            int p;
            r.row(k).head(n).cwiseAbs().maxCoeff(&p);
            row -= (row(p) / r(k, p)) * r.row(k);
        }
        if (row.head(n).cwiseAbs().maxCoeff() > kRankTol) {
            out.kept.push_back(i);
            r.conservativeResize(r.rows() + 1, Eigen::NoChange);
            r.row(r.rows() - 1) = row;
        } else if (std::abs(row(n)) > kFeasResidual) {
            out.inconsistent = true;
            return out;
        }
    }
    return out;
}

StandardForm to_standard_form(const LinearProgram& lp) {
    const int n = static_cast<int>(lp.objective.size());
    const int m = static_cast<int>(lp.rhs.size());
    if (n < 1 || m < 1 || lp.eq.rows() != m || lp.eq.cols() != n)
        throw DomainError("inconsistent LP shapes");
    if (!lp.objective.allFinite() || !lp.eq.allFinite() || !lp.rhs.allFinite())
        throw DomainError("LP data must be finite");
    Vec lower = lp.lower.size() == 0 ? Vec::Zero(n) : lp.lower;
    if (lower.size() != n) throw DomainError("lower bound length mismatch");
    if (lp.upper && lp.upper->size() != n) throw DomainError("upper bound length mismatch");

    StandardForm sf;
    sf.sign = lp.sense == LpSense::minimize ? 1.0 : -1.0;
    sf.n_real = n;
    sf.shift = lower;

    std::vector<int> slack_for;  // variables with a finite upper bound
    if (lp.upper) {
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite((*lp.upper)(j))) continue;
            if ((*lp.upper)(j) < lower(j) - 1e-12) throw DomainError("upper bound below lower");
            slack_for.push_back(j);
        }
    }
    const int n_slack = static_cast<int>(slack_for.size());
    sf.n_vars = n + n_slack;

    sf.a = Mat::Zero(m + n_slack, sf.n_vars);
    sf.b = Vec::Zero(m + n_slack);
    sf.a.topLeftCorner(m, n) = lp.eq;
    sf.b.head(m) = lp.rhs - lp.eq * lower;
    for (int k = 0; k < n_slack; ++k) {
        const int j = slack_for[k];
        sf.a(m + k, j) = 1.0;
        sf.a(m + k, n + k) = 1.0;
        sf.b(m + k) = (*lp.upper)(j)-lower(j);
    }

    sf.cost = Vec::Zero(sf.n_vars);
    sf.cost.head(n) = sf.sign * lp.objective;
    sf.cost_offset = sf.sign * lp.objective.dot(lower);
    return sf;
}

// Full-tableau simplex with Bland's rule. Returns false when unbounded.
struct Tableau {
    Mat t;    // rows x columns, B^{-1} [A | artificials]
    Vec b;    // B^{-1} b
    std::vector<int> basis;
    long long iterations = 0;

    int rows() const { return static_cast<int>(t.rows()); }
    int cols() const { return static_cast<int>(t.cols()); }

    void pivot(int r, int j) {
        const double p = t(r, j);  // read before the row update overwrites it
        t.row(r) /= p;
        b(r) /= p;
        // exact unit column, entry by entry, to limit drift
        for (int i = 0; i < rows(); ++i) {
            if (i == r) continue;
            const double f = t(i, j);
            if (f == 0.0) continue;
            t.row(i) -= f * t.row(r);
            b(i) -= f * b(r);
            t(i, j) = 0.0;
        }
        t(r, j) = 1.0;
        basis[r] = j;
        ++iterations;
    }

    /// Minimizes cost over columns [0, n_cols); returns false iff unbounded.
    bool run(const Vec& cost, int n_cols, long long iter_limit) {
        while (true) {
            if (iterations > iter_limit) throw NumericalFailure("simplex iteration limit");
            // Bland: first column with negative reduced cost
            int enter = -1;
            for (int j = 0; j < n_cols; ++j) {
                double d = cost(j);
                for (int i = 0; i < rows(); ++i) d -= cost(basis[i]) * t(i, j);
                if (d < -kReducedCostTol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;
            // Bland: among minimum ratios, leave with the smallest basis index
            int leave = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows(); ++i) {
                if (t(i, enter) <= kPivotTol) continue;
                const double ratio = b(i) / t(i, enter);
                if (ratio < best - 1e-12 ||
                    (ratio < best + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
                    best = std::min(best, ratio);
                    leave = i;
                }
            }
            if (leave < 0) return false;
            pivot(leave, enter);
        }
    }
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
    StandardForm sf = to_standard_form(lp);

    // sign normalization then rank preprocessing
    for (int i = 0; i < sf.b.size(); ++i) {
        if (sf.b(i) < 0.0) {
            sf.b(i) = -sf.b(i);
            sf.a.row(i) = -sf.a.row(i);
        }
    }
    const RowBasis rb = independent_rows(sf.a, sf.b);
    LpSolution sol;
    if (rb.inconsistent) {
        sol.status = LpStatus::infeasible;
        return sol;
    }
    const int m = static_cast<int>(rb.kept.size());
    const int n = sf.n_vars;
    Mat a(m, n);
    Vec b(m);
    for (int i = 0; i < m; ++i) {
        a.row(i) = sf.a.row(rb.kept[i]);
        b(i) = sf.b(rb.kept[i]);
    }

    Tableau tab;
    tab.t = Mat::Zero(m, n + m);
    tab.t.leftCols(n) = a;
    tab.t.rightCols(m) = Mat::Identity(m, m);
    tab.b = b;
    tab.basis.resize(m);
    for (int i = 0; i < m; ++i) tab.basis[i] = n + i;

    const long long iter_limit = 2000 + 200LL * (n + m);

    // phase 1: drive artificial mass to zero
    Vec phase1 = Vec::Zero(n + m);
    phase1.tail(m).setOnes();
    if (!tab.run(phase1, n + m, iter_limit)) throw NumericalFailure("phase 1 unbounded");
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] >= n) infeas += tab.b(i);
    if (infeas > kPhase1Tol) {
        sol.status = LpStatus::infeasible;
        sol.iterations = tab.iterations;
        return sol;
    }
    // drive remaining artificials out of the basis; rows are independent, so a
    // real pivot column always exists
    for (int i = 0; i < m; ++i) {
        if (tab.basis[i] < n) continue;
        int enter = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(tab.t(i, j)) > kPivotTol) {
                enter = j;
                break;
            }
        }
        if (enter < 0) throw NumericalFailure("cannot drive out artificial variable");
        tab.pivot(i, enter);
    }

    // phase 2 on the real columns only
    Vec phase2 = Vec::Zero(n + m);
    phase2.head(n) = sf.cost;
    if (!tab.run(phase2, n, iter_limit)) {
        sol.status = LpStatus::unbounded;
        sol.iterations = tab.iterations;
        return sol;
    }

    // re-solve the basis against the original data and verify feasibility
    Mat basis_cols(m, m);
    for (int i = 0; i < m; ++i) basis_cols.col(i) = a.col(tab.basis[i]);
    Vec xb = basis_cols.colPivHouseholderQr().solve(b);
    Vec x = Vec::Zero(n);
    for (int i = 0; i < m; ++i) x(tab.basis[i]) = xb(i);

    double residual = (sf.a * x - sf.b).cwiseAbs().maxCoeff();
    residual = std::max(residual, -x.minCoeff());
    if (residual > kFeasResidual) throw NumericalFailure("LP residual " + std::to_string(residual));

    sol.status = LpStatus::optimal;
    sol.value = sf.sign * (sf.cost.dot(x) + sf.cost_offset);
    sol.point = sf.shift + x.head(sf.n_real);
    for (int i = 0; i < m; ++i)
        if (tab.basis[i] < sf.n_real) sol.basis.push_back(tab.basis[i]);
    std::sort(sol.basis.begin(), sol.basis.end());
    sol.iterations = tab.iterations;
    return sol;
}

namespace {

struct BaEval {
    Vec tau;
    Vec div;
    double info = 0.0;
    double upper = 0.0;

    double gap() const { return upper - info; }
};

BaEval ba_evaluate(const Channel& w, const Vec& mu) {
    const int m = w.m();
    BaEval e;
    e.tau = (mu.transpose() * w.entries()).transpose();
    e.div.resize(m);
    for (int x = 0; x < m; ++x) {
        e.div(x) = kl_divergence(w.row(x).transpose(), e.tau);
        if (mu(x) > 0.0) e.info += mu(x) * e.div(x);
    }
    e.info = std::max(e.info, 0.0);
    e.upper = e.div.maxCoeff();
    return e;
}

}  // namespace

CapacityCertificate blahut_arimoto(const Channel& w, double tol, long long max_iter) {
    const int m = w.m();
    Vec mu = Vec::Constant(m, 1.0 / m);
    CapacityCertificate best;
    best.capacity = -1.0;
    for (long long it = 0; it < max_iter; ++it) {
        BaEval e = ba_evaluate(w, mu);
        // Dominated inputs near a boundary optimum shed mass only at the
        // rate 2^{-deficit}, which can stall the gap for ~1/deficit rounds.
        // Periodically try zeroing small dominated mass outright; the jump is
        // adopted only when its independently evaluated gap is better, so it
        // can never certify a wrong value.
        if (it % 512 == 511) {
            Vec trimmed = mu;
            int cut = 0;
            for (int x = 0; x < m; ++x)
                if (mu(x) > 0.0 && mu(x) < 1e-3 && e.div(x) < e.info) {
                    trimmed(x) = 0.0;
                    ++cut;
                }
            if (cut > 0) {
                trimmed /= trimmed.sum();
                BaEval et = ba_evaluate(w, trimmed);
                // polish on the reduced support, where convergence is
                // geometric again, before judging the jump
                for (int k = 0; k < 256 && et.gap() > tol; ++k) {
                    Vec step(m);
                    for (int x = 0; x < m; ++x)
                        step(x) = trimmed(x) > 0.0 ? trimmed(x) * std::exp2(et.div(x)) : 0.0;
                    trimmed = step / step.sum();
                    et = ba_evaluate(w, trimmed);
                }
                if (et.gap() < e.gap()) {
                    mu = std::move(trimmed);
                    e = et;
                }
            }
        }
        if (e.info > best.capacity) {
            InputDist dist;
            dist.p = mu;
            best = CapacityCertificate{e.info, std::move(dist), e.tau, e.div, e.gap()};
        }
        // any iterate's max divergence upper-bounds C
        best.gap = std::min(best.gap, e.upper - best.capacity);
        if (best.gap <= tol) return best;
        // mu <- mu 2^{div} / Z
        Vec next(m);
        for (int x = 0; x < m; ++x)
            next(x) = mu(x) > 0.0 ? mu(x) * std::exp2(e.div(x)) : 0.0;
        mu = next / next.sum();
    }
    throw MaxIterExceeded(std::move(best));
}

}  // namespace icap
