// Numerical engines: dense two-phase simplex and the Blahut-Arimoto iteration.
#pragma once

#include <optional>
#include <vector>

#include "icap/channel.hpp"

namespace icap {

enum class LpSense { minimize, maximize };
enum class LpStatus { optimal, infeasible, unbounded };

/// Equality-constrained LP over box-bounded variables. Callers convert
/// inequalities to slacks themselves; the decomposition systems used in this
/// library are all equalities with x >= 0.
struct LinearProgram {
    Vec objective;
    LpSense sense = LpSense::minimize;
    Mat eq;   // M x N
    Vec rhs;  // M
    Vec lower;                 // defaults to zeros when empty
    std::optional<Vec> upper;  // optional componentwise upper bounds
};

struct LpSolution {
    LpStatus status = LpStatus::optimal;
    double value = 0.0;
    Vec point;
    std::vector<int> basis;  // indices of basic original variables
    long long iterations = 0;
};

/// Dense two-phase primal simplex with Bland's rule. Redundant equality rows
/// are removed by rank-revealing preprocessing; the final basic solution is
/// re-solved against the original data and rejected (NumericalFailure) if the
/// feasibility residual exceeds 1e-6.
LpSolution solve_lp(const LinearProgram& lp);

inline constexpr double kBaTol = 1e-10;
inline constexpr long long kBaMaxIter = 100000;

/// Blahut-Arimoto exceeded max_iter; carries the best certificate so far.
struct MaxIterExceeded : Error {
    CapacityCertificate best;
    explicit MaxIterExceeded(CapacityCertificate best_)
        : Error("Blahut-Arimoto iteration limit exceeded (gap " + std::to_string(best_.gap) + ")"),
          best(std::move(best_)) {}
};

/// C = max_mu I(mu, W) via Blahut-Arimoto from the uniform distribution.
/// The certificate satisfies I(mu,W) <= C <= I(mu,W) + gap with gap <= tol.
CapacityCertificate blahut_arimoto(const Channel& w, double tol = kBaTol,
                                   long long max_iter = kBaMaxIter);

}  // namespace icap
