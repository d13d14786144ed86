// Rank probabilities, the lower/upper intrinsic capacities (exact LP values,
// closed forms, and general brackets), and optimal-support validators.
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icap/decomposition.hpp"
#include "icap/solver.hpp"
#include "icap/state_info.hpp"

namespace icap {

inline constexpr long long kLpAtomLimit = 4096;  // n^m cap for the decomposition LPs

enum class Sense { min, max };
enum class ValueStatus { exact, bracket, approximate };

/// Distribution of rank(D) under lambda.
struct RankProfile {
    std::map<int, double> probs;  // rank r in [1, m^n wedge] -> total weight
};

RankProfile rank_profile(const Decomposition& lambda);

/// Closed-form extremes of the rank-1 probability over Dec(W), plus the bound
/// on the perfect-rank probability upperRP(m^n wedge).
struct RankProbReport {
    double lower_rank1 = 0.0;  // (g - m + 1)+
    double upper_rank1 = 0.0;  // sum_j alpha_j
    double g = 0.0;            // max column sum
    Vec alpha;                 // column minima
    double perfect_upper = 0.0;
    double beta_or_h = 0.0;    // beta when m <= n (first), else h
    std::optional<double> exact_perfect;  // set when the bound is known tight
};

RankProbReport rank1_probs(const Channel& w);

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;

    bool collapsed(double tol = 1e-12) const { return hi - lo <= tol; }
};

/// Quantities feeding the general lowerIC/upperIC brackets.
struct BoundIngredients {
    int o = 0;  // min(m, n)
    std::optional<Mat> w_prime;
    std::optional<Eigen::VectorXi> a_lower;  // floor of the column sums of w_prime
    std::optional<int> gamma_lower;
    std::optional<Eigen::VectorXi> a_upper;  // floor of the column sums of w
    std::optional<Eigen::VectorXi> b_upper;  // ceil of the column sums of w
    std::optional<int> gamma_upper;
};

/// Enclosures for lowerIC_f and upperIC_f. `lower` is the certified lower end
/// of the lowerIC enclosure and `upper` the certified upper end of the
/// upperIC enclosure, so lower <= lowerIC_f <= upperIC_f <= upper always.
struct ICReport {
    Flag flag = Flag::f11;
    double lower = 0.0;
    double upper = 0.0;
    Bracket lower_bracket;
    Bracket upper_bracket;
    ValueStatus lower_status = ValueStatus::bracket;
    ValueStatus upper_status = ValueStatus::bracket;
    std::optional<Decomposition> lower_witness;
    std::optional<Decomposition> upper_witness;
    std::optional<BoundIngredients> ingredients;
};

/// Extremum of sum_D lambda_D log2 rank(D) over Dec(W) by LP; the witness is
/// a vertex of Dec(W) (basic solution).
struct IcExact {
    double bits = 0.0;
    Decomposition witness;
};

IcExact ic11_exact(const Channel& w, Sense sense, long long lp_limit = kLpAtomLimit);

/// Bracket report for f=11 from the closed-form bounds; exact on binary
/// shapes (m=2 or n=2) and under the two corollary conditions. The lower
/// bracket's lower end is improved to max(1 - upperRP(1), C(W)).
ICReport ic11_bounds(const Channel& w);

/// Exact f=10 values for binary-output channels: lowerIC = C(W) and upperIC
/// is the capacity of the Z-type channel ((1,0), (lowerRP(1), 1-lowerRP(1))).
ICReport ic10_binary_output(const Channel& w);

/// Exact f=01 values for binary-input channels: 1 - upperRP(1) and
/// 1 - lowerRP(1).
ICReport ic01_binary_input(const Channel& w);

/// Closed forms for m = n = 2 with rows (1-e1, e1) and (e2, 1-e2).
struct BinaryBinaryReport {
    double eps1 = 0.0;
    double eps2 = 0.0;
    double lower11 = 0.0;  // = lower01 = |1 - e1 - e2|
    double lower10 = 0.0;  // = C(W)
    double lower01 = 0.0;
    double upper11 = 0.0;  // = upper01 = 1 - |e1 - e2|
    double upper10 = 0.0;
    double upper01 = 0.0;

    Channel channel() const;
};

BinaryBinaryReport binary_binary_report(double eps1, double eps2);

/// Maximum of C_f over the vertices of Dec(W), where the supremum is attained.
struct VertexOptimum {
    double bits = 0.0;
    Decomposition witness;
    std::size_t vertices_scanned = 0;
};

VertexOptimum upper_ic_via_vertices(const Channel& w, Flag f,
                                    long long vertex_limit = kVertexAtomLimit,
                                    long long strategy_limit = kStrategyRowLimit);

/// max_mu min_{lambda in Dec(W)} sum_D lambda_D I(mu, D) by projected
/// subgradient over mu with an exact inner LP. Every reported value is a
/// certified lower bound on lowerIC_01; outer optimality only within `gap`.
struct MinimaxOptions {
    int restarts = 8;
    int iterations = 400;
    std::uint64_t seed = 1;
    long long lp_limit = kLpAtomLimit;
};

struct MinimaxResult {
    double bits = 0.0;
    InputDist mu;
    Decomposition lambda;
    double gap = 0.0;  // last-round improvement, a stall indicator not a bound
    ValueStatus status = ValueStatus::approximate;
};

MinimaxResult lower_ic01_minimax(const Channel& w, const MinimaxOptions& opts = {});

/// A necessary-condition check that failed for the claimed optimum sense.
struct SupportViolation {
    std::string rule;
    std::string detail;
    std::vector<long long> atoms;  // offending canonical indices
};

/// Necessary optimality conditions on support(lambda). For sense=min:
/// perfect-atom patterns that admit a strictly better local exchange
/// (square/tall and wide cases). For sense=max: useless atoms force every
/// other atom's matching column weight to at least m-1, the rank profile to
/// live on {1,2}, and P_lambda(1) = lowerRP(1).
std::vector<SupportViolation> validate_optimal_support(const Decomposition& lambda, Sense sense);

}  // namespace icap
