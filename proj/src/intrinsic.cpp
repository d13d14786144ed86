// Rank statistics, exact LP extremes and closed-form brackets for the
// intrinsic capacities, the vertex scan, the minimax lower bound for f=01,
// and the necessary-condition support checks.
#include "icap/intrinsic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace icap {
namespace {

constexpr double kCollapseTol = 1e-12;

// Integer rounding with a kProbTol slack so that column sums sitting on an
// integer (up to stochasticity dust) land on it.
int floor_int(double x) { return static_cast<int>(std::floor(x + kProbTol)); }
int ceil_int(double x) { return static_cast<int>(std::ceil(x - kProbTol)); }

// Capacity of the channel ((1,0), (theta, 1-theta)).
double z_value(double theta) {
    if (theta <= 0.0) return 1.0;
    if (theta >= 1.0) return 0.0;
    return std::log2(1.0 + (1.0 - theta) * std::pow(theta, theta / (1.0 - theta)));
}

// A Blahut-Arimoto value is a valid capacity lower bound even when the
// iteration budget runs out, which is all the bracket logic needs.
double capacity_floor(const Channel& w) {
    try {
        return blahut_arimoto(w).capacity;
    } catch (const MaxIterExceeded& e) {
        return e.best.capacity;
    }
}

// Constraint system shared by the decomposition LPs: equality rows pin the
// mixture to W entrywise (row-major) and the last row pins the total mass.
struct DecompositionSystem {
    Mat eq;
    Vec rhs;
    std::vector<DetChannel> dets;
};

DecompositionSystem decomposition_system(const Channel& w, long long limit) {
    const int m = w.m();
    const int n = w.n();
    DecompositionSystem sys;
    sys.dets = enumerate_det_channels(m, n, limit);
    const long long count = static_cast<long long>(sys.dets.size());
    sys.eq = Mat::Zero(m * n + 1, count);
    sys.rhs = Vec::Zero(m * n + 1);
    for (long long k = 0; k < count; ++k) {
        const auto& d = sys.dets[static_cast<std::size_t>(k)];
        for (int i = 0; i < m; ++i) sys.eq(i * n + d.image[i], k) = 1.0;
        sys.eq(m * n, k) = 1.0;
    }
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) sys.rhs(i * n + j) = w(i, j);
    sys.rhs(m * n) = 1.0;
    return sys;
}

// Basic solutions carry harmless negative dust; clamp and renormalize before
// the strict validation.
Decomposition witness_from_point(int m, int n, Vec point) {
    point = point.cwiseMax(0.0);
    const double total = point.sum();
    if (total <= 0.0) throw NumericalFailure("decomposition LP returned an empty weight vector");
    point /= total;
    return Decomposition::validate(m, n, point);
}

// Euclidean projection onto the probability simplex.
Vec project_simplex(Vec v) {
    std::vector<double> u(v.data(), v.data() + v.size());
    std::sort(u.begin(), u.end(), std::greater<>());
    double cum = 0.0;
    double theta = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        cum += u[i];
        const double t = (cum - 1.0) / static_cast<double>(i + 1);
        if (u[i] - t > 0.0) theta = t;
    }
    for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = std::max(0.0, v(i) - theta);
    return v;
}

// Entropy of the pushforward of mu through a deterministic map, in bits.
double pushforward_entropy(const Vec& mu, const DetChannel& d, Vec* out_dist = nullptr) {
    Vec p = Vec::Zero(d.n);
    for (int i = 0; i < d.m; ++i) p(d.image[i]) += mu(i);
    double h = 0.0;
    for (int j = 0; j < d.n; ++j)
        if (p(j) > 0.0) h -= p(j) * std::log2(p(j));
    if (out_dist != nullptr) *out_dist = std::move(p);
    return h;
}

}  // namespace

RankProfile rank_profile(const Decomposition& lambda) {
    RankProfile out;
    for (const auto& [d, weight] : lambda.atoms()) out.probs[det_rank(d)] += weight;
    return out;
}

RankProbReport rank1_probs(const Channel& w) {
    const int m = w.m();
    const int n = w.n();
    RankProbReport out;
    const Eigen::RowVectorXd sums = w.column_sums();
    out.g = sums.maxCoeff();
    out.lower_rank1 = std::max(0.0, out.g - m + 1.0);
    out.alpha = w.entries().colwise().minCoeff().transpose();
    out.upper_rank1 = out.alpha.sum();
    if (m <= n) {
        double beta = 0.0;
        for (int j = 0; j < n; ++j)
            if (w.column_weight(j) > 1)
                beta = std::max(beta, (sums(j) - 1.0) / (w.column_weight(j) - 1.0));
        if (beta <= kCollapseTol) {
            out.beta_or_h = 0.0;
            out.perfect_upper = 1.0;
            out.exact_perfect = 1.0;
        } else {
            out.beta_or_h = beta;
            out.perfect_upper = 1.0 - beta;
        }
    } else {
        double h = std::min(1.0, static_cast<double>(sums.minCoeff()));
        if (h >= 1.0 - kCollapseTol) {
            out.beta_or_h = 1.0;
            out.perfect_upper = 1.0;
            out.exact_perfect = 1.0;
        } else {
            out.beta_or_h = h;
            out.perfect_upper = h;
        }
    }
    return out;
}

IcExact ic11_exact(const Channel& w, Sense sense, long long lp_limit) {
    DecompositionSystem sys = decomposition_system(w, lp_limit);
    const long long count = static_cast<long long>(sys.dets.size());
    LinearProgram lp;
    lp.sense = sense == Sense::min ? LpSense::minimize : LpSense::maximize;
    lp.eq = std::move(sys.eq);
    lp.rhs = std::move(sys.rhs);
    lp.objective = Vec::Zero(count);
    for (long long k = 0; k < count; ++k)
        lp.objective(k) = std::log2(static_cast<double>(det_rank(sys.dets[static_cast<std::size_t>(k)])));
    const LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::optimal)
        throw NumericalFailure("decomposition LP did not reach an optimum for a stochastic matrix");
    IcExact out;
    out.bits = sol.value;
    out.witness = witness_from_point(w.m(), w.n(), sol.point);
    return out;
}

ICReport ic11_bounds(const Channel& w) {
    const int m = w.m();
    const int n = w.n();
    const bool binary_shape = (m == 2 || n == 2);
    const RankProbReport rp = rank1_probs(w);

    ICReport out;
    out.flag = Flag::f11;
    BoundIngredients ing;
    ing.o = std::min(m, n);

    // Enclosure of lowerIC_11.
    const double base = 1.0 - rp.upper_rank1;
    if (base <= kCollapseTol) {
        out.lower_bracket = {0.0, 0.0};
        out.lower_status = ValueStatus::exact;
    } else if (binary_shape) {
        out.lower_bracket = {base, base};
        out.lower_status = ValueStatus::exact;
    } else {
        // Residual channel after peeling off the maximal useless-atom mass.
        Mat rest = w.entries();
        for (int j = 0; j < n; ++j) rest.col(j).array() -= rp.alpha(j);
        const Mat w_prime = rest / base;
        ing.w_prime = w_prime;
        const Eigen::RowVectorXd prime_sums = w_prime.colwise().sum();
        Eigen::VectorXi a(n);
        for (int j = 0; j < n; ++j) a(j) = floor_int(prime_sums(j));
        ing.a_lower = a;
        int support_a = 0;
        for (int j = 0; j < n; ++j)
            if (a(j) > 0) ++support_a;
        const int gamma = std::min(m + support_a - a.sum(), n);
        ing.gamma_lower = gamma;
        const double hi = base * std::log2(static_cast<double>(gamma));
        const double lo = std::min(hi, std::max(base, capacity_floor(w)));
        out.lower_bracket = {lo, hi};
        out.lower_status = out.lower_bracket.collapsed() ? ValueStatus::exact : ValueStatus::bracket;
    }

    // Enclosure of upperIC_11.
    const Eigen::RowVectorXd sums = w.column_sums();
    bool all_le_one = true;
    bool all_ge_one = true;
    for (int j = 0; j < n; ++j) {
        if (sums(j) > 1.0 + kProbTol) all_le_one = false;
        if (sums(j) < 1.0 - kProbTol) all_ge_one = false;
    }
    if (rp.lower_rank1 > 0.0 || binary_shape) {
        const double v = 1.0 - rp.lower_rank1;
        out.upper_bracket = {v, v};
        out.upper_status = ValueStatus::exact;
    } else if (m <= n && all_le_one) {
        const double v = std::log2(static_cast<double>(m));
        out.upper_bracket = {v, v};
        out.upper_status = ValueStatus::exact;
    } else if (m >= n && all_ge_one) {
        const double v = std::log2(static_cast<double>(n));
        out.upper_bracket = {v, v};
        out.upper_status = ValueStatus::exact;
    } else {
        Eigen::VectorXi a(n);
        Eigen::VectorXi b(n);
        for (int j = 0; j < n; ++j) {
            a(j) = floor_int(sums(j));
            b(j) = ceil_int(sums(j));
        }
        ing.a_upper = a;
        ing.b_upper = b;
        int weight_a = 0;
        int b_over_support = 0;
        for (int j = 0; j < n; ++j)
            if (a(j) > 0) {
                ++weight_a;
                b_over_support += b(j);
            }
        const int gamma = weight_a + std::max(0, m - b_over_support);
        ing.gamma_upper = gamma;
        const int o = ing.o;
        const double lo = std::log2(static_cast<double>(gamma));
        const double hi = std::log2(static_cast<double>(o - 1)) +
                          rp.perfect_upper * std::log2(static_cast<double>(o) / (o - 1.0));
        out.upper_bracket = {std::min(lo, hi), hi};
        out.upper_status = out.upper_bracket.collapsed() ? ValueStatus::exact : ValueStatus::bracket;
    }

    out.lower = out.lower_bracket.lo;
    out.upper = out.upper_bracket.hi;
    out.ingredients = std::move(ing);
    return out;
}

ICReport ic10_binary_output(const Channel& w) {
    if (w.n() != 2) throw WrongShape("the f=10 closed form needs a binary output alphabet");
    const RankProbReport rp = rank1_probs(w);
    const double lower = blahut_arimoto(w).capacity;
    const double upper = z_value(rp.lower_rank1);
    ICReport out;
    out.flag = Flag::f10;
    out.lower_bracket = {lower, lower};
    out.upper_bracket = {upper, upper};
    out.lower_status = ValueStatus::exact;
    out.upper_status = ValueStatus::exact;
    out.lower = lower;
    out.upper = upper;
    return out;
}

ICReport ic01_binary_input(const Channel& w) {
    if (w.m() != 2) throw WrongShape("the f=01 closed form needs a binary input alphabet");
    const RankProbReport rp = rank1_probs(w);
    ICReport out;
    out.flag = Flag::f01;
    out.lower_bracket = {1.0 - rp.upper_rank1, 1.0 - rp.upper_rank1};
    out.upper_bracket = {1.0 - rp.lower_rank1, 1.0 - rp.lower_rank1};
    out.lower_status = ValueStatus::exact;
    out.upper_status = ValueStatus::exact;
    out.lower = out.lower_bracket.lo;
    out.upper = out.upper_bracket.hi;
    return out;
}

Channel BinaryBinaryReport::channel() const {
    Mat p(2, 2);
    p << 1.0 - eps1, eps1, eps2, 1.0 - eps2;
    return Channel::validate(p);
}

BinaryBinaryReport binary_binary_report(double eps1, double eps2) {
    if (!(eps1 >= 0.0 && eps1 <= 1.0) || !(eps2 >= 0.0 && eps2 <= 1.0))
        throw DomainError("crossover probabilities must lie in [0, 1]");
    BinaryBinaryReport out;
    out.eps1 = eps1;
    out.eps2 = eps2;
    out.lower11 = std::abs(1.0 - eps1 - eps2);
    out.lower01 = out.lower11;
    out.upper11 = 1.0 - std::abs(eps1 - eps2);
    out.upper01 = out.upper11;
    out.upper10 = z_value(std::abs(eps1 - eps2));
    if (std::abs(eps1 + eps2 - 1.0) <= kProbTol) {
        out.lower10 = 0.0;
    } else {
        const double h1 = binary_entropy(eps1);
        const double h2 = binary_entropy(eps2);
        const double den = 1.0 - eps1 - eps2;
        const double u = (eps2 * h1 - (1.0 - eps1) * h2) / den;
        const double v = (eps1 * h2 - (1.0 - eps2) * h1) / den;
        out.lower10 = std::log2(std::exp2(u) + std::exp2(v));
    }
    return out;
}

VertexOptimum upper_ic_via_vertices(const Channel& w, Flag f, long long vertex_limit,
                                    long long strategy_limit) {
    const std::vector<Decomposition> vertices = enumerate_vertices(w, vertex_limit);
    if (vertices.empty()) throw NumericalFailure("vertex enumeration returned no decomposition");
    VertexOptimum best{-1.0, vertices.front(), vertices.size()};
    for (const auto& vertex : vertices) {
        const double bits = c_f(vertex, f, kBaTol, strategy_limit);
        if (bits > best.bits) {
            best.bits = bits;
            best.witness = vertex;
        }
    }
    return best;
}

MinimaxResult lower_ic01_minimax(const Channel& w, const MinimaxOptions& opts) {
    const int m = w.m();
    DecompositionSystem sys = decomposition_system(w, opts.lp_limit);
    const long long count = static_cast<long long>(sys.dets.size());

    LinearProgram lp;
    lp.sense = LpSense::minimize;
    lp.eq = std::move(sys.eq);
    lp.rhs = std::move(sys.rhs);
    lp.objective = Vec::Zero(count);

    // g(mu) = min over Dec(W) of sum_D lambda_D H(mu composed with D); every
    // evaluation is a certified lower bound on the f=01 lower capacity.
    const auto evaluate = [&](const Vec& mu) {
        for (long long k = 0; k < count; ++k)
            lp.objective(k) = pushforward_entropy(mu, sys.dets[static_cast<std::size_t>(k)]);
        LpSolution sol = solve_lp(lp);
        if (sol.status != LpStatus::optimal)
            throw NumericalFailure("inner decomposition LP did not reach an optimum");
        return sol;
    };

    MinimaxResult best;
    best.bits = -1.0;
    const int restarts = std::max(1, opts.restarts);
    const int iterations = std::max(1, opts.iterations);
    std::mt19937_64 rng(opts.seed);
    std::exponential_distribution<double> expo(1.0);
    double best_before_final_round = 0.0;

    for (int round = 0; round < restarts; ++round) {
        Vec mu = Vec::Constant(m, 1.0 / m);
        if (round > 0) {
            for (int i = 0; i < m; ++i) mu(i) = expo(rng) + 1e-9;
            mu /= mu.sum();
        }
        if (round == restarts - 1) best_before_final_round = best.bits;
        for (int t = 0; t < iterations; ++t) {
            const LpSolution sol = evaluate(mu);
            if (sol.value > best.bits) {
                best.bits = sol.value;
                best.mu = InputDist::validate(mu);
                best.lambda = witness_from_point(w.m(), w.n(), sol.point);
            }
            // Supergradient of the active minimizer; the additive constant
            // common to all coordinates is dropped (simplex projection is
            // invariant to it).
            Vec grad = Vec::Zero(m);
            for (long long k = 0; k < count; ++k) {
                const double weight = sol.point(k);
                if (weight <= 1e-12) continue;
                const auto& d = sys.dets[static_cast<std::size_t>(k)];
                Vec push;
                pushforward_entropy(mu, d, &push);
                for (int i = 0; i < m; ++i)
                    grad(i) -= weight * std::log2(std::max(push(d.image[i]), 1e-12));
            }
            mu = project_simplex(mu + (0.25 / std::sqrt(t + 1.0)) * grad);
        }
    }
    best.gap = best.bits - std::max(0.0, best_before_final_round);
    best.status = ValueStatus::approximate;
    return best;
}

std::vector<SupportViolation> validate_optimal_support(const Decomposition& lambda, Sense sense) {
    std::vector<SupportViolation> out;
    const int m = lambda.m;
    const int n = lambda.n;
    const auto atoms = lambda.atoms();

    if (sense == Sense::min) {
        const int perfect_rank = std::min(m, n);
        std::vector<DetChannel> perfect;
        for (const auto& [d, weight] : atoms)
            if (det_rank(d) == perfect_rank) perfect.push_back(d);

        if (m <= n && !perfect.empty()) {
            // A column reached from two distinct inputs across the perfect
            // atoms admits a strictly better exchange. The defect only grows
            // with more atoms, so the full collection covers every subset.
            std::vector<std::set<int>> rows_hitting(n);
            for (const auto& d : perfect)
                for (int i = 0; i < m; ++i) rows_hitting[static_cast<std::size_t>(d.image[i])].insert(i);
            for (int j = 0; j < n; ++j) {
                if (rows_hitting[static_cast<std::size_t>(j)].size() < 2) continue;
                std::vector<long long> offenders;
                for (const auto& d : perfect)
                    for (int i = 0; i < m; ++i)
                        if (d.image[i] == j) {
                            offenders.push_back(det_index(d));
                            break;
                        }
                out.push_back({"min-perfect-column-collision",
                               "column " + std::to_string(j + 1) +
                                   " of the stacked perfect atoms is reached from " +
                                   std::to_string(rows_hitting[static_cast<std::size_t>(j)].size()) +
                                   " distinct inputs",
                               std::move(offenders)});
            }
        }

        if (m >= n && !perfect.empty() && perfect.size() <= 12) {
            // Not monotone in the collection, so scan every nonempty subset:
            // a subset of size L fails when some column has no input mapped
            // to it by all L atoms at once.
            const int t = static_cast<int>(perfect.size());
            for (unsigned mask = 1; mask < (1u << t); ++mask) {
                int bad_column = -1;
                for (int j = 0; j < n && bad_column < 0; ++j) {
                    bool has_unanimous_row = false;
                    for (int i = 0; i < m && !has_unanimous_row; ++i) {
                        bool unanimous = true;
                        for (int k = 0; k < t && unanimous; ++k)
                            if ((mask >> k) & 1u) unanimous = perfect[static_cast<std::size_t>(k)].image[i] == j;
                        has_unanimous_row = unanimous;
                    }
                    if (!has_unanimous_row) bad_column = j;
                }
                if (bad_column < 0) continue;
                std::vector<long long> offenders;
                for (int k = 0; k < t; ++k)
                    if ((mask >> k) & 1u) offenders.push_back(det_index(perfect[static_cast<std::size_t>(k)]));
                out.push_back({"min-perfect-subset-uncovered",
                               "no input is mapped to column " + std::to_string(bad_column + 1) +
                                   " by all " + std::to_string(std::popcount(mask)) +
                                   " atoms of the subset",
                               std::move(offenders)});
            }
        }
        return out;
    }

    // sense == max: the checks below are necessary once a useless (constant)
    // atom carries positive weight.
    std::vector<std::pair<int, long long>> useless;  // (target column, canonical index)
    double rank1_mass = 0.0;
    for (const auto& [d, weight] : atoms)
        if (det_rank(d) == 1) {
            useless.emplace_back(d.image[0], det_index(d));
            rank1_mass += weight;
        }
    if (useless.empty()) return out;

    for (const auto& [j, idx] : useless) {
        for (const auto& [d, weight] : atoms) {
            const long long other = det_index(d);
            if (other == idx) continue;
            int column_weight = 0;
            for (int i = 0; i < m; ++i)
                if (d.image[i] == j) ++column_weight;
            if (column_weight <= m - 2)
                out.push_back({"max-useless-neighbor-column",
                               "an atom maps only " + std::to_string(column_weight) +
                                   " inputs to column " + std::to_string(j + 1) +
                                   " shared with a constant atom (needs at least " +
                                   std::to_string(m - 1) + ")",
                               {idx, other}});
        }
    }

    for (const auto& [d, weight] : atoms)
        if (det_rank(d) >= 3)
            out.push_back({"max-rank-above-two",
                           "with a constant atom present the rank profile must live on {1, 2}, "
                           "found rank " + std::to_string(det_rank(d)),
                           {det_index(d)}});

    const RankProbReport rp = rank1_probs(reconstruct(lambda));
    if (std::abs(rank1_mass - rp.lower_rank1) > kProbTol)
        out.push_back({"max-rank1-mass",
                       "constant atoms carry weight " + std::to_string(rank1_mass) +
                           " but the polytope minimum is " + std::to_string(rp.lower_rank1),
                       {}});
    return out;
}

}  // namespace icap
