// Causal side information: Shannon strategy channels, the per-decomposition
// capacities C_f, the (i1,i2)-ended uselessness test, capacities with noisy
// causal state observations, and the bundled verification of the worked
// counterexamples.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "icap/decomposition.hpp"
#include "icap/solver.hpp"

namespace icap {

/// Which side knows the intrinsic state: encoder bit, decoder bit.
enum class Flag { f00, f01, f10, f11 };

inline constexpr long long kStrategyRowLimit = 10000;     // after row dedup
inline constexpr long long kStrategyPreLimit = 1000000;   // before dedup

/// State-dependent channel with a state distribution and a joint observation
/// kernel p(s_E, s_D | s) laid out with column index s_E * n_sd + s_D.
struct StateChannelModel {
    std::vector<Channel> kernels;
    Vec p_s;
    int n_se = 1;
    int n_sd = 1;
    Mat obs;  // |S| x (n_se * n_sd)

    static StateChannelModel validate(std::vector<Channel> kernels, const Vec& p_s, int n_se,
                                      int n_sd, const Mat& obs);
    /// Model whose encoder observes s exactly and whose decoder observes nothing.
    static StateChannelModel with_full_encoder_si(std::vector<Channel> kernels, const Vec& p_s);

    int states() const { return static_cast<int>(kernels.size()); }
    int m() const { return kernels.front().m(); }
    int n() const { return kernels.front().n(); }
    /// Mixture channel sum_s p(s) K^(s).
    Channel mixture() const;
};

/// Channel X^A -> Y whose rows enumerate maps u from a conditioning alphabet A
/// into inputs, with duplicate rows merged.
struct StrategyChannel {
    std::vector<long long> conditioning;          // canonical atom indices (support of lambda)
    std::vector<std::vector<int>> strategies;     // representative map per surviving row
    std::vector<long long> multiplicities;        // merged-row counts
    Channel channel;
};

/// Strategy channel of a decomposition: rows V_u = sum_D lambda_D e_{D(u(D))}.
/// Strategies range over support(lambda); off-support choices produce
/// identical rows and are merged by construction.
StrategyChannel strategy_channel(const Decomposition& lambda,
                                 long long row_limit = kStrategyRowLimit,
                                 long long pre_limit = kStrategyPreLimit);

/// C_f(lambda): f11 closed form sum lambda_D log2 rank(D); f01 by
/// Blahut-Arimoto on the augmented channel x -> (y, D); f10 on the strategy
/// channel; f00 on the reconstruction.
double c_f(const Decomposition& lambda, Flag f, double tol = kBaTol,
           long long strategy_row_limit = kStrategyRowLimit);

/// Binary-output kernel whose rows all lie on the segment between rows i1 and
/// i2: K_{i1,1} = min_i K_{i,1} and K_{i2,1} = max_i K_{i,1} (ties allowed).
bool is_ended(const Channel& k, int i1, int i2);

/// First (i1,i2) pair, in row-major order, that ends every kernel with
/// positive state probability.
std::optional<std::pair<int, int>> find_common_ends(const StateChannelModel& model);

struct UselessnessVerdict {
    bool useless = false;
    bool theorem_applicable = false;  // binary-output kernels (after the bottleneck split)
    std::optional<std::pair<int, int>> common_ends;
    double cap_mixture = 0.0;
    double cap_strategy = 0.0;
};

/// Decides whether causal encoder state information increases capacity. For
/// binary-output kernels the ended-ness criterion decides and the strategy/
/// mixture capacities cross-check it; otherwise the numerical comparison
/// decides. An optional binary-input bottleneck W2 post-composes the kernels.
UselessnessVerdict causal_encoder_si_useless(const StateChannelModel& model,
                                             const std::optional<Channel>& bottleneck = {});

/// Capacity of the channel u in X^{S_E} -> (Y, S_D) with
/// p(y, s_D | u) = sum_{s, s_E} p(s) p(s_E, s_D | s) W(y | u(s_E), s).
double capacity_with_causal_si(const StateChannelModel& model,
                               long long strategy_limit = kStrategyRowLimit,
                               double tol = kBaTol);

struct SweepPoint {
    double p = 0.0;
    double capacity = 0.0;
};

struct Grid {
    double start = 0.0;
    double stop = 0.0;
    double step = 0.0;

    std::vector<double> points() const;
};

enum class DegradationRule { bsc_cascade };

/// Capacity curve over encoder-observation noise p: the decoder observes S
/// through BSC(q), the encoder through BSC(p), with the noisier observation
/// physically degraded with respect to the cleaner one via an exact BSC
/// cascade.
std::vector<SweepPoint> si_sweep(const StateChannelModel& base, double q, const Grid& p_grid,
                                 DegradationRule rule = DegradationRule::bsc_cascade);

/// The built-in two-state binary model behind the p-sweep figure.
StateChannelModel paper_fig5_model();

struct VerifyValue {
    std::string name;
    double observed = 0.0;
    double expected = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerifyItem {
    std::string name;
    bool pass = false;
    std::vector<VerifyValue> values;
    std::string note;
};

struct VerifyReport {
    std::vector<VerifyItem> items;
    bool all_pass() const;
};

/// Recomputes the worked numerical counterexamples and checks every published
/// constant at its pinned tolerance.
VerifyReport verify_paper_examples();

/// Throws VerificationFailed on the first failing value of the report.
void require_all(const VerifyReport& report);

}  // namespace icap
