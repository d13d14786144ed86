// Acceptance suite: one line per criterion, nonzero exit when anything fails.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "icap/intrinsic.hpp"
#include "icap/json_io.hpp"

using namespace icap;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void expect(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

void expect_close(double observed, double want, double tol, const std::string& what) {
    if (!(std::abs(observed - want) <= tol)) {
        std::ostringstream msg;
        msg.precision(12);
        msg << what << ": observed " << observed << ", wanted " << want << " +/- " << tol;
        throw CheckFailure(msg.str());
    }
}

Channel random_channel(std::mt19937_64& rng, int m, int n) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Mat p(m, n);
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) {
            p(i, j) = -std::log(1.0 - u(rng));
            s += p(i, j);
        }
        p.row(i) /= s;
    }
    return Channel::validate(p);
}

Channel concrete_3x3() {
    Mat p(3, 3);
    p << 0.3, 0.3, 0.4, 0.2, 0.5, 0.3, 0.4, 0.1, 0.5;
    return Channel::validate(p);
}

Channel counterexample_3x2() {
    Mat p(3, 2);
    p << 0.9, 0.1, 0.6, 0.4, 0.2, 0.8;
    return Channel::validate(p);
}

void criterion_exact_extremes() {
    const Channel w = concrete_3x3();
    const IcExact lo = ic11_exact(w, Sense::min);
    const IcExact hi = ic11_exact(w, Sense::max);
    expect_close(lo.bits, 0.4, 1e-6, "minimum");
    expect_close(hi.bits, 0.2 + 0.8 * std::log2(3.0), 1e-6, "maximum");
    expect(membership(lo.witness, w), "minimum witness fails membership");
    expect(membership(hi.witness, w), "maximum witness fails membership");
    expect(validate_optimal_support(lo.witness, Sense::min).empty(),
           "minimum witness violates a necessary optimality condition");
    expect(validate_optimal_support(hi.witness, Sense::max).empty(),
           "maximum witness violates a necessary optimality condition");
}

void criterion_brackets() {
    const ICReport r = ic11_bounds(concrete_3x3());
    expect_close(r.lower_bracket.lo, 0.4, 1e-9, "lower bracket left end");
    expect_close(r.lower_bracket.hi, 0.4 * std::log2(3.0), 1e-9, "lower bracket right end");
    expect_close(r.upper_bracket.lo, 1.0, 1e-9, "upper bracket left end");
    expect_close(r.upper_bracket.hi, 0.1 + 0.9 * std::log2(3.0), 1e-9, "upper bracket right end");
    expect(r.ingredients.has_value() && r.ingredients->w_prime.has_value(),
           "missing residual channel");
    Mat want(3, 3);
    want << 0.25, 0.5, 0.25, 0.0, 1.0, 0.0, 0.5, 0.0, 0.5;
    expect((*r.ingredients->w_prime - want).cwiseAbs().maxCoeff() <= 1e-12,
           "residual channel off by more than 1e-12");
}

void criterion_uniform_vertices() {
    Mat u(2, 2);
    u << 0.5, 0.5, 0.5, 0.5;
    const Channel w = Channel::validate(u);
    const auto verts = enumerate_vertices(w);
    expect(verts.size() == 2, "expected exactly two vertices");
    const Decomposition* perfect = nullptr;
    const Decomposition* useless = nullptr;
    for (const auto& v : verts) {
        const auto sup = v.support();
        if (sup == std::vector<long long>{1, 2}) perfect = &v;
        if (sup == std::vector<long long>{0, 3}) useless = &v;
    }
    expect(perfect != nullptr, "identity/swap vertex missing");
    expect(useless != nullptr, "constants vertex missing");
    for (const long long k : {1LL, 2LL})
        expect_close(perfect->weights(k), 0.5, 1e-12, "identity/swap weight");
    for (const long long k : {0LL, 3LL})
        expect_close(useless->weights(k), 0.5, 1e-12, "constants weight");
    expect_close(c_f(*perfect, Flag::f11), 1.0, 1e-9, "full-information value of identity/swap");
    expect_close(c_f(*perfect, Flag::f10), 1.0, 1e-9, "encoder-only value of identity/swap");
    expect_close(c_f(*useless, Flag::f11), 0.0, 1e-9, "full-information value of constants");
    expect_close(c_f(*useless, Flag::f10), 0.0, 1e-9, "encoder-only value of constants");
}

void criterion_binary_grid() {
    for (int a = 0; a <= 20; ++a) {
        for (int b = 0; b <= 20; ++b) {
            const double e1 = a / 20.0;  // exact at the endpoints
            const double e2 = b / 20.0;
            const BinaryBinaryReport r = binary_binary_report(e1, e2);
            const Channel w = r.channel();
            std::ostringstream at;
            at << "(" << e1 << ", " << e2 << ")";
            expect_close(r.lower11, ic11_exact(w, Sense::min).bits, 1e-5,
                         "lower full-information value at " + at.str());
            expect_close(r.upper11, ic11_exact(w, Sense::max).bits, 1e-5,
                         "upper full-information value at " + at.str());
            const ICReport r10 = ic10_binary_output(w);
            expect_close(r.lower10, r10.lower, 1e-5, "lower encoder-only value at " + at.str());
            expect_close(r.upper10, r10.upper, 1e-5, "upper encoder-only value at " + at.str());
            const ICReport r01 = ic01_binary_input(w);
            expect_close(r.lower01, r01.lower, 1e-5, "lower decoder-only value at " + at.str());
            expect_close(r.upper01, r01.upper, 1e-5, "upper decoder-only value at " + at.str());
        }
    }
}

const VerifyItem& find_item(const VerifyReport& report, const std::string& needle) {
    for (const auto& item : report.items)
        if (item.name.find(needle) != std::string::npos) return item;
    throw CheckFailure("verification item not found: " + needle);
}

void criterion_strategies_beat_capacity() {
    const VerifyReport report = verify_paper_examples();
    const VerifyItem& item = find_item(report, "strategies beat");
    for (const auto& v : item.values)
        expect(v.pass, v.name + " missed its pinned value");
    expect(item.pass, "item failed");
}

void criterion_ordered_kernels_help() {
    const VerifyReport report = verify_paper_examples();
    const VerifyItem& item = find_item(report, "columnwise-ordered");
    for (const auto& v : item.values)
        expect(v.pass, v.name + " missed its pinned value");
    expect(item.pass, "item failed");
}

void criterion_observation_sweep() {
    const StateChannelModel base = paper_fig5_model();
    const double q = 0.25;
    const auto pts = si_sweep(base, q, Grid{0.0, 0.5, 0.05});
    expect(pts.size() == 11, "expected an 11-point grid");
    std::size_t best = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].capacity > pts[best].capacity) best = i;
    expect_close(pts[best].p, 0.25, 1e-12, "maximizing encoder noise");
    for (const auto& pt : pts)
        expect(pts[best].capacity >= pt.capacity - 1e-9, "apex is not a maximum");

    // at p = q the two observations coincide, so the capacity splits over the
    // shared observation into posterior-mixture capacities
    Mat post0 = Mat::Zero(2, 2), post1 = Mat::Zero(2, 2);
    post0 = 0.75 * base.kernels[0].entries() + 0.25 * base.kernels[1].entries();
    post1 = 0.25 * base.kernels[0].entries() + 0.75 * base.kernels[1].entries();
    const double split = 0.5 * blahut_arimoto(Channel::validate(post0)).capacity +
                         0.5 * blahut_arimoto(Channel::validate(post1)).capacity;
    expect_close(pts[best].capacity, split, 1e-6, "shared-observation split");

    // at p = 0 the perfect encoder observation adds nothing beyond what the
    // decoder already receives
    Mat obs_q(2, 2);
    obs_q << 1.0 - q, q, q, 1.0 - q;
    const StateChannelModel decoder_only =
        StateChannelModel::validate(base.kernels, base.p_s, 1, 2, obs_q);
    expect_close(pts[0].capacity, capacity_with_causal_si(decoder_only), 1e-6,
                 "decoder-only floor at zero encoder noise");
}

void criterion_birkhoff() {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 2);
        const int n = 2 + static_cast<int>(rng() % 2);
        const Channel w = random_channel(rng, m, n);
        ColumnSumBounds bounds;
        bounds.a = Eigen::VectorXi(n);
        bounds.b = Eigen::VectorXi(n);
        const auto sums = w.column_sums();
        for (int j = 0; j < n; ++j) {
            bounds.a(j) = static_cast<int>(std::floor(sums(j) + 1e-9));
            bounds.b(j) = static_cast<int>(std::ceil(sums(j) - 1e-9));
        }
        const Decomposition dec = birkhoff_decompose(w, bounds);
        expect(channel_distance(reconstruct(dec), w) <= 1e-9, "reconstruction off");
        const auto atoms = dec.atoms();
        expect(static_cast<int>(atoms.size()) <= w.weight() - m + 1 + n, "atom count bound");
        for (const auto& [atom, weight] : atoms) {
            Eigen::VectorXi colcount = Eigen::VectorXi::Zero(n);
            for (int i = 0; i < m; ++i) colcount(atom.image[i]) += 1;
            for (int j = 0; j < n; ++j)
                expect(colcount(j) >= bounds.a(j) && colcount(j) <= bounds.b(j),
                       "atom outside the column-sum class");
        }
    }

    Mat p(3, 3);
    p << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
    ColumnSumBounds perm;
    perm.a = Eigen::VectorXi::Ones(3);
    perm.b = Eigen::VectorXi::Ones(3);
    for (const auto& [atom, weight] : birkhoff_decompose(Channel::validate(p), perm).atoms())
        expect(det_rank(atom) == 3, "non-permutation atom for a doubly stochastic matrix");
}

void criterion_rank_probabilities() {
    std::mt19937_64 rng(103);
    const std::vector<std::pair<int, int>> shapes = {{2, 2}, {2, 3}, {3, 2}, {2, 4}, {3, 3}, {2, 5}};
    for (int trial = 0; trial < 200; ++trial) {
        const auto [m, n] = shapes[trial % shapes.size()];
        const Channel w = random_channel(rng, m, n);
        const RankProbReport closed = rank1_probs(w);

        const auto dets = enumerate_det_channels(m, n);
        const long long count = static_cast<long long>(dets.size());
        LinearProgram lp;
        lp.objective = Vec::Zero(count);
        lp.eq = Mat::Zero(m * n + 1, count);
        lp.rhs = Vec(m * n + 1);
        for (long long k = 0; k < count; ++k) {
            for (int i = 0; i < m; ++i) lp.eq(i * n + dets[k].image[i], k) = 1.0;
            lp.eq(m * n, k) = 1.0;
            lp.objective(k) = det_rank(dets[k]) == 1 ? 1.0 : 0.0;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) lp.rhs(i * n + j) = w(i, j);
        lp.rhs(m * n) = 1.0;

        const LpSolution mn = solve_lp(lp);
        lp.sense = LpSense::maximize;
        const LpSolution mx = solve_lp(lp);
        expect(mn.status == LpStatus::optimal && mx.status == LpStatus::optimal,
               "rank-probability program not optimal");
        expect_close(closed.lower_rank1, mn.value, 1e-6, "rank-one minimum");
        expect_close(closed.upper_rank1, mx.value, 1e-6, "rank-one maximum");
    }
}

void criterion_greedy_vertices() {
    std::mt19937_64 rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 2);
        const int n = 2 + static_cast<int>(rng() % 2);
        const Channel w = random_channel(rng, m, n);
        const Decomposition dec = greedy_vertex(w, make_ordering(m, n, trial));
        expect(membership(dec, w), "greedy result leaves the polytope");
        expect(is_vertex(dec), "greedy result is not a vertex");
        const SupportBounds sb = support_bounds(w);
        const int sz = static_cast<int>(dec.support().size());
        expect(sz >= sb.lower && sz <= sb.upper, "support size outside bounds");
    }
    Mat z(2, 2);
    z << 1.0, 0.0, 0.3, 0.7;
    expect(enumerate_vertices(Channel::validate(z)).size() == 1,
           "the one-point polytope should have a single vertex");
}

void criterion_information_gap() {
    const Channel w = counterexample_3x2();
    const ICReport full = ic11_bounds(w);
    expect(full.upper == 1.0, "full-availability value must be exactly one");
    const VertexOptimum dec = upper_ic_via_vertices(w, Flag::f01);
    expect(dec.bits < 1.0 - 1e-3, "decoder-only value not separated from one");
}

void criterion_common_ends() {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 2);
        std::vector<Channel> kernels;
        for (int s = 0; s < 2; ++s) {
            // rows on a segment with shared end rows 0 and m-1
            double lo = u(rng), hi = u(rng);
            if (lo > hi) std::swap(lo, hi);
            Mat k(m, 2);
            k(0, 0) = lo;
            k(m - 1, 0) = hi;
            for (int i = 1; i + 1 < m; ++i) k(i, 0) = lo + (hi - lo) * u(rng);
            for (int i = 0; i < m; ++i) k(i, 1) = 1.0 - k(i, 0);
            kernels.push_back(Channel::validate(k));
        }
        Vec p_s(2);
        p_s(0) = 0.2 + 0.6 * u(rng);
        p_s(1) = 1.0 - p_s(0);
        const StateChannelModel model =
            StateChannelModel::with_full_encoder_si(kernels, p_s);
        expect(find_common_ends(model).has_value(), "constructed model lost its common ends");
        const double with_si = capacity_with_causal_si(model);
        const double without = blahut_arimoto(model.mixture()).capacity;
        expect_close(with_si, without, 1e-6, "capacity moved despite common ends");
    }

    // ordered ternary-output kernels where the encoder observation does help
    Mat k1(2, 3), k2(2, 3);
    k1 << 0.0, 0.1, 0.9, 0.0, 0.05, 0.95;
    k2 << 0.9, 0.1, 0.0, 0.0, 0.05, 0.95;
    Vec p_s(2);
    p_s << 17.0 / 18.0, 1.0 / 18.0;
    const StateChannelModel helper = StateChannelModel::with_full_encoder_si(
        {Channel::validate(k1), Channel::validate(k2)}, p_s);
    const UselessnessVerdict verdict = causal_encoder_si_useless(helper);
    expect(!verdict.useless, "encoder observation wrongly judged useless");
    expect(verdict.cap_strategy > verdict.cap_mixture + 1e-6, "strategy capacity gap vanished");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void()>>> criteria = {
        {"exact extremes and optimal witnesses of the concrete 3x3 channel", criterion_exact_extremes},
        {"closed-form brackets and residual channel of the concrete 3x3 channel", criterion_brackets},
        {"vertex structure and per-vertex capacities of the uniform binary channel", criterion_uniform_vertices},
        {"two-by-two closed forms against the general machinery on a 21x21 grid", criterion_binary_grid},
        {"pinned strategy-vs-capacity counterexample values", criterion_strategies_beat_capacity},
        {"pinned ordered-kernel counterexample values", criterion_ordered_kernels_help},
        {"noisy-observation sweep: apex, split identity, and decoder floor", criterion_observation_sweep},
        {"generalized birkhoff decomposition on random channels", criterion_birkhoff},
        {"closed-form rank-one extremes against the linear program", criterion_rank_probabilities},
        {"greedy vertex extraction properties", criterion_greedy_vertices},
        {"full-vs-decoder-only separation on the binary-output counterexample", criterion_information_gap},
        {"common-end kernels make encoder observations useless", criterion_common_ends},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        std::string note;
        try {
            criteria[i].second();
        } catch (const std::exception& e) {
            note = e.what();
        }
        if (note.empty()) {
            std::printf("[PASS] %02zu %s\n", i + 1, criteria[i].first.c_str());
        } else {
            std::printf("[FAIL] %02zu %s: %s\n", i + 1, criteria[i].first.c_str(), note.c_str());
            ++failed;
        }
    }
    if (failed == 0) {
        std::printf("all %zu acceptance criteria passed\n", criteria.size());
        return 0;
    }
    std::printf("%d of %zu acceptance criteria failed\n", failed, criteria.size());
    return 1;
}
