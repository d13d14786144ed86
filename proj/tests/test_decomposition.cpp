#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "icap/decomposition.hpp"
#include "icap/json_io.hpp"

using namespace icap;

namespace {

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

Channel z_channel(double theta) {
    Mat p(2, 2);
    p << 1.0, 0.0, theta, 1.0 - theta;
    return Channel::validate(p);
}

Channel uniform_bsc() {
    Mat p(2, 2);
    p << 0.5, 0.5, 0.5, 0.5;
    return Channel::validate(p);
}

}  // namespace

TEST_CASE("decomposition construction, support, and atoms") {
    const Decomposition dec = Decomposition::from_atoms(
        2, 2, {{{0, 0}, 0.25}, {{1, 1}, 0.75}});
    CHECK(dec.weights.size() == 4);
    CHECK(dec.support() == std::vector<long long>{0, 3});
    const auto atoms = dec.atoms();
    REQUIRE(atoms.size() == 2);
    CHECK(atoms[0].first.image == std::vector<int>{0, 0});
    CHECK(atoms[0].second == doctest::Approx(0.25));
    DetChannel d;
    d.m = 2;
    d.n = 2;
    d.image = {1, 1};
    CHECK(dec.weight_of(d) == doctest::Approx(0.75));

    Vec bad = Vec::Zero(4);
    bad(0) = 0.5;  // mass 0.5 != 1
    CHECK_THROWS_AS(Decomposition::validate(2, 2, bad), NotStochastic);
    CHECK_THROWS_AS(Decomposition::validate(2, 2, Vec::Zero(3)), WrongShape);
}

TEST_CASE("reconstruct and membership") {
    const Decomposition dec = Decomposition::from_atoms(
        2, 2, {{{0, 0}, 0.3}, {{0, 1}, 0.7}});
    const Channel w = reconstruct(dec);
    CHECK(channel_distance(w, z_channel(0.3)) == doctest::Approx(0.0));
    CHECK(membership(dec, z_channel(0.3)));
    CHECK_FALSE(membership(dec, uniform_bsc()));
}

TEST_CASE("orderings are permutations and seed zero is lexicographic") {
    const auto lex = make_ordering(2, 3, 0);
    REQUIRE(lex.size() == 9);
    for (long long k = 0; k < 9; ++k) CHECK(lex[k] == k);

    const auto shuffled = make_ordering(2, 3, 42);
    CHECK(shuffled != lex);
    auto sorted = shuffled;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == lex);
    CHECK(make_ordering(2, 3, 42) == shuffled);  // deterministic in the seed
}

TEST_CASE("greedy extraction returns vertices that reconstruct the channel") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 2 + static_cast<int>(rng() % 3);
        const int n = 2 + static_cast<int>(rng() % 2);
        const Channel w = random_channel(rng, m, n);
        const auto ordering = make_ordering(m, n, trial);
        const Decomposition dec = greedy_vertex(w, ordering);
        CHECK(membership(dec, w));
        CHECK(is_vertex(dec));
        const SupportBounds sb = support_bounds(w);
        const int sz = static_cast<int>(dec.support().size());
        CHECK(sz >= sb.lower);
        CHECK(sz <= sb.upper);
    }
}

TEST_CASE("support bounds formulas") {
    // full-support 3x3 channel: lower = ceil((9-3)/(3-1)/... ) per the
    // dimension count, upper = weight - m + 1
    std::mt19937_64 rng(5);
    const Channel w = random_channel(rng, 3, 3);
    const SupportBounds sb = support_bounds(w);
    CHECK(sb.upper == w.weight() - w.m() + 1);
    CHECK(sb.lower >= 1);
    CHECK(sb.lower <= sb.upper);

    // deterministic channel: weight m, a single atom
    DetChannel d;
    d.m = 3;
    d.n = 3;
    d.image = {2, 0, 1};
    const SupportBounds one = support_bounds(d.as_channel());
    CHECK(one.lower == 1);
    CHECK(one.upper == 1);
}

TEST_CASE("greedy partial pass leaves a consistent residual") {
    std::mt19937_64 rng(9);
    const Channel w = random_channel(rng, 2, 3);
    const auto full = make_ordering(2, 3, 0);
    const std::vector<long long> half(full.begin(), full.begin() + 4);
    const PartialDecomposition part = greedy_partial(w, half);
    CHECK(part.residual.minCoeff() >= -1e-12);
    Mat rebuilt = part.residual;
    for (const auto& [atom, weight] : part.partial.atoms()) rebuilt += weight * atom.as_matrix();
    CHECK((rebuilt - w.entries()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("z channel has a unique vertex equal to its only decomposition") {
    const Channel z = z_channel(0.3);
    const auto verts = enumerate_vertices(z);
    REQUIRE(verts.size() == 1);
    CHECK(verts[0].weight_of(DetChannel{2, 2, {0, 0}}) == doctest::Approx(0.3));
    CHECK(verts[0].weight_of(DetChannel{2, 2, {0, 1}}) == doctest::Approx(0.7));
    CHECK(channel_distance(reconstruct(greedy_vertex(z, make_ordering(2, 2, 0))), z) ==
          doctest::Approx(0.0));
}

TEST_CASE("uniform binary channel has exactly the identity/swap and constant vertices") {
    const auto verts = enumerate_vertices(uniform_bsc());
    REQUIRE(verts.size() == 2);
    bool saw_useless = false;
    bool saw_perfect = false;
    for (const auto& v : verts) {
        const auto sup = v.support();
        if (sup == std::vector<long long>{0, 3}) {  // constants U1, U2
            saw_useless = true;
            CHECK(v.weights(0) == doctest::Approx(0.5));
            CHECK(v.weights(3) == doctest::Approx(0.5));
        }
        if (sup == std::vector<long long>{1, 2}) {  // identity and swap
            saw_perfect = true;
            CHECK(v.weights(1) == doctest::Approx(0.5));
            CHECK(v.weights(2) == doctest::Approx(0.5));
        }
    }
    CHECK(saw_useless);
    CHECK(saw_perfect);
}

TEST_CASE("vertex enumeration agrees with the vertex test and membership") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Channel w = random_channel(rng, 3, 3);
        const auto verts = enumerate_vertices(w);
        CHECK(!verts.empty());
        const SupportBounds sb = support_bounds(w);
        for (const auto& v : verts) {
            CHECK(membership(v, w));
            CHECK(is_vertex(v));
            CHECK(static_cast<int>(v.support().size()) <= sb.upper);
        }
    }
    Mat big = Mat::Constant(4, 4, 0.25);
    CHECK_THROWS_AS(enumerate_vertices(Channel::validate(big)), TooLarge);
}

TEST_CASE("incidence matrix rank matches the affine dimension count") {
    // rank = m(n-1) + 1: the m row-sum constraints minus the shared total
    for (int m = 2; m <= 3; ++m)
        for (int n = 2; n <= 3; ++n) {
            const Mat inc = incidence_matrix(m, n);
            CHECK(inc.rows() == static_cast<long long>(std::pow(n, m)));
            CHECK(inc.cols() == m * n);
            Eigen::ColPivHouseholderQR<Mat> qr(inc);
            qr.setThreshold(1e-9);
            CHECK(qr.rank() == m * (n - 1) + 1);
        }
}

TEST_CASE("generalized birkhoff decomposition respects integer column bounds") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
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
        CHECK(membership(dec, w));
        const auto atoms = dec.atoms();
        CHECK(static_cast<int>(atoms.size()) <= w.weight() - m + 1 + n);
        for (const auto& [atom, weight] : atoms) {
            Eigen::VectorXi colcount = Eigen::VectorXi::Zero(n);
            for (int i = 0; i < m; ++i) colcount(atom.image[i]) += 1;
            for (int j = 0; j < n; ++j) {
                CHECK(colcount(j) >= bounds.a(j));
                CHECK(colcount(j) <= bounds.b(j));
            }
        }
    }
}

TEST_CASE("birkhoff on a doubly stochastic matrix yields permutations only") {
    Mat p(3, 3);
    p << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
    const Channel w = Channel::validate(p);
    ColumnSumBounds bounds;
    bounds.a = Eigen::VectorXi::Ones(3);
    bounds.b = Eigen::VectorXi::Ones(3);
    const Decomposition dec = birkhoff_decompose(w, bounds);
    CHECK(membership(dec, w));
    for (const auto& [atom, weight] : dec.atoms()) CHECK(det_rank(atom) == 3);
}

TEST_CASE("birkhoff rejects bounds that exclude the channel") {
    Mat p(3, 3);
    p << 0.5, 0.3, 0.2, 0.2, 0.5, 0.3, 0.3, 0.2, 0.5;
    ColumnSumBounds bounds;
    bounds.a = Eigen::VectorXi::Ones(3) * 2;
    bounds.b = Eigen::VectorXi::Ones(3) * 2;
    CHECK_THROWS_AS(birkhoff_decompose(Channel::validate(p), bounds), Infeasible);
}

TEST_CASE("decomposition json round trip uses one-based images") {
    const Decomposition dec = Decomposition::from_atoms(
        2, 3, {{{0, 2}, 0.4}, {{1, 1}, 0.6}});
    const Json j = to_json(dec);
    REQUIRE(j.at("atoms").size() == 2);
    CHECK(j.at("atoms")[0].at("image")[0].get<int>() == 1);  // 0 -> 1-based
    CHECK(j.at("atoms")[0].at("image")[1].get<int>() == 3);
    const Decomposition back = decomposition_from_json(j);
    CHECK((back.weights - dec.weights).cwiseAbs().maxCoeff() == doctest::Approx(0.0));

    Json zero_based = j;
    zero_based["atoms"][0]["image"][0] = 0;  // invalid: images start at 1
    CHECK_THROWS_AS(decomposition_from_json(zero_based), DomainError);
}
