#include "icap/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

namespace icap {
namespace {

constexpr double kSnapTol = 1e-12;
constexpr double kRankTol = 1e-9;

void snap_small(Mat& k) {
    k = (k.array().abs() < kSnapTol).select(0.0, k);
}

}  // namespace

Decomposition Decomposition::validate(int m, int n, const Vec& weights) {
    const long long count = det_count(m, n);
    if (weights.size() != count) throw WrongShape("weight vector must have n^m entries");
    if (weights.minCoeff() < -kSnapTol) throw NotStochastic(1, -weights.minCoeff());
    if (std::abs(weights.sum() - 1.0) > kProbTol)
        throw NotStochastic(1, std::abs(weights.sum() - 1.0));
    Decomposition d;
    d.m = m;
    d.n = n;
    d.weights = weights.cwiseMax(0.0);
    return d;
}

Decomposition Decomposition::from_atoms(
    int m, int n, const std::vector<std::pair<std::vector<int>, double>>& atoms) {
    Vec w = Vec::Zero(det_count(m, n));
    for (const auto& [image, weight] : atoms) {
        if (static_cast<int>(image.size()) != m) throw WrongShape("atom image length mismatch");
        for (int y : image)
            if (y < 0 || y >= n) throw DomainError("atom image value out of range");
        w(det_index(DetChannel{m, n, image})) += weight;
    }
    return validate(m, n, w);
}

std::vector<long long> Decomposition::support(double tol) const {
    std::vector<long long> s;
    for (long long k = 0; k < weights.size(); ++k)
        if (weights(k) > tol) s.push_back(k);
    return s;
}

std::vector<std::pair<DetChannel, double>> Decomposition::atoms(double tol) const {
    std::vector<std::pair<DetChannel, double>> out;
    for (long long k : support(tol)) out.emplace_back(det_from_index(m, n, k), weights(k));
    return out;
}

Channel reconstruct(const Decomposition& lambda) {
    Mat acc = Mat::Zero(lambda.m, lambda.n);
    for (const auto& [d, w] : lambda.atoms(0.0))
        for (int i = 0; i < lambda.m; ++i) acc(i, d.image[i]) += w;
    return Channel::validate(acc);
}

bool membership(const Decomposition& lambda, const Channel& w, double tol) {
    if (lambda.m != w.m() || lambda.n != w.n()) return false;
    return (reconstruct(lambda).entries() - w.entries()).cwiseAbs().maxCoeff() <= tol;
}

std::vector<long long> make_ordering(int m, int n, std::uint64_t seed, long long limit) {
    const long long count = det_count(m, n, limit);
    std::vector<long long> order(count);
    for (long long k = 0; k < count; ++k) order[k] = k;
    if (seed != 0) {
        // explicit Fisher-Yates: std::shuffle output is not specified across
        // standard libraries, and orderings must be reproducible everywhere
        std::mt19937_64 rng(seed);
        for (long long i = count - 1; i > 0; --i) {
            const long long j = static_cast<long long>(rng() % static_cast<std::uint64_t>(i + 1));
            std::swap(order[i], order[j]);
        }
    }
    return order;
}

PartialDecomposition greedy_partial(const Channel& w, std::span<const long long> ordering) {
    const long long count = det_count(w.m(), w.n());
    Mat k = w.entries();
    Vec lambda = Vec::Zero(count);
    for (long long idx : ordering) {
        if (idx < 0 || idx >= count) throw DomainError("ordering index out of range");
        const DetChannel d = det_from_index(w.m(), w.n(), idx);
        double take = k(0, d.image[0]);
        for (int i = 1; i < w.m(); ++i) take = std::min(take, k(i, d.image[i]));
        if (take <= 0.0) continue;
        lambda(idx) += take;
        for (int i = 0; i < w.m(); ++i) k(i, d.image[i]) -= take;
        snap_small(k);
    }
    PartialDecomposition out;
    out.partial.m = w.m();
    out.partial.n = w.n();
    out.partial.weights = lambda;
    out.residual = k;
    return out;
}

Decomposition greedy_vertex(const Channel& w, std::span<const long long> ordering) {
    const long long count = det_count(w.m(), w.n());
    if (static_cast<long long>(ordering.size()) != count)
        throw DomainError("greedy_vertex needs a full ordering");
    PartialDecomposition run = greedy_partial(w, ordering);
    const double residual = run.residual.cwiseAbs().maxCoeff();
    if (residual > kProbTol) throw ResidualNotZero(residual);
    return Decomposition::validate(w.m(), w.n(), run.partial.weights);
}

namespace {

// Backtracking search for D in D[lo,hi] with v(i, D(i)) > 0 for every row.
bool find_feasible_det(const Mat& v, const Eigen::VectorXi& lo, const Eigen::VectorXi& hi,
                       std::vector<int>& image) {
    const int m = static_cast<int>(v.rows());
    const int n = static_cast<int>(v.cols());
    Eigen::VectorXi used = Eigen::VectorXi::Zero(n);
    image.assign(m, -1);

    auto feasible_tail = [&](int next_row) {
        // remaining rows must be able to cover every unmet lower quota
        int deficit = 0;
        for (int j = 0; j < n; ++j) deficit += std::max(lo(j) - used(j), 0);
        return deficit <= m - next_row;
    };

    auto rec = [&](auto&& self, int row) -> bool {
        if (row == m) return true;
        for (int j = 0; j < n; ++j) {
            if (v(row, j) <= 0.0 || used(j) >= hi(j)) continue;
            used(j) += 1;
            image[row] = j;
            if (feasible_tail(row + 1) && self(self, row + 1)) return true;
            used(j) -= 1;
            image[row] = -1;
        }
        return false;
    };
    return rec(rec, 0);
}

}  // namespace

Decomposition birkhoff_decompose(const Channel& w, const ColumnSumBounds& bounds) {
    const int m = w.m();
    const int n = w.n();
    if (bounds.a.size() != n || bounds.b.size() != n)
        throw WrongShape("column-sum bounds must have length n");
    Eigen::VectorXi a = bounds.a.cwiseMax(0);
    Eigen::VectorXi b = bounds.b.cwiseMin(m);
    Eigen::RowVectorXd colsum = w.column_sums();
    for (int j = 0; j < n; ++j) {
        if (bounds.a(j) > bounds.b(j)) throw Infeasible("column bound a > b");
        if (colsum(j) < a(j) - kProbTol || colsum(j) > b(j) + kProbTol)
            throw Infeasible("channel column sums violate [a, b]");
    }

    Vec lambda = Vec::Zero(det_count(m, n));
    Mat v = w.entries();  // current channel, renormalized after each extraction
    double rho = 1.0;     // mass not yet assigned to atoms

    // each pass zeroes an entry of v or pins a column sum at an integer bound,
    // so the loop ends after at most weight(W) - m + 1 + n atoms
    const int max_atoms = (w.weight() - m + 1) + n + 2;
    for (int step = 0; step < max_atoms; ++step) {
        Eigen::RowVectorXd c = v.colwise().sum();
        Eigen::VectorXi lo = a;
        Eigen::VectorXi hi = b;
        for (int j = 0; j < n; ++j) {
            if (c(j) <= a(j) + kProbTol) lo(j) = hi(j) = a(j);   // pinned below
            else if (c(j) >= b(j) - kProbTol) lo(j) = hi(j) = b(j);  // pinned above
        }
        std::vector<int> image;
        if (!find_feasible_det(v, lo, hi, image))
            throw NumericalFailure("no feasible deterministic channel in D[a,b]");
        const DetChannel d{m, n, image};

        Eigen::VectorXi dcol = Eigen::VectorXi::Zero(n);
        for (int j : image) dcol(j) += 1;
        double t = 1.0;
        for (int i = 0; i < m; ++i) t = std::min(t, v(i, image[i]));
        for (int j = 0; j < n; ++j) {
            if (dcol(j) > a(j)) t = std::min(t, (c(j) - a(j)) / (dcol(j) - a(j)));
            if (dcol(j) < b(j)) t = std::min(t, (b(j) - c(j)) / (b(j) - dcol(j)));
        }
        if (t >= 1.0 - kSnapTol) {
            lambda(det_index(d)) += rho;
            return Decomposition::validate(m, n, lambda);
        }
        if (t <= kSnapTol) throw NumericalFailure("birkhoff step stalled");
        lambda(det_index(d)) += rho * t;
        rho *= 1.0 - t;
        v = (v - t * d.as_matrix()) / (1.0 - t);
        snap_small(v);
    }
    throw NumericalFailure("birkhoff atom bound exceeded");
}

Mat incidence_matrix(int m, int n, long long limit) {
    const long long count = det_count(m, n, limit);
    Mat inc = Mat::Zero(count, static_cast<long long>(m) * n);
    for (long long k = 0; k < count; ++k) {
        const DetChannel d = det_from_index(m, n, k);
        for (int i = 0; i < m; ++i) inc(k, static_cast<long long>(i) * n + d.image[i]) = 1.0;
    }
    return inc;
}

bool is_vertex(const Decomposition& lambda) {
    const std::vector<long long> sup = lambda.support();
    if (sup.empty()) return false;
    Mat rows(sup.size(), static_cast<long long>(lambda.m) * lambda.n);
    for (std::size_t r = 0; r < sup.size(); ++r) {
        const DetChannel d = det_from_index(lambda.m, lambda.n, sup[r]);
        rows.row(r).setZero();
        for (int i = 0; i < lambda.m; ++i) rows(r, static_cast<long long>(i) * lambda.n + d.image[i]) = 1.0;
    }
    Eigen::ColPivHouseholderQR<Mat> qr(rows.transpose());
    qr.setThreshold(kRankTol);
    return qr.rank() == static_cast<long long>(sup.size());
}

namespace {

struct VertexSearch {
    int m, n;
    long long count;
    Mat cols;          // (m*n) x count, column k = flattened atom k
    Vec target;        // flattened W
    int max_support;
    std::vector<long long> candidates;
    std::vector<Vec> reduced;      // eliminated forms of chosen columns
    std::vector<int> pivots;
    std::vector<long long> chosen;
    std::vector<Decomposition>* out;

    bool consistent(const Vec& residual) const { return residual.cwiseAbs().maxCoeff() <= kRankTol; }

    void emit() {
        Mat sys(cols.rows(), chosen.size());
        for (std::size_t i = 0; i < chosen.size(); ++i) sys.col(i) = cols.col(chosen[i]);
        Vec sol = sys.colPivHouseholderQr().solve(target);
        if ((sys * sol - target).cwiseAbs().maxCoeff() > kRankTol) return;
        if (sol.minCoeff() <= kRankTol) return;  // smaller-support duplicate or outside
        Vec weights = Vec::Zero(count);
        for (std::size_t i = 0; i < chosen.size(); ++i) weights(chosen[i]) = sol(i);
        out->push_back(Decomposition::validate(m, n, weights));
    }

    Vec reduce(Vec v) const {
        for (std::size_t k = 0; k < reduced.size(); ++k)
            v -= (v(pivots[k]) / reduced[k](pivots[k])) * reduced[k];
        return v;
    }

    void dfs(std::size_t from, const Vec& residual) {
        if (consistent(residual)) {
            emit();
            return;  // supersets only repeat this vertex with zero weights
        }
        if (static_cast<int>(chosen.size()) >= max_support) return;
        for (std::size_t ci = from; ci < candidates.size(); ++ci) {
            const long long k = candidates[ci];
            Vec red = reduce(cols.col(k));
            int pivot;
            if (red.cwiseAbs().maxCoeff(&pivot) <= kRankTol) continue;  // dependent
            reduced.push_back(red);
            pivots.push_back(pivot);
            chosen.push_back(k);
            Vec next = residual - (residual(pivot) / red(pivot)) * red;
            dfs(ci + 1, next);
            reduced.pop_back();
            pivots.pop_back();
            chosen.pop_back();
        }
    }
};

}  // namespace

std::vector<Decomposition> enumerate_vertices(const Channel& w, long long limit) {
    const long long count = det_count(w.m(), w.n(), limit);
    VertexSearch search;
    search.m = w.m();
    search.n = w.n();
    search.count = count;
    search.cols = incidence_matrix(w.m(), w.n(), limit).transpose();
    const Mat wt = w.entries().transpose();
    search.target = Eigen::Map<const Vec>(wt.data(), static_cast<long long>(w.m()) * w.n());
    search.max_support = support_bounds(w).upper;

    for (long long k = 0; k < count; ++k) {
        const DetChannel d = det_from_index(w.m(), w.n(), k);
        bool inside = true;
        for (int i = 0; i < w.m(); ++i) inside = inside && w(i, d.image[i]) > 0.0;
        if (inside) search.candidates.push_back(k);
    }

    std::vector<Decomposition> found;
    search.out = &found;
    search.dfs(0, search.target);

    // dedup by proximity of full weight vectors
    std::vector<Decomposition> unique;
    for (auto& v : found) {
        bool dup = false;
        for (const auto& u : unique)
            dup = dup || (u.weights - v.weights).cwiseAbs().maxCoeff() < 1e-8;
        if (!dup) unique.push_back(std::move(v));
    }
    return unique;
}

SupportBounds support_bounds(const Channel& w) {
    std::set<double> values;
    for (int i = 0; i < w.m(); ++i)
        for (int j = 0; j < w.n(); ++j) values.insert(w(i, j));
    const int s = static_cast<int>(values.size());
    int lower = s > 1 ? static_cast<int>(std::ceil(std::log2(static_cast<double>(s)))) : 0;
    for (int i = 0; i < w.m(); ++i) {
        int row_weight = 0;
        for (int j = 0; j < w.n(); ++j) row_weight += w(i, j) > 0.0 ? 1 : 0;
        lower = std::max(lower, row_weight);
    }
    SupportBounds out;
    out.lower = lower;
    out.upper = w.weight() - w.m() + 1;
    return out;
}

}  // namespace icap
