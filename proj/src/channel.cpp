#include "icap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace icap {
namespace {

constexpr double kEntryFloor = -1e-12;

double xlog2x_over(double p, double q) {
    if (p <= 0.0) return 0.0;
    if (q <= 0.0) return std::numeric_limits<double>::infinity();
    return p * std::log2(p / q);
}

}  // namespace

Channel Channel::validate(const Mat& raw) {
    const int m = static_cast<int>(raw.rows());
    const int n = static_cast<int>(raw.cols());
    if (m < 2 || n < 2) throw WrongShape("channel must be at least 2x2");
    Mat p = raw;
    for (int i = 0; i < m; ++i) {
        const double min_entry = p.row(i).minCoeff();
        if (min_entry < kEntryFloor) throw NotStochastic(i + 1, -min_entry);
        const double dev = std::abs(p.row(i).sum() - 1.0);
        if (dev > kProbTol) throw NotStochastic(i + 1, dev);
    }
    p = p.cwiseMax(0.0).cwiseMin(1.0);
    return Channel(std::move(p));
}

Mat DetChannel::as_matrix() const {
    Mat d = Mat::Zero(m, n);
    for (int i = 0; i < m; ++i) d(i, image[i]) = 1.0;
    return d;
}

long long det_count(int m, int n, long long limit) {
    long long count = 1;
    for (int i = 0; i < m; ++i) {
        if (count > (limit + n - 1) / n) throw TooLarge("deterministic channels", count * n, limit);
        count *= n;
    }
    if (count > limit) throw TooLarge("deterministic channels", count, limit);
    return count;
}

long long det_index(const DetChannel& d) {
    long long index = 0;
    for (int i = 0; i < d.m; ++i) index = index * d.n + d.image[i];
    return index;
}

DetChannel det_from_index(int m, int n, long long index) {
    DetChannel d{m, n, std::vector<int>(m, 0)};
    for (int i = m - 1; i >= 0; --i) {
        d.image[i] = static_cast<int>(index % n);
        index /= n;
    }
    return d;
}

std::vector<DetChannel> enumerate_det_channels(int m, int n, long long limit) {
    const long long count = det_count(m, n, limit);
    std::vector<DetChannel> all;
    all.reserve(count);
    for (long long k = 0; k < count; ++k) all.push_back(det_from_index(m, n, k));
    return all;
}

int det_rank(const DetChannel& d) {
    std::vector<bool> hit(d.n, false);
    int rank = 0;
    for (int y : d.image) {
        if (!hit[y]) {
            hit[y] = true;
            ++rank;
        }
    }
    return rank;
}

InputDist InputDist::validate(const Vec& raw) {
    if (raw.size() < 1) throw WrongShape("empty distribution");
    if (raw.minCoeff() < kEntryFloor) throw NotStochastic(1, -raw.minCoeff());
    if (std::abs(raw.sum() - 1.0) > kProbTol) throw NotStochastic(1, std::abs(raw.sum() - 1.0));
    InputDist mu;
    mu.p = raw.cwiseMax(0.0).cwiseMin(1.0);
    return mu;
}

InputDist uniform_dist(int m) {
    InputDist mu;
    mu.p = Vec::Constant(m, 1.0 / m);
    return mu;
}

double kl_divergence(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw WrongShape("KL divergence needs equal lengths");
    double acc = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        const double term = xlog2x_over(p(i), q(i));
        if (std::isinf(term)) return term;
        acc += term;
    }
    return std::max(acc, 0.0);
}

double mutual_information(const InputDist& mu, const Channel& w) {
    if (mu.size() != w.m()) throw WrongShape("input distribution length must match channel");
    Eigen::RowVectorXd tau = mu.p.transpose() * w.entries();
    double acc = 0.0;
    for (int x = 0; x < w.m(); ++x) {
        if (mu[x] <= 0.0) continue;
        acc += mu[x] * kl_divergence(w.row(x).transpose(), tau.transpose());
    }
    return std::max(acc, 0.0);
}

double binary_entropy(double eps) {
    if (eps < 0.0 || eps > 1.0) throw DomainError("binary_entropy needs eps in [0,1]");
    auto xlog2 = [](double t) { return t > 0.0 ? t * std::log2(t) : 0.0; };
    return -xlog2(eps) - xlog2(1.0 - eps);
}

double statistical_distance(const Vec& p, const Vec& q) {
    if (p.size() != q.size()) throw WrongShape("statistical distance needs equal lengths");
    return 0.5 * (p - q).lpNorm<1>();
}

double channel_distance(const Channel& w, const Channel& v) {
    if (w.m() != v.m() || w.n() != v.n()) throw WrongShape("channel distance needs equal shapes");
    double best = 0.0;
    for (int i = 0; i < w.m(); ++i)
        best = std::max(best, statistical_distance(w.row(i).transpose(), v.row(i).transpose()));
    return best;
}

GallagerCheck verify_capacity_achieving(const Channel& w, const InputDist& mu, double tol) {
    if (mu.size() != w.m()) throw WrongShape("input distribution length must match channel");
    Vec tau = (mu.p.transpose() * w.entries()).transpose();
    Vec div(w.m());
    double info = 0.0;
    for (int x = 0; x < w.m(); ++x) {
        div(x) = kl_divergence(w.row(x).transpose(), tau);
        if (mu[x] > 0.0) info += mu[x] * div(x);
    }
    info = std::max(info, 0.0);
    bool achieved = true;
    for (int x = 0; x < w.m(); ++x) {
        if (mu[x] > 0.0 ? std::abs(div(x) - info) > tol : div(x) > info + tol) achieved = false;
    }
    CapacityCertificate cert{info, mu, std::move(tau), div, div.maxCoeff() - info};
    return GallagerCheck{std::move(cert), achieved};
}

}  // namespace icap
