// Channels, deterministic channels, input distributions, and information measures.
// All logarithms are base 2; capacities and divergences are in bits.
#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "icap/errors.hpp"

namespace icap {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr double kProbTol = 1e-9;   // stochasticity checks
inline constexpr double kInfoTol = 1e-6;   // capacity comparisons
inline constexpr long long kEnumLimit = 1 << 20;

/// Row-stochastic m x n matrix. Entries are clamped to [0,1] on construction,
/// never renormalized.
class Channel {
public:
    static Channel validate(const Mat& raw);

    int m() const { return static_cast<int>(p_.rows()); }
    int n() const { return static_cast<int>(p_.cols()); }
    const Mat& entries() const { return p_; }
    double operator()(int x, int y) const { return p_(x, y); }
    Eigen::RowVectorXd row(int x) const { return p_.row(x); }

    /// Column-sum vector 1W.
    Eigen::RowVectorXd column_sums() const { return p_.colwise().sum(); }
    /// Number of nonzero entries.
    int weight() const { return static_cast<int>((p_.array() > 0.0).count()); }
    /// Number of nonzero entries in column j.
    int column_weight(int j) const { return static_cast<int>((p_.col(j).array() > 0.0).count()); }

private:
    explicit Channel(Mat p) : p_(std::move(p)) {}
    Mat p_;
};

/// Deterministic channel as a map x -> image[x]. Images are 0-based here;
/// the JSON interface uses 1-based values.
struct DetChannel {
    int m = 0;
    int n = 0;
    std::vector<int> image;

    Mat as_matrix() const;
    Channel as_channel() const { return Channel::validate(as_matrix()); }
};

/// Lexicographic rank of the image tuple. This is THE canonical index used by
/// every weight vector over deterministic channels.
long long det_index(const DetChannel& d);
DetChannel det_from_index(int m, int n, long long index);
long long det_count(int m, int n, long long limit = kEnumLimit);

/// All n^m deterministic channels in canonical (lexicographic) order.
std::vector<DetChannel> enumerate_det_channels(int m, int n, long long limit = kEnumLimit);

/// Size of the image of the map; equals the matrix rank of the 0-1 matrix.
int det_rank(const DetChannel& d);

/// Probability vector over an input alphabet.
struct InputDist {
    Vec p;

    static InputDist validate(const Vec& raw);
    int size() const { return static_cast<int>(p.size()); }
    double operator[](int i) const { return p(i); }
};

InputDist uniform_dist(int m);

/// KL divergence in bits; +infinity when support(p) is not contained in support(q).
double kl_divergence(const Vec& p, const Vec& q);

/// I(mu, W) = sum_x mu_x D(W_{x,*} || mu W) in bits.
double mutual_information(const InputDist& mu, const Channel& w);

/// Binary entropy in bits, h(0) = h(1) = 0.
double binary_entropy(double eps);

/// Statistical (total variation) distance 0.5*||p-q||_1.
double statistical_distance(const Vec& p, const Vec& q);

/// Max over rows of the statistical distance between corresponding rows.
double channel_distance(const Channel& w, const Channel& v);

/// Capacity value plus everything needed to check optimality: tau = mu W,
/// per-row divergences D(W_{x,*}||tau), and the max-divergence optimality gap.
struct CapacityCertificate {
    double capacity = 0.0;  // I(mu, W), a lower bound on C within gap
    InputDist input_dist;
    Vec output_dist;
    Vec divergences;
    double gap = 0.0;  // max_x D(W_x||tau) - I(mu, W) >= C - I(mu, W)
};

struct GallagerCheck {
    CapacityCertificate certificate;
    bool achieved = false;
};

/// Checks the capacity-achieving condition: divergences equal on support(mu)
/// and not larger off support, within tol.
GallagerCheck verify_capacity_achieving(const Channel& w, const InputDist& mu,
                                        double tol = kInfoTol);

}  // namespace icap
