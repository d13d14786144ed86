// The polytope Dec(W) of convex decompositions of a channel into deterministic
// channels: membership, greedy vertex construction, generalized Birkhoff
// decomposition, vertex testing, desk-scale vertex enumeration, support bounds.
#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "icap/channel.hpp"

namespace icap {

inline constexpr long long kVertexAtomLimit = 81;  // n^m cap for vertex enumeration

/// Weight vector over all n^m deterministic channels in canonical order.
struct Decomposition {
    int m = 0;
    int n = 0;
    Vec weights;

    static Decomposition validate(int m, int n, const Vec& weights);
    static Decomposition from_atoms(int m, int n,
                                    const std::vector<std::pair<std::vector<int>, double>>& atoms);

    std::vector<long long> support(double tol = 1e-12) const;
    std::vector<std::pair<DetChannel, double>> atoms(double tol = 1e-12) const;
    double weight_of(const DetChannel& d) const { return weights(det_index(d)); }
};

Channel reconstruct(const Decomposition& lambda);
bool membership(const Decomposition& lambda, const Channel& w, double tol = kProbTol);

/// Identity (lexicographic) ordering, or a seeded Fisher-Yates shuffle of it.
/// Seed 0 is the lexicographic ordering.
std::vector<long long> make_ordering(int m, int n, std::uint64_t seed,
                                     long long limit = kEnumLimit);

/// Algorithm: walk the ordering, extract from each deterministic channel the
/// largest feasible weight, stop when the residual is zero. The result is a
/// vertex of Dec(W).
Decomposition greedy_vertex(const Channel& w, std::span<const long long> ordering);

struct PartialDecomposition {
    Decomposition partial;  // weights sum to <= 1
    Mat residual;           // K with W = K + sum lambda_D D
};

/// Greedy pass over a partial ordering; returns the extracted weights and the
/// residual matrix.
PartialDecomposition greedy_partial(const Channel& w, std::span<const long long> ordering);

/// Integer column-sum bounds a <= b defining W[a,b] and D[a,b].
struct ColumnSumBounds {
    Eigen::VectorXi a;
    Eigen::VectorXi b;
};

/// Decomposes W in W[a,b] into deterministic channels in D[a,b] with at most
/// weight(W) - m + 1 + n atoms (generalized Birkhoff).
Decomposition birkhoff_decompose(const Channel& w, const ColumnSumBounds& bounds);

/// n^m x (m*n) 0-1 matrix; row k is the deterministic channel of canonical
/// index k flattened row-major over (i,j).
Mat incidence_matrix(int m, int n, long long limit = kEnumLimit);

/// True iff the incidence rows indexed by support(lambda) are linearly
/// independent (rank tolerance 1e-9).
bool is_vertex(const Decomposition& lambda);

/// All vertices of Dec(W), by depth-first search over linearly independent
/// candidate supports of size <= weight(W) - m + 1. Desk scale only.
std::vector<Decomposition> enumerate_vertices(const Channel& w, long long limit = kVertexAtomLimit);

struct SupportBounds {
    int lower = 0;  // applies to every member of Dec(W)
    int upper = 0;  // applies to vertices
};

SupportBounds support_bounds(const Channel& w);

}  // namespace icap
