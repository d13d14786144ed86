// Exception types shared across the library.
#pragma once

#include <stdexcept>
#include <string>

namespace icap {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A row of a would-be channel does not sum to one (or has entries below -1e-12).
struct NotStochastic : Error {
    int row;
    double deviation;
    NotStochastic(int row_, double deviation_)
        : Error("row " + std::to_string(row_) + " is not a probability vector (deviation " +
                std::to_string(deviation_) + ")"),
          row(row_), deviation(deviation_) {}
};

struct WrongShape : Error {
    using Error::Error;
};

// A requested enumeration or solve exceeds the configured size limit.
struct TooLarge : Error {
    long long size;
    long long limit;
    TooLarge(const std::string& what_, long long size_, long long limit_)
        : Error(what_ + ": size " + std::to_string(size_) + " exceeds limit " + std::to_string(limit_)),
          size(size_), limit(limit_) {}
};

struct Infeasible : Error {
    using Error::Error;
};

struct NumericalFailure : Error {
    using Error::Error;
};

// Algorithm 1 left a nonzero residual after exhausting its ordering.
struct ResidualNotZero : Error {
    double residual;
    explicit ResidualNotZero(double residual_)
        : Error("greedy decomposition residual " + std::to_string(residual_) +
                " not zero; retry with refinement"),
          residual(residual_) {}
};

struct DomainError : Error {
    using Error::Error;
};

// A recomputed reference value missed its pinned target.
struct VerificationFailed : Error {
    std::string item;
    double observed;
    double expected;
    VerificationFailed(std::string item_, double observed_, double expected_)
        : Error(item_ + ": observed " + std::to_string(observed_) + ", expected " +
                std::to_string(expected_)),
          item(std::move(item_)), observed(observed_), expected(expected_) {}
};

}  // namespace icap
