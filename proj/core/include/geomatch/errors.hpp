#pragma once

#include <stdexcept>
#include <string>

namespace geomatch {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Object does not contain any integer grid point.
struct EmptyPiercing : Error {
    explicit EmptyPiercing(int object_id)
        : Error("object " + std::to_string(object_id) + " contains no grid point"),
          object(object_id) {}
    int object;
};

// No acceptable balanced separator found within the retry budget.
struct SeparatorNotFound : Error {
    explicit SeparatorNotFound(const std::string& msg) : Error(msg) {}
};

// Zero pivot hit during elimination without pivoting.
struct ZeroPivot : Error {
    explicit ZeroPivot(std::size_t row)
        : Error("zero pivot at row " + std::to_string(row)), index(row) {}
    std::size_t index;
};

// Elimination order does not respect the separator tree.
struct InconsistentOrder : Error {
    explicit InconsistentOrder(const std::string& msg) : Error(msg) {}
};

struct Singular : Error {
    explicit Singular(const std::string& msg) : Error(msg) {}
};

// A star-shaped union was requested around a point that is not strictly
// inside every member.
struct PointNotInterior : Error {
    explicit PointNotInterior(const std::string& msg) : Error(msg) {}
};

// A zero pivot row was not null; the randomized rank argument failed.
struct RankMismatch : Error {
    explicit RankMismatch(const std::string& msg) : Error(msg) {}
};

struct RetryExhausted : Error {
    explicit RetryExhausted(const std::string& msg) : Error(msg) {}
};

struct InvalidMatching : Error {
    explicit InvalidMatching(const std::string& msg) : Error(msg) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& msg) : Error(msg) {}
};

struct GenerationFailed : Error {
    explicit GenerationFailed(const std::string& msg) : Error(msg) {}
};

struct BadInstance : Error {
    explicit BadInstance(const std::string& msg) : Error(msg) {}
};

}  // namespace geomatch
