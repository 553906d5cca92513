#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace nestreuse {

/// Raised for arguments outside an operation's contract.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A pair of chain members that is provably not nested, or volumes out of order.
class NestingError : public InvalidArgument {
public:
    NestingError(std::size_t inner, std::size_t outer, const std::string& what)
        : InvalidArgument(what), inner_(inner), outer_(outer) {}

    std::size_t inner_index() const noexcept { return inner_; }
    std::size_t outer_index() const noexcept { return outer_; }

private:
    std::size_t inner_;
    std::size_t outer_;
};

/// A predicate threw while being evaluated; carries the point that triggered it.
class PredicateError : public std::runtime_error {
public:
    PredicateError(std::vector<double> point, const std::string& what)
        : std::runtime_error(what), point_(std::move(point)) {}

    const std::vector<double>& point() const noexcept { return point_; }

private:
    std::vector<double> point_;
};

}  // namespace nestreuse
