#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace splitwalk {

/// Out-of-range distribution or estimator parameter.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Caller violated an operation's input contract (ordering, lengths, mixing).
class UsageError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Inputs are individually valid but mutually inconsistent (e.g. r_i > N).
class InconsistentInputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A sampler ran out of budget: rejection cap, trajectory length, starvation.
class SamplingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A walk exceeded its conditional-draw cap; usually P(X > x) = 0.
class RunawayWalkError : public std::runtime_error {
public:
    RunawayWalkError(const std::string& what, std::size_t walk_index)
        : std::runtime_error(what), walk_index_(walk_index) {}
    std::size_t walk_index() const noexcept { return walk_index_; }

private:
    std::size_t walk_index_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace splitwalk
