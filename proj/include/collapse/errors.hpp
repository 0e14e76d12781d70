#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace collapse {

/// Bad input: precondition violated, malformed file, inconsistent shapes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A closed-form approximation was asked for outside its range of validity.
class OutOfValidityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// The integrator produced a non-finite state.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, std::size_t step_index)
        : std::runtime_error(what), step_index_(step_index) {}

    std::size_t step_index() const noexcept { return step_index_; }

private:
    std::size_t step_index_;
};

/// One or more trajectories of an ensemble failed; carries every failing index.
class EnsembleFailure : public std::runtime_error {
public:
    EnsembleFailure(const std::string& what, std::vector<std::size_t> trajectories)
        : std::runtime_error(what), trajectories_(std::move(trajectories)) {}

    const std::vector<std::size_t>& trajectories() const noexcept { return trajectories_; }

private:
    std::vector<std::size_t> trajectories_;
};

}  // namespace collapse
