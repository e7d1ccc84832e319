// errors.hpp
#pragma once

#include <stdexcept>
#include <string>

namespace strata {

/// Input violates a documented precondition (bad counts, sizes, weights).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument lies outside the mathematical domain of an operation
/// (e.g. a pmf query outside the support, n > N).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// The budget cannot buy a feasible design.
class BudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The closed-form allocation branch was requested outside its range.
class BranchError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace strata
