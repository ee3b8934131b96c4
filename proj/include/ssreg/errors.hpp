#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ssreg {

//! Thrown when a design submatrix that must have full column rank does not.
class RankDeficiencyError : public std::runtime_error {
public:
    RankDeficiencyError(const std::string& what, int rank, int ncols)
        : std::runtime_error(what + " (numerical rank " + std::to_string(rank) +
                             " of " + std::to_string(ncols) + " columns)"),
          rank_(rank), ncols_(ncols) {}

    int rank() const { return rank_; }
    int ncols() const { return ncols_; }

private:
    int rank_;
    int ncols_;
};

//! Thrown when a subset enumeration would exceed the configured budget.
class EnumerationBudgetError : public std::runtime_error {
public:
    EnumerationBudgetError(std::uint64_t needed, std::uint64_t cap)
        : std::runtime_error("subset enumeration needs " + std::to_string(needed) +
                             " subsets but the budget is " + std::to_string(cap) +
                             "; reduce t or p, or raise the cap"),
          needed_(needed), cap_(cap) {}

    std::uint64_t needed() const { return needed_; }
    std::uint64_t cap() const { return cap_; }

private:
    std::uint64_t needed_;
    std::uint64_t cap_;
};

//! Thrown when a closed-form computation is requested for a prior without one.
class NonConjugateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

//! Thrown on malformed configuration files or values.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ssreg
