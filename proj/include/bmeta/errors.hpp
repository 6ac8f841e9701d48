#ifndef BMETA_ERRORS_HPP
#define BMETA_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bmeta {

// A missing or misdeclared column in an input table.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A cell that could not be interpreted; messages carry the 1-based data row.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A value outside the mathematical domain of an operation.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A quantity that collapses to zero spread (constant column, zero variance).
struct DegenerateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientDataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Linear-algebra or sampler failures; messages include what was being solved.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two artifacts that must describe the same dataset do not.
struct MismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bmeta

#endif
