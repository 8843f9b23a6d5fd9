#pragma once

#include <stdexcept>
#include <string>

namespace winnowopt {

/// Root of every exception thrown by the library.
struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// An atom or term violates the two-sorted typing rules, or refers to an unknown attribute.
struct SortError : Error
{
    using Error::Error;
};

/// Tuple arity, schema or tuple-variable count mismatch between two objects that must agree.
struct SchemaError : Error
{
    using Error::Error;
};

/// A check was invoked on a preference relation that does not meet its precondition (e.g. irreflexivity).
struct PreconditionError : Error
{
    using Error::Error;
};

/// Malformed data file or unresolvable catalog entry.
struct DataError : Error
{
    using Error::Error;
};

/// Malformed query plan.
struct PlanError : Error
{
    using Error::Error;
};

}
