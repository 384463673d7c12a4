#pragma once

#include <stdexcept>
#include <string>

namespace mpcert {

/// Malformed or inconsistent user input (dimensions, non-finite entries,
/// invariant violations). The CLI maps it to exit code 1.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotPositiveDefinite : public InvalidInput {
public:
    NotPositiveDefinite(const std::string &what, int pivot) : InvalidInput(what), pivot_(pivot) {}
    int pivot() const { return pivot_; }

private:
    int pivot_;
};

}  // namespace mpcert
