#pragma once

#include <stdexcept>

namespace relq {

/// Malformed or schema-violating input (JSON documents, event logs). The
/// message carries the source name and, for line-oriented inputs, the line
/// number.
class parse_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace relq
