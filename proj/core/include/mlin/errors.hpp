#pragma once

#include <stdexcept>
#include <string>

namespace mlin {

/// Sampling grid too coarse for the requested atom level or kernel scale.
class resolution_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dense evaluation would exceed the configured size budget.
class resource_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An operator produced a non-finite value; message records the offending input.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Homogeneous kernel evaluated at the origin.
class singular_point_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

} // namespace mlin
