#pragma once

#include <stdexcept>
#include <string>

namespace spaceform {

/// Thrown when an iterative procedure fails to reach its tolerance
/// (shooting bracket failures, stalled policy iteration, root finding).
class convergence_error : public std::runtime_error {
public:
    explicit convergence_error(const std::string& what) : std::runtime_error(what) {}
};

/// Thrown on file read/write problems, including CSV parse errors.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace spaceform
