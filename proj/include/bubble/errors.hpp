#pragma once

#include <stdexcept>
#include <string>

namespace bubble {

/// Bad configuration: unknown column, invalid parameter combination, ...
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// File-level failures: missing file, malformed row, duplicate timestamp.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Rank-deficient design matrix.
class singular_design_error : public std::domain_error {
public:
    explicit singular_design_error(const std::string& msg) : std::domain_error(msg) {}
};

}  // namespace bubble
