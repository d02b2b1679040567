#ifndef SQUATS_ERRORS_HPP
#define SQUATS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace squats {

// Bad or inconsistent user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameters that cannot be satisfied, e.g. a duplicate-free codebook that
// cannot exist at the requested length (CLI exit code 3).
struct InfeasibleError : std::runtime_error {
    explicit InfeasibleError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace squats

#endif
