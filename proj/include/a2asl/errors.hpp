#ifndef A2ASL_ERRORS_HPP
#define A2ASL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace a2asl {

/// Invalid scenario or module configuration. Raised before any simulation
/// work happens.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace a2asl

#endif
