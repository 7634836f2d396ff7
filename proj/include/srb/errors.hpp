#ifndef SRB_ERRORS_HPP
#define SRB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace srb {

/// A standing dynamical hypothesis failed on the supplied family
/// (non-repelling periodic orbit, superstable critical orbit, ...).
/// The CLI maps this to exit code 1.
class hypothesis_error : public std::runtime_error {
public:
    explicit hypothesis_error(const std::string& what) : std::runtime_error(what) {}
};

/// A numerical procedure failed to converge or a result certificate
/// could not be established. CLI exit code 2.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration, descriptor, or request (parameter outside the
/// declared window, malformed JSON, bad flag). CLI exit code 3.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace srb

#endif
