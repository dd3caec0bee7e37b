#ifndef CLOUDEDGE_ERRORS_HPP
#define CLOUDEDGE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cloudedge {

// Bad values coming from user-supplied configuration (scenario files, CLI flags).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

// API misuse: preconditions violated by the caller (dimension mismatches,
// out-of-range parameters, lookups of ids that do not exist).
class misuse_error : public std::logic_error {
public:
    explicit misuse_error(const std::string& what) : std::logic_error(what) {}
};

// A requested computation has no valid result (e.g. a transport plan row that
// carries no mass cannot be rounded to a node choice).
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace cloudedge

#endif
