#pragma once

#include <stdexcept>
#include <string>

namespace ssgn {

// Single exception type for the whole toolkit; messages carry the detail.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

[[noreturn]] inline void fail(const std::string& msg) { throw Error(msg); }

inline void require(bool cond, const std::string& msg) {
    if (!cond) fail(msg);
}

} // namespace ssgn
