#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace diracbvp {

// All library failures carry a stable code string (e.g. "NonSeparated",
// "WindingMismatch") so callers and the CLI can map them to exit codes
// without parsing prose.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(std::string code, const std::string& message) {
    throw Error(std::move(code), message);
}

} // namespace diracbvp
