#pragma once

#include <stdexcept>
#include <string>

namespace cbci {

/// Broad failure category, used by the CLI to pick an exit code.
enum class ErrorKind {
    Io,          ///< file missing or unreadable
    Parse,       ///< malformed CSV, schema or means file
    Validation,  ///< inputs violate a precondition
    Pipeline,    ///< a pipeline stage could not proceed
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

}  // namespace cbci
