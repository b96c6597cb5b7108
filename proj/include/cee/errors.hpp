#ifndef CEE_ERRORS_HPP
#define CEE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace cee {

/// Failure categories. The numeric values double as process exit codes in
/// the command-line tool (0 = success, 1 = unexpected).
enum class ErrorCode : int {
    InvalidInput = 2,
    Infeasible = 3,
    IllConditioned = 4,
    PathFailure = 5,
    InsufficientData = 6,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }
    int exit_code() const noexcept { return static_cast<int>(code_); }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace cee

#endif
