#pragma once

#include <stdexcept>
#include <string>

namespace tailcount {

// Every failure carries a stable machine-readable code next to the
// human-readable message; the CLI maps codes into error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void fail(const char* code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace tailcount
