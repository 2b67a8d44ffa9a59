#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curveforge {

enum class ErrorKind {
    Ordering,
    Domain,
    NoSolution,
    Ambiguity,
    Precondition,
    Extrapolation,
    Conditioning,
    Boundary,
    DegenerateStep,
    Resolution,
    Ingestion,
    OptimizationFailed,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain error raised by every curveforge operation. The kind identifies
/// which precondition or numerical guard tripped.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

#define CURVEFORGE_REQUIRE(cond, kind, msg)                  \
    do {                                                     \
        if (!(cond)) throw ::curveforge::Error((kind), (msg)); \
    } while (false)

}  // namespace curveforge
