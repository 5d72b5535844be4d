#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace crowdsim {

enum class ErrorCode {
    // worldmap
    RaggedInput,
    UnknownGlyph,
    TooSmall,
    NoFreeCells,
    AmbiguousDoor,
    DanglingDoor,
    OrphanPainting,
    NoExits,
    OutOfBounds,
    // perception
    DegenerateTarget,
    // psyche
    NoGoalAvailable,
    // motion / simulation
    NonFiniteForce,
    SpawnFailure,
    // cli
    FileNotFound,
    SchemaError,
    FractionSumError,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace crowdsim
