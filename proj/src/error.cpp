#include "crowdsim/error.hpp"

namespace crowdsim {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::RaggedInput: return "RaggedInput";
        case ErrorCode::UnknownGlyph: return "UnknownGlyph";
        case ErrorCode::TooSmall: return "TooSmall";
        case ErrorCode::NoFreeCells: return "NoFreeCells";
        case ErrorCode::AmbiguousDoor: return "AmbiguousDoor";
        case ErrorCode::DanglingDoor: return "DanglingDoor";
        case ErrorCode::OrphanPainting: return "OrphanPainting";
        case ErrorCode::NoExits: return "NoExits";
        case ErrorCode::OutOfBounds: return "OutOfBounds";
        case ErrorCode::DegenerateTarget: return "DegenerateTarget";
        case ErrorCode::NoGoalAvailable: return "NoGoalAvailable";
        case ErrorCode::NonFiniteForce: return "NonFiniteForce";
        case ErrorCode::SpawnFailure: return "SpawnFailure";
        case ErrorCode::FileNotFound: return "FileNotFound";
        case ErrorCode::SchemaError: return "SchemaError";
        case ErrorCode::FractionSumError: return "FractionSumError";
    }
    return "Unknown";
}

}  // namespace crowdsim
