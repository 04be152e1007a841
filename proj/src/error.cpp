// SPDX-License-Identifier: Apache-2.0
#include "synergy/error.hpp"

namespace synergy {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::UnknownCode: return "UnknownCode";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::UnknownEnum: return "UnknownEnum";
    case ErrorKind::DuplicateGroup: return "DuplicateGroup";
    case ErrorKind::UnknownGroup: return "UnknownGroup";
    case ErrorKind::MissingCode: return "MissingCode";
    case ErrorKind::Io: return "Io";
    case ErrorKind::EmptyMessage: return "EmptyMessage";
    case ErrorKind::Unparseable: return "Unparseable";
    case ErrorKind::TransportError: return "TransportError";
    case ErrorKind::Credential: return "Credential";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::EmptyMatrix: return "EmptyMatrix";
    case ErrorKind::BadK: return "BadK";
    case ErrorKind::EmptyPanel: return "EmptyPanel";
    case ErrorKind::InsufficientObservations: return "InsufficientObservations";
    case ErrorKind::MissingWeight: return "MissingWeight";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::SampleTooSmall: return "SampleTooSmall";
    case ErrorKind::SampleTooLarge: return "SampleTooLarge";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::TooFewGroups: return "TooFewGroups";
    case ErrorKind::GroupTooSmall: return "GroupTooSmall";
    case ErrorKind::TooFewObservations: return "TooFewObservations";
    case ErrorKind::ZeroWithinVariance: return "ZeroWithinVariance";
    case ErrorKind::BothZeroVariance: return "BothZeroVariance";
    case ErrorKind::EmptyGroup: return "EmptyGroup";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Config: return "Config";
    }
    return "Unknown";
}

} // namespace synergy
