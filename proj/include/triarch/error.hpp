#pragma once
// Error model shared by all modules: a single exception type carrying a
// machine-readable kind plus an optional 1-based data row.

#include <stdexcept>
#include <string>

namespace triarch {

enum class ErrorKind {
    // graph construction
    DuplicateNodeId,
    DanglingEdge,
    SelfLoop,
    // ingest
    MissingHeader,
    BadStance,
    BadCoordinate,
    DuplicateId,
    BadTimestamp,
    BadRow,
    MissingTopic,
    // analytics
    LabelClash,
    UndefinedMatrix,
    EmptyMix,
    DegenerateMarginal,
    // numerics / simulation
    NumericalBlowup,
    StepNotRecorded,
    // cli
    BadArgs,
    Io,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DuplicateNodeId:    return "DuplicateNodeId";
        case ErrorKind::DanglingEdge:       return "DanglingEdge";
        case ErrorKind::SelfLoop:           return "SelfLoop";
        case ErrorKind::MissingHeader:      return "MissingHeader";
        case ErrorKind::BadStance:          return "BadStance";
        case ErrorKind::BadCoordinate:      return "BadCoordinate";
        case ErrorKind::DuplicateId:        return "DuplicateId";
        case ErrorKind::BadTimestamp:       return "BadTimestamp";
        case ErrorKind::BadRow:             return "BadRow";
        case ErrorKind::MissingTopic:       return "MissingTopic";
        case ErrorKind::LabelClash:         return "LabelClash";
        case ErrorKind::UndefinedMatrix:    return "UndefinedMatrix";
        case ErrorKind::EmptyMix:           return "EmptyMix";
        case ErrorKind::DegenerateMarginal: return "DegenerateMarginal";
        case ErrorKind::NumericalBlowup:    return "NumericalBlowup";
        case ErrorKind::StepNotRecorded:    return "StepNotRecorded";
        case ErrorKind::BadArgs:            return "BadArgs";
        case ErrorKind::Io:                 return "Io";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, long row = -1)
        : std::runtime_error(row >= 0 ? std::string(to_string(kind)) + " (row " +
                                            std::to_string(row) + "): " + message
                                      : std::string(to_string(kind)) + ": " + message),
          kind_(kind),
          row_(row) {}

    ErrorKind kind() const noexcept { return kind_; }
    long row() const noexcept { return row_; }

private:
    ErrorKind kind_;
    long row_;
};

}  // namespace triarch
