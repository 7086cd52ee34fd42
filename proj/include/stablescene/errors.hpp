#pragma once

#include <stdexcept>
#include <string>

namespace stablescene {

enum class ValidationCode {
    ParseError,
    DuplicateId,
    MultipleParents,
    DanglingParent,
    Cycle,
    BadRelation,     // hanging/attached under a non-wall/ceiling chain
    MissingPose,
    MissingMesh,
    BadField,        // scale/mass/quaternion/other field invariant
};

inline const char* validation_code_name(ValidationCode c) {
    switch (c) {
        case ValidationCode::ParseError: return "parse_error";
        case ValidationCode::DuplicateId: return "duplicate_id";
        case ValidationCode::MultipleParents: return "multiple_parents";
        case ValidationCode::DanglingParent: return "dangling_parent";
        case ValidationCode::Cycle: return "cycle";
        case ValidationCode::BadRelation: return "bad_relation";
        case ValidationCode::MissingPose: return "missing_pose";
        case ValidationCode::MissingMesh: return "missing_mesh";
        case ValidationCode::BadField: return "bad_field";
    }
    return "unknown";
}

class ValidationError : public std::runtime_error {
public:
    ValidationError(ValidationCode code, std::string id, const std::string& what)
        : std::runtime_error(std::string(validation_code_name(code)) +
                             (id.empty() ? "" : " [" + id + "]") + ": " + what),
          code_(code),
          id_(std::move(id)) {}

    ValidationCode code() const { return code_; }
    const std::string& id() const { return id_; }

private:
    ValidationCode code_;
    std::string id_;
};

class DegenerateGeometry : public std::runtime_error {
public:
    explicit DegenerateGeometry(const std::string& what) : std::runtime_error(what) {}
};

class SimulationDiverged : public std::runtime_error {
public:
    SimulationDiverged(int step, std::string id)
        : std::runtime_error("simulation diverged at step " + std::to_string(step) + " on body '" +
                             id + "'"),
          step_(step),
          id_(std::move(id)) {}

    int step() const { return step_; }
    const std::string& id() const { return id_; }

private:
    int step_;
    std::string id_;
};

class OptimizationFailed : public std::runtime_error {
public:
    explicit OptimizationFailed(const std::string& what) : std::runtime_error(what) {}
};

class StageError : public std::runtime_error {
public:
    explicit StageError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace stablescene
