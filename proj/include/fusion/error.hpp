#pragma once

#include <stdexcept>
#include <string>

namespace fusion {

/// Malformed or inconsistent input files (CLI exit code 2).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs were well-formed but the requested computation is undefined (CLI exit code 3).
class ComputeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// AUROC requested for a label column that holds only one class.
class UndefinedAuroc : public ComputeError {
public:
    explicit UndefinedAuroc(int present_class)
        : ComputeError("AUROC undefined: only class " + std::to_string(present_class) + " present"),
          present_class_(present_class) {}

    int present_class() const noexcept { return present_class_; }

private:
    int present_class_;
};

inline constexpr int kExitInputError = 2;
inline constexpr int kExitComputeError = 3;

} // namespace fusion
