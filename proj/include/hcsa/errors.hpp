#pragma once

#include <stdexcept>
#include <string>

namespace hcsa {

// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape / dimension violations.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& msg) : Error(msg) {}
};

// Invalid user-supplied inputs (token ids, sequence lengths, missing files).
class InputError : public Error {
public:
    explicit InputError(const std::string& msg) : Error(msg) {}
};

// Invalid configuration values or malformed config documents.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Problems with on-disk artifacts. The kind distinguishes corrupt headers,
// version mismatches, truncation and shape inconsistencies.
class DataError : public Error {
public:
    enum class Kind {
        corrupt_header,
        version_mismatch,
        shape_mismatch,
        truncated,
        corrupt_manifest,
    };

    DataError(Kind kind, const std::string& msg) : Error(msg), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int input = 2;    // missing/corrupt inputs
inline constexpr int config = 3;   // malformed config or flags
inline constexpr int runtime = 4;  // numeric/internal failures
}  // namespace exit_code

}  // namespace hcsa
