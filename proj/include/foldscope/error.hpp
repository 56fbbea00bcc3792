#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace foldscope {

// Exit-code contract used by the CLI: 1 validation, 2 I/O, 3 numeric.
enum class ErrorKind { Validation = 1, Io = 2, Numeric = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }
    int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct DimensionError : Error {
    explicit DimensionError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct NumericError : Error {
    explicit NumericError(const std::string& what) : Error(ErrorKind::Numeric, what) {}
};

// Raised while loading a weight document; carries the offending layer when known.
class ModelError : public Error {
public:
    enum class Reason { Malformed, DimensionMismatch, NonFinite };

    ModelError(Reason reason, std::optional<std::size_t> layer, const std::string& detail)
        : Error(ErrorKind::Validation, format(reason, layer, detail)), reason_(reason), layer_(layer) {}

    Reason reason() const noexcept { return reason_; }
    std::optional<std::size_t> layer() const noexcept { return layer_; }

private:
    static std::string format(Reason reason, std::optional<std::size_t> layer, const std::string& detail) {
        std::string s;
        switch (reason) {
            case Reason::Malformed: s = "malformed model"; break;
            case Reason::DimensionMismatch: s = "dimension mismatch"; break;
            case Reason::NonFinite: s = "non-finite value"; break;
        }
        if (layer) s += " in layer " + std::to_string(*layer);
        return s + ": " + detail;
    }

    Reason reason_;
    std::optional<std::size_t> layer_;
};

}  // namespace foldscope
