#ifndef QBSDE_ERRORS_HPP
#define QBSDE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qbsde {

// Error taxonomy shared by all modules. The CLI maps these onto exit codes.
enum class ErrorCode {
    DomainViolation,
    NonFinite,
    InvalidParam,
    QuadratureFailure,
    OutOfRange,
    GridMismatch,
    Divergence,
    ObstacleIncompatible,
    HypothesisUnmet,
    NoExistence,
    FileFormat,
    ConfigInvalid,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

struct DomainViolation : Error {
    explicit DomainViolation(const std::string& w) : Error(ErrorCode::DomainViolation, w) {}
};
struct NonFinite : Error {
    explicit NonFinite(const std::string& w) : Error(ErrorCode::NonFinite, w) {}
};
struct InvalidParam : Error {
    explicit InvalidParam(const std::string& w) : Error(ErrorCode::InvalidParam, w) {}
};
struct QuadratureFailure : Error {
    explicit QuadratureFailure(const std::string& w) : Error(ErrorCode::QuadratureFailure, w) {}
};
struct OutOfRange : Error {
    explicit OutOfRange(const std::string& w) : Error(ErrorCode::OutOfRange, w) {}
};
struct GridMismatch : Error {
    explicit GridMismatch(const std::string& w) : Error(ErrorCode::GridMismatch, w) {}
};
struct Divergence : Error {
    explicit Divergence(const std::string& w) : Error(ErrorCode::Divergence, w) {}
};
struct ObstacleIncompatible : Error {
    explicit ObstacleIncompatible(const std::string& w) : Error(ErrorCode::ObstacleIncompatible, w) {}
};
struct HypothesisUnmet : Error {
    explicit HypothesisUnmet(const std::string& w) : Error(ErrorCode::HypothesisUnmet, w) {}
};
struct NoExistence : Error {
    explicit NoExistence(const std::string& w) : Error(ErrorCode::NoExistence, w) {}
};
struct FileFormat : Error {
    explicit FileFormat(const std::string& w) : Error(ErrorCode::FileFormat, w) {}
};
struct ConfigInvalid : Error {
    explicit ConfigInvalid(const std::string& w) : Error(ErrorCode::ConfigInvalid, w) {}
};

} // namespace qbsde

#endif
