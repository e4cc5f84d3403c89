#ifndef QBSDE_DOMAIN_HPP
#define QBSDE_DOMAIN_HPP

#include <limits>
#include <string>

#include "qbsde/errors.hpp"

namespace qbsde {

/// Open interval D in which the state variable y lives. The whole real line
/// and the positive half line are the common cases; arbitrary open intervals
/// are supported for the small-time existence scenarios.
class Domain {
public:
    enum class Kind { RealLine, PositiveHalfLine, OpenInterval };

    static Domain real_line() {
        return Domain(Kind::RealLine, -inf(), inf());
    }
    static Domain positive_half_line() {
        return Domain(Kind::PositiveHalfLine, 0.0, inf());
    }
    static Domain open_interval(double lower, double upper) {
        if (!(lower < upper))
            throw InvalidParam("Domain: lower bound must be strictly below upper bound");
        return Domain(Kind::OpenInterval, lower, upper);
    }

    Kind kind() const noexcept { return kind_; }
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

    bool contains(double y) const noexcept { return y > lower_ && y < upper_; }
    bool is_real_line() const noexcept { return kind_ == Kind::RealLine; }
    bool is_positive() const noexcept { return lower_ == 0.0 && upper_ == inf(); }
    bool bounded_below() const noexcept { return lower_ > -inf(); }
    bool bounded_above() const noexcept { return upper_ < inf(); }

    std::string describe() const {
        switch (kind_) {
        case Kind::RealLine: return "R";
        case Kind::PositiveHalfLine: return "(0,inf)";
        default:
            return "(" + std::to_string(lower_) + "," + std::to_string(upper_) + ")";
        }
    }

    void require(double y, const char* where) const {
        if (!contains(y))
            throw DomainViolation(std::string(where) + ": y=" + std::to_string(y) +
                                  " outside domain " + describe());
    }

    bool operator==(const Domain& o) const noexcept {
        return lower_ == o.lower_ && upper_ == o.upper_;
    }

private:
    Domain(Kind k, double lo, double hi) : kind_(k), lower_(lo), upper_(hi) {}
    static constexpr double inf() { return std::numeric_limits<double>::infinity(); }

    Kind kind_;
    double lower_;
    double upper_;
};

} // namespace qbsde

#endif
