#ifndef QBSDE_GRID_HPP
#define QBSDE_GRID_HPP

#include <cstddef>
#include <vector>

#include "qbsde/errors.hpp"

namespace qbsde {

/// Uniform time grid t_i = i*T/M on [0,T].
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t steps) : T_(horizon), M_(steps) {
        if (!(horizon > 0.0))
            throw InvalidParam("TimeGrid: horizon must be positive");
        if (steps == 0)
            throw InvalidParam("TimeGrid: step count must be at least 1");
    }

    double horizon() const noexcept { return T_; }
    std::size_t steps() const noexcept { return M_; }
    std::size_t nodes() const noexcept { return M_ + 1; }
    double dt() const noexcept { return T_ / static_cast<double>(M_); }
    double node(std::size_t i) const noexcept {
        return i == M_ ? T_ : static_cast<double>(i) * T_ / static_cast<double>(M_);
    }

    std::vector<double> node_values() const {
        std::vector<double> out(nodes());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
        return out;
    }

    bool operator==(const TimeGrid& o) const noexcept { return T_ == o.T_ && M_ == o.M_; }
    bool operator!=(const TimeGrid& o) const noexcept { return !(*this == o); }

private:
    double T_;
    std::size_t M_;
};

} // namespace qbsde

#endif
