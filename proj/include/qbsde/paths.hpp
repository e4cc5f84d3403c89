#ifndef QBSDE_PATHS_HPP
#define QBSDE_PATHS_HPP

#include <cstdint>
#include <vector>

#include "qbsde/grid.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

/// Seeded Brownian increments on a uniform grid, N paths x M steps x d dims.
/// Each increment is a pure function of (seed, path, step, dim), so
/// regenerating with the same key is bit-identical and dropping or adding
/// paths never disturbs the others.
class PathBundle {
public:
    PathBundle(std::uint64_t seed, std::size_t n_paths, const TimeGrid& grid,
               std::size_t dim);

    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t n_paths() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    const TimeGrid& grid() const noexcept { return grid_; }

    double increment(std::size_t path, std::size_t step, std::size_t k = 0) const {
        return inc_[(path * grid_.steps() + step) * d_ + k];
    }

    /// Brownian value B_{t_i} (component k) = sum of increments before node i.
    double state(std::size_t path, std::size_t node, std::size_t k = 0) const {
        return cum_[(path * grid_.nodes() + node) * d_ + k];
    }

    const std::vector<double>& increments() const noexcept { return inc_; }

private:
    std::uint64_t seed_;
    std::size_t n_;
    std::size_t d_;
    TimeGrid grid_;
    std::vector<double> inc_;
    std::vector<double> cum_;
};

inline PathBundle generate_paths(std::uint64_t seed, std::size_t n_paths,
                                 const TimeGrid& grid, std::size_t dim = 1) {
    return PathBundle(seed, n_paths, grid, dim);
}

} // namespace qbsde

#endif
