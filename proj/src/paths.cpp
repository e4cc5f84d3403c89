#include "qbsde/paths.hpp"

#include <cmath>

#include "qbsde/errors.hpp"

namespace qbsde {

PathBundle::PathBundle(std::uint64_t seed, std::size_t n_paths, const TimeGrid& grid,
                       std::size_t dim)
    : seed_(seed), n_(n_paths), d_(dim), grid_(grid) {
    if (n_paths == 0) throw InvalidParam("PathBundle: need at least one path");
    if (dim == 0) throw InvalidParam("PathBundle: dimension must be at least 1");
    const std::size_t M = grid_.steps();
    const double sqrt_dt = std::sqrt(grid_.dt());
    inc_.resize(n_ * M * d_);
    cum_.resize(n_ * grid_.nodes() * d_, 0.0);
    for (std::size_t p = 0; p < n_; ++p) {
        for (std::size_t i = 0; i < M; ++i) {
            for (std::size_t k = 0; k < d_; ++k) {
                const std::uint64_t bits =
                    counter_hash(seed_, p, i, k);
                const double g = inv_normal_cdf(uniform_open01(bits));
                inc_[(p * M + i) * d_ + k] = sqrt_dt * g;
                cum_[(p * grid_.nodes() + i + 1) * d_ + k] =
                    cum_[(p * grid_.nodes() + i) * d_ + k] + sqrt_dt * g;
            }
        }
    }
}

} // namespace qbsde
