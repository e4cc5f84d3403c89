#ifndef QBSDE_SOLUTION_HPP
#define QBSDE_SOLUTION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "qbsde/errors.hpp"
#include "qbsde/grid.hpp"

namespace qbsde {

/// Terminal condition xi: either a deterministic constant or a scalar
/// function of the terminal Brownian value B_T (d = 1).
struct TerminalCondition {
    enum class Kind { DeterministicConstant, FunctionOfBT };

    Kind kind = Kind::DeterministicConstant;
    double constant = 0.0;
    std::function<double(double)> of_bt; // used when kind == FunctionOfBT
    std::string desc = "const(0)";

    static TerminalCondition constant_value(double v) {
        TerminalCondition tc;
        tc.kind = Kind::DeterministicConstant;
        tc.constant = v;
        tc.desc = "const(" + std::to_string(v) + ")";
        return tc;
    }
    static TerminalCondition function_of_bt(std::function<double(double)> f, std::string desc) {
        TerminalCondition tc;
        tc.kind = Kind::FunctionOfBT;
        tc.of_bt = std::move(f);
        tc.desc = std::move(desc);
        return tc;
    }

    bool deterministic() const noexcept { return kind == Kind::DeterministicConstant; }
};

/// Polynomial regression basis for least-squares conditional expectations.
struct RegressionBasis {
    enum class Kind { PolynomialInState, PolynomialInBrownian };
    Kind kind = Kind::PolynomialInState;
    int degree = 3;
};

/// Solver knobs. picard_iters = 0 selects the explicit scheme.
struct SolverConfig {
    int picard_iters = 3;
    double z_clip = 50.0;          // cap on |Z| per component; <= 0 disables
    double domain_floor = -1.0;    // epsilon for singular domains; < 0 => auto
    RegressionBasis basis{};
    bool center_z_regression = true; // subtract fitted E[Y|state] before the Z projection
};

struct SolverMeta {
    std::uint64_t seed = 0;
    int picard_iters = 0;
    std::int64_t z_clip_events = 0;
    std::int64_t projection_clip_events = 0;
    std::int64_t degree_fallbacks = 0;
    bool deterministic_path = false;
    double y0_mean = 0.0;
    double y0_stderr = 0.0;
};

/// Discrete (Y, Z[, K]) triple on the grid, one row per path.
/// Y has grid.nodes() entries per path; Z has grid.steps()*dim entries per
/// path (left endpoints); K, when present, is cumulative with K[.][0] = 0.
class SolutionProcess {
public:
    SolutionProcess(const TimeGrid& grid, std::size_t n_paths, std::size_t dim,
                    bool with_k = false)
        : grid_(grid), n_paths_(n_paths), dim_(dim),
          Y_(n_paths * grid.nodes(), 0.0),
          Z_(n_paths * grid.steps() * dim, 0.0),
          K_(with_k ? n_paths * grid.nodes() : 0, 0.0) {}

    const TimeGrid& grid() const noexcept { return grid_; }
    std::size_t n_paths() const noexcept { return n_paths_; }
    std::size_t dim() const noexcept { return dim_; }
    bool has_k() const noexcept { return !K_.empty(); }

    double& y(std::size_t p, std::size_t i) { return Y_[p * grid_.nodes() + i]; }
    double y(std::size_t p, std::size_t i) const { return Y_[p * grid_.nodes() + i]; }

    double& z(std::size_t p, std::size_t i, std::size_t k = 0) {
        return Z_[(p * grid_.steps() + i) * dim_ + k];
    }
    double z(std::size_t p, std::size_t i, std::size_t k = 0) const {
        return Z_[(p * grid_.steps() + i) * dim_ + k];
    }

    double& k_at(std::size_t p, std::size_t i) { return K_[p * grid_.nodes() + i]; }
    double k_at(std::size_t p, std::size_t i) const { return K_[p * grid_.nodes() + i]; }

    const std::vector<double>& y_data() const noexcept { return Y_; }
    const std::vector<double>& z_data() const noexcept { return Z_; }
    const std::vector<double>& k_data() const noexcept { return K_; }

    SolverMeta meta;

private:
    TimeGrid grid_;
    std::size_t n_paths_;
    std::size_t dim_;
    std::vector<double> Y_;
    std::vector<double> Z_;
    std::vector<double> K_;
};

inline void require_same_grid(const SolutionProcess& a, const SolutionProcess& b,
                              const char* where) {
    if (a.grid() != b.grid() || a.n_paths() != b.n_paths() || a.dim() != b.dim())
        throw GridMismatch(std::string(where) + ": solutions live on different grids or bundles");
}

} // namespace qbsde

#endif
