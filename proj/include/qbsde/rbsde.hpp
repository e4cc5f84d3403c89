#ifndef QBSDE_RBSDE_HPP
#define QBSDE_RBSDE_HPP

#include <functional>
#include <string>

#include "qbsde/bsde.hpp"
#include "qbsde/checks.hpp"

namespace qbsde {

/// Lower obstacle L(t, B_t). Deterministic obstacles ignore the state
/// argument; state-dependent ones disable the deterministic solver branch.
struct Obstacle {
    std::function<double(double t, double b)> level;
    bool time_only = true;
    std::string desc;

    double at(double t, double b) const { return level(t, b); }

    static Obstacle constant(double v) {
        return Obstacle{[v](double, double) { return v; }, true,
                        "const(" + std::to_string(v) + ")"};
    }
    static Obstacle of_time(std::function<double(double)> f, std::string desc) {
        return Obstacle{[f = std::move(f)](double t, double) { return f(t); }, true,
                        std::move(desc)};
    }
    static Obstacle of_time_state(std::function<double(double, double)> f, std::string desc) {
        return Obstacle{std::move(f), false, std::move(desc)};
    }
};

/// Reflected solver: the unreflected candidate of each backward step is
/// projected onto the obstacle, the projection gap accumulating into the
/// nondecreasing process K (K[.][0] = 0, increment of step i stored between
/// nodes i and i+1). Throws ObstacleIncompatible when xi < L_T on any path.
SolutionProcess solve_rbsde(const GeneratorSpec& spec, const TerminalCondition& xi,
                            const Obstacle& obstacle, const TimeGrid& grid,
                            const PathBundle& paths, const SolverConfig& cfg);

/// max over paths of sum_i (Y_i - L_i) dK_i; zero at machine precision for
/// solver output since dK only accumulates where Y sits on the obstacle.
double skorokhod_residual(const SolutionProcess& sol, const Obstacle& obstacle,
                          const PathBundle& paths);

/// Discrete form of the K-comparison inequality: for the dominating solution
/// A and dominated B, sum_{i in [r,t)} 1{Y^B_i >= L^A_i} dK^A_i must not
/// exceed the same sum over dK^B_i beyond tol_K, over every grid subinterval.
CheckReport k_comparison_check(const SolutionProcess& solA, const SolutionProcess& solB,
                               const Obstacle& obstacleA, const PathBundle& paths);

} // namespace qbsde

#endif
