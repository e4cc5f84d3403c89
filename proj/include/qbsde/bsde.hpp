#ifndef QBSDE_BSDE_HPP
#define QBSDE_BSDE_HPP

#include <vector>

#include "qbsde/generator.hpp"
#include "qbsde/paths.hpp"
#include "qbsde/solution.hpp"

namespace qbsde {

/// Regression Monte Carlo backward-Euler solver for BSDE(g, xi).
/// Deterministic scenarios (constant xi, z-independent g) bypass the
/// regression machinery and integrate the associated backward ODE instead.
/// Throws Divergence when |Y| exceeds 1e10 or a deterministic run exits the
/// domain.
SolutionProcess solve_bsde(const GeneratorSpec& spec, const TerminalCondition& xi,
                           const TimeGrid& grid, const PathBundle& paths,
                           const SolverConfig& cfg);

/// Pointwise (Y^A - theta Y^B)/(1 - theta) with a per-path-step domain flag.
struct ThetaDifference {
    std::size_t n_paths = 0;
    std::size_t nodes = 0;
    std::vector<double> values;  // path-major, node-minor
    std::vector<char> in_domain; // same layout
    bool all_in_domain = true;

    double at(std::size_t p, std::size_t i) const { return values[p * nodes + i]; }
    bool flag(std::size_t p, std::size_t i) const { return in_domain[p * nodes + i] != 0; }
};

ThetaDifference theta_difference_process(const SolutionProcess& a, const SolutionProcess& b,
                                         double theta, const Domain& domain);

/// Drift-consistency residual: max over steps of
/// |mean(Y_i) - mean(Y_{i+1}) - mean(g(t_i, Y_i, Z_i)) dt|.
double picard_residual(const SolutionProcess& sol, const GeneratorSpec& spec);

} // namespace qbsde

#endif
