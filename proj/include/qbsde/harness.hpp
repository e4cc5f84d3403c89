#ifndef QBSDE_HARNESS_HPP
#define QBSDE_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "qbsde/bsde.hpp"
#include "qbsde/checks.hpp"
#include "qbsde/ode.hpp"
#include "qbsde/rbsde.hpp"
#include "qbsde/transforms.hpp"

namespace qbsde {

/// PASS iff lower(t_i) - tol <= Y[p][i] <= upper(t_i) + tol for every path
/// and node, with tol = 1e-6 + 3 * stepwise stderr of the Y mean.
CheckReport bracketing_check(const SolutionProcess& sol, const EnvelopeSolution& lower,
                             const EnvelopeSolution& upper);

enum class DominanceRelation {
    GeneratorDominates,
    TerminalDominates,
    ObstacleDominates,
    Combined,
};

DominanceRelation dominance_relation_from_string(const std::string& s);

/// Inputs needed to spot-check a declared dominance hypothesis.
struct ComparisonHypothesis {
    DominanceRelation relation = DominanceRelation::TerminalDominates;
    const GeneratorSpec* gen_a = nullptr;
    const GeneratorSpec* gen_b = nullptr;
    const TerminalCondition* xi_a = nullptr;
    const TerminalCondition* xi_b = nullptr;
    const Obstacle* obstacle_a = nullptr;
    const Obstacle* obstacle_b = nullptr;
};

/// Stepwise mean ordering with a 3-stderr allowance plus a 1% pathwise
/// violation budget. Throws HypothesisUnmet when the declared relation fails
/// its sampled spot-check.
CheckReport comparison_suite(const SolutionProcess& sol_a, const SolutionProcess& sol_b,
                             const ComparisonHypothesis& hyp, const PathBundle& paths);

struct UniquenessOptions {
    std::vector<int> picard_variants{1, 3, 8};
    std::vector<int> degree_variants{2, 3};
    std::size_t n_paths = 20000;
    std::uint64_t seed = 1;
};

/// Solves the same problem under solver-config variants and on the doubled
/// grid; PASS iff all Y_0 estimates agree within 3 stderr plus a C*dt
/// allowance with C fitted from the two grids. Divergence propagates.
CheckReport uniqueness_probe(const GeneratorSpec& spec, const TerminalCondition& xi,
                             const TimeGrid& grid, const UniquenessOptions& opt,
                             const SolverConfig& base);

/// Convex-combination gap check along two ordered solutions: for each theta
/// and each path-step whose theta-difference point stays in the domain,
/// g(t,yA,zA) - theta g(t,yB,zB) - (1-theta) g(t, dy, dz) <= tol_convex.
CheckReport theta_domination_suite(const GeneratorSpec& spec, const SolutionProcess& sol_a,
                                   const SolutionProcess& sol_b,
                                   const std::vector<double>& thetas);

/// Empirical moments E[sup_i |u(q Lambda_{t_i}(Y_i))|^p] with bootstrap
/// confidence intervals; diagnostic only.
CheckReport integrability_report(const SolutionProcess& sol, const UPhiTransform& transform,
                                 const LambdaWeight& weight, const std::vector<double>& q_list,
                                 double p);

} // namespace qbsde

#endif
