#ifndef QBSDE_QUADRATURE_HPP
#define QBSDE_QUADRATURE_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "qbsde/grid.hpp"

namespace qbsde {

using Real1DFn = std::function<double(double)>;

/// Composite Simpson rule with a fixed panel count (panels is rounded up to
/// an even number). Deterministic; used for all time integrals so that the
/// same weights appear on both sides of every transform identity.
double simpson(const Real1DFn& f, double a, double b, std::size_t panels = 64);

/// Adaptive Simpson with an evaluation budget. Throws QuadratureFailure when
/// refinement would exceed the budget before meeting the tolerance.
double adaptive_simpson(const Real1DFn& f, double a, double b, double rel_tol,
                        double abs_tol, std::size_t max_evals = 100000);

/// Cumulative integrals I[i] = int_0^{t_i} f(s) ds over the grid nodes,
/// accumulated per step so adjacent nodes are consistent.
std::vector<double> cumulative_integrals(const Real1DFn& f, const TimeGrid& grid,
                                         std::size_t panels_per_step = 8);

} // namespace qbsde

#endif
