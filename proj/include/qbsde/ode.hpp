#ifndef QBSDE_ODE_HPP
#define QBSDE_ODE_HPP

#include <functional>
#include <optional>
#include <vector>

#include "qbsde/domain.hpp"
#include "qbsde/generator.hpp"
#include "qbsde/grid.hpp"

namespace qbsde {

/// Deterministic backward-ODE bound phi(t) on the grid. When the integration
/// leaves the domain or exceeds the cap before reaching t = 0, blown_up is
/// set, blowup_time records the first offending node and values beyond it
/// are NaN.
struct EnvelopeSolution {
    TimeGrid grid;
    std::vector<double> values; // one per node; values[M] == terminal
    double terminal = 0.0;
    bool blown_up = false;
    std::optional<double> blowup_time;

    double at(std::size_t i) const { return values[i]; }
};

using OdeRhs = std::function<double(double t, double y)>;

/// Solves phi(t) = a + int_t^T rhs(s, phi(s)) ds backward from T with fixed-
/// step classical RK4 plus one Richardson half-step refinement. The cap and
/// the domain are both blow-up triggers.
EnvelopeSolution solve_backward_ode(double a, const OdeRhs& rhs, const TimeGrid& grid,
                                    const Domain& domain, double cap = -1.0);

/// psi_b(t) = b^{exp(int_t^T u ds)}, the closed-form solution of
/// psi(t) = b + int_t^T u psi ln psi ds for 0 < b <= 1/e.
EnvelopeSolution log_ode_solution(double b, const ScalarFn& u, const TimeGrid& grid);

/// Largest T <= T_max for which the backward ODE from terminal a survives on
/// [0, T], located by bisection to 1e-4 absolute. Throws NoExistence when
/// even the smallest probed horizon blows up.
double small_time_threshold(double a, const OdeRhs& rhs, const Domain& domain,
                            double T_max, const TimeGrid& probe_grid, double cap = -1.0);

/// Lower/upper deterministic envelopes for a generator with a declared
/// growth envelope, per the terminal bounds [b1, c1]:
///   upper: terminal c2 = max(c1, c), rhs u(t) l(y)
///   lower (D = R): terminal b2 = min(b1, -c), rhs -u(t) l(y)
///   lower (D = (0,inf)): the log-ODE bound with b3 = min(b1, b)
struct EnvelopePair {
    EnvelopeSolution lower;
    EnvelopeSolution upper;
};

EnvelopePair envelope_pair(const GeneratorSpec& spec, double terminal_lo,
                           double terminal_hi, const TimeGrid& grid);

} // namespace qbsde

#endif
