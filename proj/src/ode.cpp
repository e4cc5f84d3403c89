#include "qbsde/ode.hpp"

#include <cmath>
#include <limits>

#include "qbsde/errors.hpp"
#include "qbsde/quadrature.hpp"

namespace qbsde {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double default_cap(double a, double cap) { return cap > 0.0 ? cap : 1e8 * (1.0 + std::fabs(a)); }

struct BackwardPass {
    std::vector<double> values;           // per node, NaN past blow-up
    std::optional<std::size_t> blow_node; // first offending node in backward order
};

// Backward RK4 in the reversed time s = T - t with `substeps` stages per
// grid interval. Any domain exit, cap exceedance, non-finite stage or rhs
// exception marks the node being computed as the blow-up point.
BackwardPass backward_rk4(double a, const OdeRhs& rhs, const TimeGrid& grid,
                          const Domain& domain, double cap, std::size_t substeps) {
    const std::size_t M = grid.steps();
    BackwardPass out;
    out.values.assign(grid.nodes(), kNaN);
    out.values[M] = a;
    const double T = grid.horizon();
    auto f = [&](double s, double y) { return rhs(T - s, y); };
    double y = a;
    for (std::size_t k = 0; k < M; ++k) {
        const double s0 = T - grid.node(M - k);
        const double s1 = T - grid.node(M - k - 1);
        const double h = (s1 - s0) / static_cast<double>(substeps);
        bool bad = false;
        try {
            for (std::size_t j = 0; j < substeps && !bad; ++j) {
                const double s = s0 + h * static_cast<double>(j);
                const double k1 = f(s, y);
                const double y2 = y + 0.5 * h * k1;
                if (!domain.contains(y2)) { bad = true; break; }
                const double k2 = f(s + 0.5 * h, y2);
                const double y3 = y + 0.5 * h * k2;
                if (!domain.contains(y3)) { bad = true; break; }
                const double k3 = f(s + 0.5 * h, y3);
                const double y4 = y + h * k3;
                if (!domain.contains(y4)) { bad = true; break; }
                const double k4 = f(s + h, y4);
                y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                if (!std::isfinite(y) || !domain.contains(y) || std::fabs(y) > cap) bad = true;
            }
        } catch (const Error&) {
            bad = true;
        }
        const std::size_t node = M - k - 1;
        if (bad) {
            out.blow_node = node;
            return out;
        }
        out.values[node] = y;
    }
    return out;
}

} // namespace

EnvelopeSolution solve_backward_ode(double a, const OdeRhs& rhs, const TimeGrid& grid,
                                    const Domain& domain, double cap) {
    if (!domain.contains(a))
        throw InvalidParam("solve_backward_ode: terminal value outside the domain");
    cap = default_cap(a, cap);

    const BackwardPass full = backward_rk4(a, rhs, grid, domain, cap, 1);
    const BackwardPass half = backward_rk4(a, rhs, grid, domain, cap, 2);

    EnvelopeSolution sol{grid, {}, a, false, std::nullopt};
    sol.values.assign(grid.nodes(), kNaN);
    sol.values[grid.steps()] = a;

    if (full.blow_node || half.blow_node) {
        sol.blown_up = true;
        // first offending node in backward order = the larger time
        std::size_t node = 0;
        if (full.blow_node && half.blow_node)
            node = std::max(*full.blow_node, *half.blow_node);
        else
            node = full.blow_node ? *full.blow_node : *half.blow_node;
        sol.blowup_time = grid.node(node);
        for (std::size_t i = node + 1; i < grid.nodes(); ++i) sol.values[i] = half.values[i];
        return sol;
    }

    for (std::size_t i = 0; i < grid.steps(); ++i) {
        const double v = half.values[i] + (half.values[i] - full.values[i]) / 15.0;
        if (!std::isfinite(v) || !domain.contains(v) || std::fabs(v) > cap) {
            sol.blown_up = true;
            sol.blowup_time = grid.node(i);
            for (std::size_t j = i + 1; j < grid.nodes(); ++j) sol.values[j] = half.values[j];
            return sol;
        }
        sol.values[i] = v;
    }
    return sol;
}

EnvelopeSolution log_ode_solution(double b, const ScalarFn& u, const TimeGrid& grid) {
    if (!(b > 0.0 && b <= std::exp(-1.0)))
        throw InvalidParam("log_ode_solution: b must lie in (0, 1/e]");
    const auto cum = cumulative_integrals(u.fn, grid);
    const double total = cum.back();
    EnvelopeSolution sol{grid, {}, b, false, std::nullopt};
    sol.values.resize(grid.nodes());
    const double log_b = std::log(b);
    for (std::size_t i = 0; i < grid.nodes(); ++i) {
        const double tail = total - cum[i]; // int_{t_i}^T u
        sol.values[i] = std::exp(std::exp(tail) * log_b);
    }
    sol.values[grid.steps()] = b;
    return sol;
}

double small_time_threshold(double a, const OdeRhs& rhs, const Domain& domain,
                            double T_max, const TimeGrid& probe_grid, double cap) {
    if (!domain.contains(a))
        throw InvalidParam("small_time_threshold: terminal value outside the domain");
    if (!(T_max > 0.0)) throw InvalidParam("small_time_threshold: T_max must be positive");
    const std::size_t M = probe_grid.steps();
    auto survives = [&](double T) {
        TimeGrid g(T, M);
        return !solve_backward_ode(a, rhs, g, domain, cap).blown_up;
    };
    if (survives(T_max)) return T_max;
    double hi = T_max;
    double lo = 0.0;
    double probe = T_max;
    for (int k = 0; k < 60; ++k) {
        probe *= 0.5;
        if (survives(probe)) {
            lo = probe;
            break;
        }
        hi = probe;
    }
    if (lo == 0.0)
        throw NoExistence("small_time_threshold: blow-up persists down to T=" +
                          std::to_string(probe));
    for (int k = 0; k < 60 && hi - lo > 1e-4; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (survives(mid))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

EnvelopePair envelope_pair(const GeneratorSpec& spec, double terminal_lo,
                           double terminal_hi, const TimeGrid& grid) {
    if (!spec.envelope())
        throw InvalidParam("envelope_pair: generator carries no growth envelope");
    const GrowthEnvelope& env = *spec.envelope();
    env.validate();
    if (!(terminal_lo <= terminal_hi))
        throw InvalidParam("envelope_pair: terminal bounds out of order");

    const double c2 = std::max(terminal_hi, env.c);
    OdeRhs up = [&env](double t, double y) { return env.u(t) * env.l(y); };
    EnvelopePair pair{EnvelopeSolution{grid, {}, 0.0, false, std::nullopt},
                      solve_backward_ode(c2, up, grid, spec.domain())};

    if (spec.domain().is_real_line()) {
        const double b2 = std::min(terminal_lo, -env.c);
        OdeRhs down = [&env](double t, double y) { return -env.u(t) * env.l(y); };
        pair.lower = solve_backward_ode(b2, down, grid, spec.domain());
    } else if (spec.domain().is_positive()) {
        const double b3 = std::min(terminal_lo, env.b);
        pair.lower = log_ode_solution(b3, env.u, grid);
    } else {
        throw InvalidParam("envelope_pair: domain must be R or (0,inf)");
    }
    return pair;
}

} // namespace qbsde
