#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qbsde/bsde.hpp"
#include "qbsde/errors.hpp"
#include "qbsde/rbsde.hpp"
#include "qbsde/regression.hpp"

namespace qbsde {

namespace {

constexpr double kDivergenceCap = 1e10;

double domain_floor_eps(const SolverConfig& cfg, double terminal_scale) {
    return cfg.domain_floor > 0.0 ? cfg.domain_floor : 1e-6 * (1.0 + terminal_scale);
}

double project_into(const Domain& d, double eps, double y, std::int64_t& counter) {
    if (d.is_real_line()) return y;
    double v = y;
    if (d.bounded_below()) v = std::max(v, d.lower() + eps);
    if (d.bounded_above()) v = std::min(v, d.upper() - eps);
    if (v != y) ++counter;
    return v;
}

std::vector<double> terminal_values(const GeneratorSpec& spec, const TerminalCondition& xi,
                                    const PathBundle& paths) {
    std::vector<double> out(paths.n_paths());
    if (xi.deterministic()) {
        if (!spec.domain().contains(xi.constant))
            throw DomainViolation("solve: terminal value outside the domain");
        std::fill(out.begin(), out.end(), xi.constant);
        return out;
    }
    if (paths.dim() != 1)
        throw InvalidParam("solve: terminal conditions of B_T require d = 1");
    const std::size_t M = paths.grid().steps();
    for (std::size_t p = 0; p < paths.n_paths(); ++p) {
        out[p] = xi.of_bt(paths.state(p, M, 0));
        if (!spec.domain().contains(out[p]))
            throw DomainViolation("solve: terminal value outside the domain on path " +
                                  std::to_string(p));
    }
    return out;
}

// One backward interval of the deterministic reduction, RK4 with the given
// substep count; NaN signals a domain exit or overflow.
double rk4_interval(const GeneratorSpec& spec, std::span<const double> z0, double y,
                    double t_hi, double t_lo, std::size_t substeps, double cap) {
    const double len = t_hi - t_lo;
    const double h = len / static_cast<double>(substeps);
    const Domain& dom = spec.domain();
    auto f = [&](double s, double yy) { return spec.raw(t_hi - s, yy, z0); };
    for (std::size_t j = 0; j < substeps; ++j) {
        const double s = h * static_cast<double>(j);
        const double k1 = f(s, y);
        const double y2 = y + 0.5 * h * k1;
        if (!dom.contains(y2)) return std::numeric_limits<double>::quiet_NaN();
        const double k2 = f(s + 0.5 * h, y2);
        const double y3 = y + 0.5 * h * k2;
        if (!dom.contains(y3)) return std::numeric_limits<double>::quiet_NaN();
        const double k3 = f(s + 0.5 * h, y3);
        const double y4 = y + h * k3;
        if (!dom.contains(y4)) return std::numeric_limits<double>::quiet_NaN();
        const double k4 = f(s + h, y4);
        y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!std::isfinite(y) || !dom.contains(y) || std::fabs(y) > cap)
            return std::numeric_limits<double>::quiet_NaN();
    }
    return y;
}

SolutionProcess solve_deterministic(const GeneratorSpec& spec, double xi_const,
                                    const TimeGrid& grid, const PathBundle& paths,
                                    const SolverConfig& cfg, const Obstacle* obstacle) {
    const std::size_t M = grid.steps();
    SolutionProcess sol(grid, paths.n_paths(), paths.dim(), obstacle != nullptr);
    sol.meta.deterministic_path = true;
    sol.meta.seed = paths.seed();
    sol.meta.picard_iters = cfg.picard_iters;
    const double eps = domain_floor_eps(cfg, std::fabs(xi_const));
    const std::vector<double> z0(paths.dim(), 0.0);

    if (obstacle && xi_const < obstacle->at(grid.horizon(), 0.0))
        throw ObstacleIncompatible("solve_rbsde: terminal value below the obstacle at T");

    std::vector<double> vals(grid.nodes());
    std::vector<double> dk(M, 0.0);
    vals[M] = xi_const;
    double y = xi_const;
    for (std::size_t step = 0; step < M; ++step) {
        const std::size_t i = M - 1 - step;
        const double t_hi = grid.node(i + 1);
        const double t_lo = grid.node(i);
        double y_full, y_half;
        try {
            y_full = rk4_interval(spec, z0, y, t_hi, t_lo, 1, kDivergenceCap);
            y_half = rk4_interval(spec, z0, y, t_hi, t_lo, 2, kDivergenceCap);
        } catch (const Error& e) {
            throw Divergence("deterministic solve: generator failure near t=" +
                             std::to_string(t_lo) + " (" + e.what() + ")");
        }
        double cand = y_half + (y_half - y_full) / 15.0;
        if (!std::isfinite(cand) || !spec.domain().contains(cand) ||
            std::fabs(cand) > kDivergenceCap)
            throw Divergence("deterministic solve: domain exit or blow-up at t=" +
                             std::to_string(t_lo));
        cand = project_into(spec.domain(), eps, cand, sol.meta.projection_clip_events);
        if (obstacle) {
            const double L = obstacle->at(t_lo, 0.0);
            const double reflected = std::max(cand, L);
            dk[i] = reflected - cand;
            cand = reflected;
        }
        vals[i] = cand;
        y = cand;
    }

    for (std::size_t p = 0; p < sol.n_paths(); ++p) {
        for (std::size_t i = 0; i <= M; ++i) sol.y(p, i) = vals[i];
        if (obstacle) {
            sol.k_at(p, 0) = 0.0;
            for (std::size_t i = 0; i < M; ++i)
                sol.k_at(p, i + 1) = sol.k_at(p, i) + dk[i];
        }
    }
    sol.meta.y0_mean = vals[0];
    sol.meta.y0_stderr = 0.0;
    return sol;
}

SolutionProcess solve_stochastic(const GeneratorSpec& spec, const std::vector<double>& xi,
                                 const TimeGrid& grid, const PathBundle& paths,
                                 const SolverConfig& cfg, const Obstacle* obstacle) {
    const std::size_t M = grid.steps();
    const std::size_t N = paths.n_paths();
    const std::size_t d = paths.dim();
    const double dt = grid.dt();
    SolutionProcess sol(grid, N, d, obstacle != nullptr);
    sol.meta.seed = paths.seed();
    sol.meta.picard_iters = cfg.picard_iters;

    double terminal_scale = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
        sol.y(p, M) = xi[p];
        terminal_scale = std::max(terminal_scale, std::fabs(xi[p]));
        if (obstacle && xi[p] < obstacle->at(grid.horizon(), paths.state(p, M, 0)))
            throw ObstacleIncompatible("solve_rbsde: terminal value below the obstacle on path " +
                                       std::to_string(p));
    }
    const double eps = domain_floor_eps(cfg, terminal_scale);
    const int sweeps = std::max(1, cfg.picard_iters);

    std::vector<double> state(N), ynext(N), target(N);
    for (std::size_t step = 0; step < M; ++step) {
        const std::size_t i = M - 1 - step;
        const double t = grid.node(i);
        for (std::size_t p = 0; p < N; ++p) {
            state[p] = paths.state(p, i, 0);
            ynext[p] = sol.y(p, i + 1);
        }
        RegressionResult fitE = conditional_expectation(ynext, state, cfg.basis);
        if (fitE.rank_reduced) ++sol.meta.degree_fallbacks;
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t p = 0; p < N; ++p) {
                const double centered =
                    cfg.center_z_regression ? ynext[p] - fitE.fitted[p] : ynext[p];
                target[p] = centered * paths.increment(p, i, k) / dt;
            }
            RegressionResult fitZ = conditional_expectation(target, state, cfg.basis);
            if (fitZ.rank_reduced) ++sol.meta.degree_fallbacks;
            for (std::size_t p = 0; p < N; ++p) {
                double zv = fitZ.fitted[p];
                if (cfg.z_clip > 0.0 && std::fabs(zv) > cfg.z_clip) {
                    zv = std::copysign(cfg.z_clip, zv);
                    ++sol.meta.z_clip_events;
                }
                sol.z(p, i, k) = zv;
            }
        }
        for (std::size_t p = 0; p < N; ++p) {
            const double y0 = fitE.fitted[p];
            std::span<const double> zrow(&sol.z(p, i, 0), d);
            double y = project_into(spec.domain(), eps, y0, sol.meta.projection_clip_events);
            for (int s = 0; s < sweeps; ++s) {
                const double g = spec.raw(t, y, zrow);
                y = project_into(spec.domain(), eps, y0 + g * dt,
                                sol.meta.projection_clip_events);
            }
            if (!std::isfinite(y) || std::fabs(y) > kDivergenceCap)
                throw Divergence("solve: |Y| blew past the cap at t=" + std::to_string(t));
            if (obstacle) {
                const double L = obstacle->at(t, state[p]);
                const double reflected = std::max(y, L);
                sol.k_at(p, i + 1) = reflected - y; // stash dK, prefix-summed below
                y = reflected;
            }
            sol.y(p, i) = y;
        }
    }
    if (obstacle) {
        for (std::size_t p = 0; p < N; ++p) {
            double running = 0.0;
            sol.k_at(p, 0) = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                running += sol.k_at(p, i + 1);
                sol.k_at(p, i + 1) = running;
            }
        }
    }

    // Y_0 statistics: mean of the emitted values and the CLT stderr of the
    // one-step targets whose conditional mean defines Y_0.
    double mean = 0.0;
    for (std::size_t p = 0; p < N; ++p) mean += sol.y(p, 0);
    mean /= static_cast<double>(N);
    double tmean = 0.0, tvar = 0.0;
    std::vector<double> tau(N);
    for (std::size_t p = 0; p < N; ++p) {
        std::span<const double> zrow(&sol.z(p, 0, 0), d);
        tau[p] = sol.y(p, 1) + spec.raw(grid.node(0), sol.y(p, 0), zrow) * dt;
        tmean += tau[p];
    }
    tmean /= static_cast<double>(N);
    for (std::size_t p = 0; p < N; ++p) tvar += (tau[p] - tmean) * (tau[p] - tmean);
    sol.meta.y0_mean = mean;
    sol.meta.y0_stderr =
        N > 1 ? std::sqrt(tvar / (static_cast<double>(N) * static_cast<double>(N - 1))) : 0.0;
    return sol;
}

SolutionProcess solve_impl(const GeneratorSpec& spec, const TerminalCondition& xi,
                           const TimeGrid& grid, const PathBundle& paths,
                           const SolverConfig& cfg, const Obstacle* obstacle) {
    if (paths.grid() != grid)
        throw GridMismatch("solve: path bundle was generated on a different grid");
    const bool obstacle_deterministic = obstacle == nullptr || obstacle->time_only;
    if (xi.deterministic() && spec.z_independent() && obstacle_deterministic)
        return solve_deterministic(spec, xi.constant, grid, paths, cfg, obstacle);
    return solve_stochastic(spec, terminal_values(spec, xi, paths), grid, paths, cfg,
                            obstacle);
}

} // namespace

SolutionProcess solve_bsde(const GeneratorSpec& spec, const TerminalCondition& xi,
                           const TimeGrid& grid, const PathBundle& paths,
                           const SolverConfig& cfg) {
    return solve_impl(spec, xi, grid, paths, cfg, nullptr);
}

SolutionProcess solve_rbsde(const GeneratorSpec& spec, const TerminalCondition& xi,
                            const Obstacle& obstacle, const TimeGrid& grid,
                            const PathBundle& paths, const SolverConfig& cfg) {
    return solve_impl(spec, xi, grid, paths, cfg, &obstacle);
}

ThetaDifference theta_difference_process(const SolutionProcess& a, const SolutionProcess& b,
                                         double theta, const Domain& domain) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidParam("theta_difference_process: theta must lie in (0,1)");
    require_same_grid(a, b, "theta_difference_process");
    ThetaDifference out;
    out.n_paths = a.n_paths();
    out.nodes = a.grid().nodes();
    out.values.resize(out.n_paths * out.nodes);
    out.in_domain.resize(out.values.size());
    for (std::size_t p = 0; p < out.n_paths; ++p)
        for (std::size_t i = 0; i < out.nodes; ++i) {
            const double v = (a.y(p, i) - theta * b.y(p, i)) / (1.0 - theta);
            out.values[p * out.nodes + i] = v;
            const bool ok = domain.contains(v);
            out.in_domain[p * out.nodes + i] = ok ? 1 : 0;
            if (!ok) out.all_in_domain = false;
        }
    return out;
}

double picard_residual(const SolutionProcess& sol, const GeneratorSpec& spec) {
    if (sol.has_k())
        throw InvalidParam("picard_residual: defined for non-reflected solutions");
    const std::size_t M = sol.grid().steps();
    const std::size_t N = sol.n_paths();
    const double dt = sol.grid().dt();
    double worst = 0.0;
    for (std::size_t i = 0; i < M; ++i) {
        double my = 0.0, my1 = 0.0, mg = 0.0;
        for (std::size_t p = 0; p < N; ++p) {
            my += sol.y(p, i);
            my1 += sol.y(p, i + 1);
            std::span<const double> zrow(&sol.z(p, i, 0), sol.dim());
            mg += spec.raw(sol.grid().node(i), sol.y(p, i), zrow);
        }
        my /= static_cast<double>(N);
        my1 /= static_cast<double>(N);
        mg /= static_cast<double>(N);
        worst = std::max(worst, std::fabs(my - my1 - mg * dt));
    }
    return worst;
}

double skorokhod_residual(const SolutionProcess& sol, const Obstacle& obstacle,
                          const PathBundle& paths) {
    if (!sol.has_k())
        throw InvalidParam("skorokhod_residual: solution carries no K process");
    if (paths.grid() != sol.grid() || paths.n_paths() != sol.n_paths())
        throw GridMismatch("skorokhod_residual: paths do not match the solution");
    const std::size_t M = sol.grid().steps();
    double worst = 0.0;
    for (std::size_t p = 0; p < sol.n_paths(); ++p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            const double L = obstacle.at(sol.grid().node(i), paths.state(p, i, 0));
            const double dk = sol.k_at(p, i + 1) - sol.k_at(p, i);
            acc += (sol.y(p, i) - L) * dk;
        }
        worst = std::max(worst, std::fabs(acc));
    }
    return worst;
}

CheckReport k_comparison_check(const SolutionProcess& solA, const SolutionProcess& solB,
                               const Obstacle& obstacleA, const PathBundle& paths) {
    require_same_grid(solA, solB, "k_comparison_check");
    if (!solA.has_k() || !solB.has_k())
        throw InvalidParam("k_comparison_check: both solutions must carry K");
    const std::size_t M = solA.grid().steps();
    const std::size_t N = solA.n_paths();

    for (std::size_t p = 0; p < N; ++p)
        for (std::size_t i = 0; i <= M; ++i)
            if (solA.y(p, i) < solB.y(p, i) - 1e-9)
                throw HypothesisUnmet(
                    "k_comparison_check: dominating solution dips below the dominated one");

    // tol: 1e-9 plus three stderr of the indicator-weighted K totals
    double sa = 0.0, sa2 = 0.0, sb = 0.0, sb2 = 0.0;
    CheckReport out;
    out.name = "k_comparison";
    double worst = -std::numeric_limits<double>::infinity(); // max violation of the <=
    for (std::size_t p = 0; p < N; ++p) {
        double ea = 0.0, eb = 0.0;
        double diff = 0.0;     // E(t) = sum 1{...} (dK_A - dK_B) over [0,t)
        double run_min = 0.0;  // min over r <= t of E(r)
        double path_worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < M; ++i) {
            const double L = obstacleA.at(solA.grid().node(i), paths.state(p, i, 0));
            const double ind = solB.y(p, i) >= L ? 1.0 : 0.0;
            const double dka = solA.k_at(p, i + 1) - solA.k_at(p, i);
            const double dkb = solB.k_at(p, i + 1) - solB.k_at(p, i);
            ea += ind * dka;
            eb += ind * dkb;
            diff += ind * (dka - dkb);
            path_worst = std::max(path_worst, diff - run_min);
            run_min = std::min(run_min, diff);
        }
        if (path_worst > worst) {
            worst = path_worst;
            out.witness.present = true;
            out.witness.path = static_cast<long>(p);
        }
        sa += ea;
        sa2 += ea * ea;
        sb += eb;
        sb2 += eb * eb;
    }
    const double n = static_cast<double>(N);
    const double var_a = std::max(0.0, sa2 / n - (sa / n) * (sa / n));
    const double var_b = std::max(0.0, sb2 / n - (sb / n) * (sb / n));
    const double tol_k = 1e-9 + 3.0 * std::sqrt((var_a + var_b) / n);
    out.margin = -worst;
    out.stats["tol_k"] = tol_k;
    out.status = worst > tol_k ? CheckStatus::Fail : CheckStatus::Pass;
    return out;
}

} // namespace qbsde
