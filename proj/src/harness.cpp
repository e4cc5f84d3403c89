#include "qbsde/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qbsde/errors.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

CheckReport bracketing_check(const SolutionProcess& sol, const EnvelopeSolution& lower,
                             const EnvelopeSolution& upper) {
    if (lower.grid != sol.grid() || upper.grid != sol.grid())
        throw GridMismatch("bracketing_check: envelopes live on a different grid");
    CheckReport out;
    out.name = "bracketing";
    if (lower.blown_up || upper.blown_up) {
        out.status = CheckStatus::Error;
        out.note = "envelope blew up before t=0";
        return out;
    }
    const std::size_t N = sol.n_paths();
    const std::size_t nodes = sol.grid().nodes();
    double min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < nodes; ++i) {
        double mean = 0.0, var = 0.0;
        for (std::size_t p = 0; p < N; ++p) mean += sol.y(p, i);
        mean /= static_cast<double>(N);
        for (std::size_t p = 0; p < N; ++p) {
            const double dv = sol.y(p, i) - mean;
            var += dv * dv;
        }
        const double stderr_i =
            N > 1 ? std::sqrt(var / (static_cast<double>(N) * static_cast<double>(N - 1)))
                  : 0.0;
        const double tol = 1e-6 + 3.0 * stderr_i;
        for (std::size_t p = 0; p < N; ++p) {
            const double v = sol.y(p, i);
            const double slack = std::min(v - (lower.values[i] - tol), (upper.values[i] + tol) - v);
            if (slack < min_slack) {
                min_slack = slack;
                out.witness.present = true;
                out.witness.t = sol.grid().node(i);
                out.witness.y = v;
                out.witness.path = static_cast<long>(p);
                out.witness.step = static_cast<long>(i);
            }
        }
    }
    out.margin = min_slack;
    out.status = min_slack < 0.0 ? CheckStatus::Fail : CheckStatus::Pass;
    return out;
}

DominanceRelation dominance_relation_from_string(const std::string& s) {
    if (s == "generator_dominates") return DominanceRelation::GeneratorDominates;
    if (s == "terminal_dominates") return DominanceRelation::TerminalDominates;
    if (s == "obstacle_dominates") return DominanceRelation::ObstacleDominates;
    if (s == "combined") return DominanceRelation::Combined;
    throw InvalidParam("unknown dominance relation '" + s + "'");
}

namespace {

void spot_check_generator_order(const GeneratorSpec& ga, const GeneratorSpec& gb,
                                const SolutionProcess& sa, const SolutionProcess& sb) {
    // sample (t, y, z) from the box the two solutions actually visited
    double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
    double z_lo = 0.0, z_hi = 0.0;
    for (const auto* s : {&sa, &sb}) {
        for (double v : s->y_data()) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
        for (double v : s->z_data()) {
            z_lo = std::min(z_lo, v);
            z_hi = std::max(z_hi, v);
        }
    }
    SplitMix rng(0xa076bdf49593c1f9ULL);
    std::vector<double> z(sa.dim());
    for (int it = 0; it < 400; ++it) {
        const double t = rng.uniform(0.0, sa.grid().horizon());
        const double y = rng.uniform(y_lo, y_hi);
        if (!ga.domain().contains(y) || !gb.domain().contains(y)) continue;
        for (auto& w : z) w = rng.uniform(z_lo, z_hi);
        const double va = ga.raw(t, y, z);
        const double vb = gb.raw(t, y, z);
        const double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
        if (va < vb - 1e-12 * scale)
            throw HypothesisUnmet("comparison_suite: generator order fails at y=" +
                                  std::to_string(y));
    }
}

void spot_check_hypothesis(const ComparisonHypothesis& hyp, const SolutionProcess& sa,
                           const SolutionProcess& sb, const PathBundle& paths) {
    const bool want_gen = hyp.relation == DominanceRelation::GeneratorDominates ||
                          hyp.relation == DominanceRelation::Combined;
    const bool want_xi = hyp.relation == DominanceRelation::TerminalDominates ||
                         hyp.relation == DominanceRelation::Combined;
    const bool want_obs = hyp.relation == DominanceRelation::ObstacleDominates ||
                          hyp.relation == DominanceRelation::Combined;
    if (want_gen) {
        if (!hyp.gen_a || !hyp.gen_b)
            throw InvalidParam("comparison_suite: generator hypothesis needs both generators");
        spot_check_generator_order(*hyp.gen_a, *hyp.gen_b, sa, sb);
    }
    if (want_xi) {
        if (!hyp.xi_a || !hyp.xi_b)
            throw InvalidParam("comparison_suite: terminal hypothesis needs both terminals");
        const std::size_t M = paths.grid().steps();
        for (std::size_t p = 0; p < paths.n_paths(); ++p) {
            const double bt = paths.state(p, M, 0);
            const double xa = hyp.xi_a->deterministic() ? hyp.xi_a->constant : hyp.xi_a->of_bt(bt);
            const double xb = hyp.xi_b->deterministic() ? hyp.xi_b->constant : hyp.xi_b->of_bt(bt);
            if (xa < xb - 1e-12 * std::max({1.0, std::fabs(xa), std::fabs(xb)}))
                throw HypothesisUnmet("comparison_suite: terminal order fails on path " +
                                      std::to_string(p));
        }
    }
    if (want_obs) {
        if (!hyp.obstacle_a || !hyp.obstacle_b)
            throw InvalidParam("comparison_suite: obstacle hypothesis needs both obstacles");
        for (std::size_t i = 0; i < paths.grid().nodes(); ++i) {
            const double t = paths.grid().node(i);
            for (std::size_t p = 0; p < std::min<std::size_t>(paths.n_paths(), 64); ++p) {
                const double b = paths.state(p, std::min(i, paths.grid().steps()), 0);
                if (hyp.obstacle_a->at(t, b) < hyp.obstacle_b->at(t, b) - 1e-12)
                    throw HypothesisUnmet("comparison_suite: obstacle order fails at t=" +
                                          std::to_string(t));
            }
        }
    }
}

} // namespace

CheckReport comparison_suite(const SolutionProcess& sol_a, const SolutionProcess& sol_b,
                             const ComparisonHypothesis& hyp, const PathBundle& paths) {
    require_same_grid(sol_a, sol_b, "comparison_suite");
    spot_check_hypothesis(hyp, sol_a, sol_b, paths);

    CheckReport out;
    out.name = "comparison";
    const std::size_t N = sol_a.n_paths();
    const std::size_t nodes = sol_a.grid().nodes();
    double min_margin = std::numeric_limits<double>::infinity();
    double min_allowed = std::numeric_limits<double>::infinity();
    std::size_t violations = 0;
    for (std::size_t i = 0; i < nodes; ++i) {
        double mean_d = 0.0, var_d = 0.0;
        for (std::size_t p = 0; p < N; ++p) mean_d += sol_a.y(p, i) - sol_b.y(p, i);
        mean_d /= static_cast<double>(N);
        for (std::size_t p = 0; p < N; ++p) {
            const double d = sol_a.y(p, i) - sol_b.y(p, i);
            var_d += (d - mean_d) * (d - mean_d);
            if (d < -1e-12) ++violations;
        }
        const double stderr_i =
            N > 1 ? std::sqrt(var_d / (static_cast<double>(N) * static_cast<double>(N - 1)))
                  : 0.0;
        if (mean_d < min_margin) {
            min_margin = mean_d;
            out.witness.present = true;
            out.witness.t = sol_a.grid().node(i);
            out.witness.step = static_cast<long>(i);
        }
        min_allowed = std::min(min_allowed, mean_d + 3.0 * stderr_i);
    }
    const double frac =
        static_cast<double>(violations) / (static_cast<double>(N) * static_cast<double>(nodes));
    out.margin = min_margin;
    out.stats["pathwise_violation_fraction"] = frac;
    out.stats["min_mean_gap_plus_3se"] = min_allowed;
    out.status =
        (min_allowed >= 0.0 && frac <= 0.01) ? CheckStatus::Pass : CheckStatus::Fail;
    return out;
}

CheckReport uniqueness_probe(const GeneratorSpec& spec, const TerminalCondition& xi,
                             const TimeGrid& grid, const UniquenessOptions& opt,
                             const SolverConfig& base) {
    CheckReport out;
    out.name = "uniqueness_probe";
    struct Estimate {
        double y0;
        double se;
    };
    std::vector<Estimate> estimates;

    const PathBundle coarse(opt.seed, opt.n_paths, grid, 1);
    for (int picard : opt.picard_variants) {
        for (int degree : opt.degree_variants) {
            SolverConfig cfg = base;
            cfg.picard_iters = picard;
            cfg.basis.degree = degree;
            const SolutionProcess sol = solve_bsde(spec, xi, grid, coarse, cfg);
            estimates.push_back({sol.meta.y0_mean, sol.meta.y0_stderr});
        }
    }
    const TimeGrid fine(grid.horizon(), 2 * grid.steps());
    const PathBundle fine_paths(opt.seed, opt.n_paths, fine, 1);
    const SolutionProcess fine_sol = solve_bsde(spec, xi, fine, fine_paths, base);
    const SolutionProcess coarse_ref = solve_bsde(spec, xi, grid, coarse, base);

    const double dt = grid.dt();
    const double c_fit = 2.0 * std::fabs(coarse_ref.meta.y0_mean - fine_sol.meta.y0_mean) / dt;
    estimates.push_back({fine_sol.meta.y0_mean, fine_sol.meta.y0_stderr});

    double lo = std::numeric_limits<double>::infinity(), hi = -lo, max_se = 0.0;
    for (const auto& e : estimates) {
        lo = std::min(lo, e.y0);
        hi = std::max(hi, e.y0);
        max_se = std::max(max_se, e.se);
    }
    const double spread = hi - lo;
    const double allowance = 3.0 * max_se + c_fit * dt + 1e-9;
    out.margin = allowance - spread;
    out.stats["spread"] = spread;
    out.stats["allowance"] = allowance;
    out.stats["fitted_dt_coefficient"] = c_fit;
    out.stats["estimates"] = static_cast<double>(estimates.size());
    out.status = spread <= allowance ? CheckStatus::Pass : CheckStatus::Fail;
    return out;
}

CheckReport theta_domination_suite(const GeneratorSpec& spec, const SolutionProcess& sol_a,
                                   const SolutionProcess& sol_b,
                                   const std::vector<double>& thetas) {
    require_same_grid(sol_a, sol_b, "theta_domination_suite");
    const std::size_t N = sol_a.n_paths();
    const std::size_t M = sol_a.grid().steps();
    const std::size_t d = sol_a.dim();

    for (std::size_t p = 0; p < N; ++p)
        for (std::size_t i = 0; i <= M; ++i)
            if (sol_a.y(p, i) < sol_b.y(p, i) - 1e-6)
                throw HypothesisUnmet("theta_domination_suite: solutions are not ordered");

    CheckReport out;
    out.name = "theta_domination";
    double worst_gap = -std::numeric_limits<double>::infinity();
    std::size_t evaluated = 0, skipped = 0;
    std::vector<double> dz(d);
    for (double theta : thetas) {
        if (!(theta > 0.0 && theta < 1.0))
            throw InvalidParam("theta_domination_suite: theta must lie in (0,1)");
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t i = 0; i < M; ++i) {
                const double ya = sol_a.y(p, i);
                const double yb = sol_b.y(p, i);
                const double dy = (ya - theta * yb) / (1.0 - theta);
                if (!spec.domain().contains(dy)) {
                    ++skipped;
                    continue;
                }
                std::span<const double> za(&sol_a.z(p, i, 0), d);
                std::span<const double> zb(&sol_b.z(p, i, 0), d);
                for (std::size_t k = 0; k < d; ++k)
                    dz[k] = (za[k] - theta * zb[k]) / (1.0 - theta);
                const double t = sol_a.grid().node(i);
                const double gap = spec.raw(t, ya, za) - theta * spec.raw(t, yb, zb) -
                                   (1.0 - theta) * spec.raw(t, dy, dz);
                ++evaluated;
                if (gap > worst_gap) {
                    worst_gap = gap;
                    out.witness.present = true;
                    out.witness.t = t;
                    out.witness.y = dy;
                    out.witness.z.assign(dz.begin(), dz.end());
                    out.witness.path = static_cast<long>(p);
                    out.witness.step = static_cast<long>(i);
                    out.witness.note = "theta=" + std::to_string(theta);
                }
            }
        }
    }
    out.margin = tol_convex - worst_gap;
    out.stats["evaluated_points"] = static_cast<double>(evaluated);
    out.stats["skipped_out_of_domain"] = static_cast<double>(skipped);
    out.status = worst_gap <= tol_convex ? CheckStatus::Pass : CheckStatus::Fail;
    return out;
}

CheckReport integrability_report(const SolutionProcess& sol, const UPhiTransform& transform,
                                 const LambdaWeight& weight, const std::vector<double>& q_list,
                                 double p) {
    if (!(p >= 1.0)) throw InvalidParam("integrability_report: p must be >= 1");
    CheckReport out;
    out.name = "integrability";
    out.status = CheckStatus::Diagnostic;
    const GridLambda lam(weight, sol.grid());
    const std::size_t N = sol.n_paths();
    const std::size_t nodes = sol.grid().nodes();

    for (double q : q_list) {
        CheckReport sub;
        sub.name = "integrability_q_" + std::to_string(q);
        sub.status = CheckStatus::Diagnostic;
        std::vector<double> sups;
        sups.reserve(N);
        std::size_t excluded = 0;
        for (std::size_t path = 0; path < N; ++path) {
            double sup = 0.0;
            bool ok = true;
            for (std::size_t i = 0; i < nodes && ok; ++i) {
                const double arg = q * lam.at(i, sol.y(path, i));
                if (!transform.domain().contains(arg)) {
                    ok = false;
                    break;
                }
                sup = std::max(sup, std::pow(std::fabs(transform(arg)), p));
            }
            if (ok)
                sups.push_back(sup);
            else
                ++excluded;
        }
        if (sups.empty()) {
            sub.note = "all paths excluded (transform domain violations)";
            sub.stats["excluded_paths"] = static_cast<double>(excluded);
            out.sub.push_back(sub);
            continue;
        }
        const double moment =
            std::accumulate(sups.begin(), sups.end(), 0.0) / static_cast<double>(sups.size());
        // bootstrap percentile interval, seeded from the replay seed
        SplitMix rng(sol.meta.seed ^ 0x7f4a7c15ULL);
        std::vector<double> boot(500);
        for (auto& bval : boot) {
            double acc = 0.0;
            for (std::size_t k = 0; k < sups.size(); ++k)
                acc += sups[static_cast<std::size_t>(rng.uniform() *
                                                     static_cast<double>(sups.size()))];
            bval = acc / static_cast<double>(sups.size());
        }
        std::sort(boot.begin(), boot.end());
        sub.stats["q"] = q;
        sub.stats["moment"] = moment;
        sub.stats["ci_lo"] = boot[12];
        sub.stats["ci_hi"] = boot[487];
        sub.stats["excluded_paths"] = static_cast<double>(excluded);
        out.sub.push_back(sub);
    }
    return out;
}

} // namespace qbsde
