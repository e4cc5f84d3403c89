#include "qbsde/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qbsde/errors.hpp"
#include "qbsde/quadrature.hpp"
#include "qbsde/rng.hpp"

namespace qbsde {

std::string to_string(CheckStatus s) {
    switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::HypothesisUnmet: return "HYPOTHESIS_UNMET";
    case CheckStatus::Diagnostic: return "DIAGNOSTIC";
    default: return "ERROR";
    }
}

SampleLattice SampleLattice::uniform(double t_lo, double t_hi, std::size_t nt, double y_lo,
                                     double y_hi, std::size_t ny, double z_lo, double z_hi,
                                     std::size_t nz, std::size_t dim) {
    SampleLattice lat;
    auto fill = [](double lo, double hi, std::size_t n) {
        std::vector<double> v;
        v.reserve(n);
        if (n == 1) {
            v.push_back(0.5 * (lo + hi));
            return v;
        }
        for (std::size_t i = 0; i < n; ++i)
            v.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        return v;
    };
    lat.t = fill(t_lo, t_hi, nt);
    lat.y = fill(y_lo, y_hi, ny);
    for (double zv : fill(z_lo, z_hi, nz)) lat.z.emplace_back(dim, zv);
    return lat;
}

namespace {

constexpr std::size_t kRandomProbes = 10000;

double znorm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

bool lex_less(double t, double y, std::span<const double> z, const Witness& w) {
    if (t != w.t) return t < w.t;
    if (y != w.y) return y < w.y;
    for (std::size_t k = 0; k < z.size() && k < w.z.size(); ++k)
        if (z[k] != w.z[k]) return z[k] < w.z[k];
    return false;
}

/// Tracks the tightest sample of a <= inequality with relative slack.
struct SlackTracker {
    double min_slack = std::numeric_limits<double>::infinity();
    Witness worst;
    std::size_t applicable = 0;

    void observe(double lhs, double rhs, double t, double y, std::span<const double> z) {
        ++applicable;
        const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
        const double slack = (rhs - lhs) / scale;
        if (slack < min_slack || (slack == min_slack && lex_less(t, y, z, worst))) {
            min_slack = slack;
            worst.present = true;
            worst.t = t;
            worst.y = y;
            worst.z.assign(z.begin(), z.end());
        }
    }

    CheckReport report(const std::string& name) const {
        CheckReport r;
        r.name = name;
        if (applicable == 0) {
            r.status = CheckStatus::Pass;
            r.margin = 0.0;
            r.note = "no applicable sample points";
            return r;
        }
        r.margin = min_slack;
        r.witness = worst;
        r.status = min_slack < -tol_growth_rel ? CheckStatus::Fail : CheckStatus::Pass;
        r.stats["applicable_points"] = static_cast<double>(applicable);
        return r;
    }
};

struct GrowthPoint {
    double t;
    double y;
    std::vector<double> z;
};

std::vector<GrowthPoint> growth_samples(const GeneratorSpec& spec,
                                        const SampleLattice& lattice) {
    if (lattice.t.empty() || lattice.y.empty() || lattice.z.empty())
        throw InvalidParam("check_one_sided_growth: empty sample lattice");
    std::vector<GrowthPoint> pts;
    pts.reserve(lattice.t.size() * lattice.y.size() * lattice.z.size() + kRandomProbes);
    for (double t : lattice.t)
        for (double y : lattice.y) {
            spec.domain().require(y, "check_one_sided_growth");
            for (const auto& z : lattice.z) pts.push_back({t, y, z});
        }
    // augment with seeded uniform probes over the lattice bounding box
    const auto [t_lo, t_hi] = std::minmax_element(lattice.t.begin(), lattice.t.end());
    const auto [y_lo, y_hi] = std::minmax_element(lattice.y.begin(), lattice.y.end());
    double z_lo = 0.0, z_hi = 0.0;
    const std::size_t dim = lattice.z.front().size();
    for (const auto& z : lattice.z)
        for (double v : z) {
            z_lo = std::min(z_lo, v);
            z_hi = std::max(z_hi, v);
        }
    SplitMix rng(0x6f5902ac237024bdULL);
    for (std::size_t i = 0; i < kRandomProbes; ++i) {
        GrowthPoint p;
        p.t = rng.uniform(*t_lo, *t_hi);
        p.y = rng.uniform(*y_lo, *y_hi);
        if (!spec.domain().contains(p.y)) continue;
        p.z.resize(dim);
        for (auto& v : p.z) v = rng.uniform(z_lo, z_hi);
        pts.push_back(std::move(p));
    }
    return pts;
}

} // namespace

CheckReport check_one_sided_growth(const GeneratorSpec& spec, const GrowthEnvelope& env,
                                   const SampleLattice& lattice) {
    env.validate();
    const auto pts = growth_samples(spec, lattice);
    const std::vector<double> z0;

    SlackTracker a1_i, a1_ii, a1_iii, a1_iv, a5_i, a5_ii, a5_iii;
    for (const auto& p : pts) {
        const double g0 = spec.raw(p.t, p.y, z0);
        const double gz = spec.raw(p.t, p.y, p.z);
        if (!std::isfinite(g0) || !std::isfinite(gz))
            throw NonFinite("check_one_sided_growth: generator overflow at y=" +
                            std::to_string(p.y));
        const double n = znorm(p.z);
        const double ut = env.u(p.t);
        const double ly = env.l(p.y);
        const double fy = env.f(std::fabs(p.y));
        const double dt_ = env.delta(p.t);
        const double gt_ = env.gamma(p.t);
        if (p.y >= env.c) {
            a1_i.observe(g0, ut * ly, p.t, p.y, z0);
            a1_iv.observe(gz, ut * ly + env.f(p.y) * n * n, p.t, p.y, p.z);
            a5_i.observe(gz, dt_ + gt_ * std::fabs(p.y) + env.kappa * n + fy * n * n, p.t,
                         p.y, p.z);
        }
        if (p.y <= -env.c) {
            // lower bounds flipped into <= form
            a1_ii.observe(-ut * ly, g0, p.t, p.y, z0);
            a5_ii.observe(-dt_ - gt_ * std::fabs(p.y) - env.kappa * n - fy * n * n, gz, p.t,
                          p.y, p.z);
        }
        if (p.y > 0.0 && p.y <= env.b) {
            a1_iii.observe(ut * p.y * std::log(p.y), g0, p.t, p.y, z0);
            a5_iii.observe(-gt_ * std::fabs(p.y) - env.kappa * n - env.nu / p.y * n * n, gz,
                           p.t, p.y, p.z);
        }
    }

    CheckReport out;
    out.name = "one_sided_growth";
    out.sub.push_back(a1_i.report("upper_growth_at_zero_z"));
    out.sub.push_back(a1_ii.report("lower_growth_at_zero_z"));
    out.sub.push_back(a1_iii.report("log_floor_at_zero_z"));
    out.sub.push_back(a1_iv.report("upper_growth_quadratic_z"));
    out.sub.push_back(a5_i.report("upper_growth_full"));
    out.sub.push_back(a5_ii.report("lower_growth_full"));
    out.sub.push_back(a5_iii.report("singular_floor_full"));
    out.margin = std::numeric_limits<double>::infinity();
    for (const auto& s : out.sub) {
        if (s.status == CheckStatus::Fail) {
            out.status = CheckStatus::Fail;
            if (s.margin < out.margin) out.witness = s.witness;
        }
        out.margin = std::min(out.margin, s.margin);
    }
    return out;
}

CheckReport check_convexity(const GeneratorSpec& spec, const std::vector<Segment>& segments,
                            const std::vector<double>& thetas) {
    CheckReport out;
    out.name = "convexity";
    double min_slack = std::numeric_limits<double>::infinity();
    for (const auto& s : segments) {
        const double g1 = eval_generator(spec, s.t, s.y1, s.z1);
        const double g2 = eval_generator(spec, s.t, s.y2, s.z2);
        for (double th : thetas) {
            if (!(th > 0.0 && th < 1.0))
                throw InvalidParam("check_convexity: theta must lie in (0,1)");
            const double ym = th * s.y1 + (1.0 - th) * s.y2;
            std::vector<double> zm(s.z1.size());
            for (std::size_t k = 0; k < zm.size(); ++k)
                zm[k] = th * s.z1[k] + (1.0 - th) * s.z2[k];
            const double gm = eval_generator(spec, s.t, ym, zm);
            const double slack = th * g1 + (1.0 - th) * g2 - gm;
            if (slack < min_slack) {
                min_slack = slack;
                out.witness.present = true;
                out.witness.t = s.t;
                out.witness.y = ym;
                out.witness.z = zm;
                out.witness.note = "theta=" + std::to_string(th);
            }
        }
    }
    out.margin = min_slack;
    out.status = min_slack < -tol_convex ? CheckStatus::Fail : CheckStatus::Pass;
    out.stats["segments"] = static_cast<double>(segments.size());
    return out;
}

namespace {

/// v^T H v for the Hessian of y^{-r}|z|^2; v = (v_y, v_z) in R^{d+1}.
double power_quadratic_form(double r, double y, std::span<const double> z,
                            std::span<const double> v) {
    const double n2 = [&] {
        double s = 0.0;
        for (double w : z) s += w * w;
        return s;
    }();
    const double vy = v[0];
    double vz_dot_z = 0.0, vz2 = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        vz_dot_z += v[k + 1] * z[k];
        vz2 += v[k + 1] * v[k + 1];
    }
    const double yr = std::pow(y, -r);
    return r * (r + 1.0) * yr / (y * y) * n2 * vy * vy -
           4.0 * r * yr / y * vy * vz_dot_z + 2.0 * yr * vz2;
}

} // namespace

ConvexityCertificate power_quadratic_convexity(double r, std::size_t d, bool require_convex) {
    if (d < 1) throw InvalidParam("power_quadratic_convexity: d must be >= 1");
    if (require_convex && r < 0.0)
        throw InvalidParam("power_quadratic_convexity: r < 0 outside the convex regime");
    ConvexityCertificate cert;
    cert.convex = r >= 0.0 && r <= 1.0;
    if (!cert.convex) {
        // reduced 2x2 form at y=1, z=e1 in the (v_y, v_z.zhat) coordinates
        const double a00 = r * (r + 1.0);
        const double a01 = -2.0 * r;
        const double a11 = 2.0;
        const double tr = a00 + a11;
        const double det = a00 * a11 - a01 * a01;
        const double lam = 0.5 * (tr - std::sqrt(tr * tr - 4.0 * det));
        double v0 = a01;
        double v1 = lam - a00;
        const double nv = std::hypot(v0, v1);
        v0 /= nv;
        v1 /= nv;
        cert.y = 1.0;
        cert.z.assign(d, 0.0);
        cert.z[0] = 1.0;
        cert.direction.assign(d + 1, 0.0);
        cert.direction[0] = v0;
        cert.direction[1] = v1;
        cert.form_value = power_quadratic_form(r, cert.y, cert.z, cert.direction);
        return cert;
    }
    // convex regime: sample the form at seeded random points
    SplitMix rng(0x853c49e6748fea9bULL);
    double min_form = std::numeric_limits<double>::infinity();
    std::vector<double> z(d), v(d + 1), worst_z(d), worst_v(d + 1);
    double worst_y = 1.0;
    for (int it = 0; it < 500; ++it) {
        const double y = rng.uniform(0.1, 5.0);
        for (auto& w : z) w = rng.uniform(-3.0, 3.0);
        for (auto& w : v) w = rng.uniform(-1.0, 1.0);
        const double q = power_quadratic_form(r, y, z, v);
        if (q < min_form) {
            min_form = q;
            worst_y = y;
            worst_z = z;
            worst_v = v;
        }
    }
    cert.sampled_min = min_form;
    cert.y = worst_y;
    cert.z = worst_z;
    cert.direction = worst_v;
    cert.form_value = min_form;
    return cert;
}

double theta_gap(const GeneratorSpec& spec, double theta, double y1,
                 std::span<const double> z1, double y2, std::span<const double> z2,
                 double t) {
    if (!(theta > 0.0 && theta < 1.0))
        throw InvalidParam("theta_gap: theta must lie in (0,1)");
    const double dy = (y1 - theta * y2) / (1.0 - theta);
    if (!spec.domain().contains(dy))
        throw DomainViolation("theta_gap: theta-difference point y=" + std::to_string(dy) +
                              " leaves the domain");
    std::vector<double> dz(z1.size());
    for (std::size_t k = 0; k < dz.size(); ++k)
        dz[k] = (z1[k] - theta * z2[k]) / (1.0 - theta);
    return eval_generator(spec, t, y1, z1) - theta * eval_generator(spec, t, y2, z2) -
           (1.0 - theta) * eval_generator(spec, t, dy, dz);
}

CheckReport check_local_lipschitz(const GeneratorSpec& spec,
                                  const std::function<double(double, double)>& h1,
                                  const std::function<double(double, double)>& h2,
                                  double r, double r1, double r2,
                                  const std::vector<Segment>& sample_pairs) {
    if (!(r > 0.0 && r < 1.0))
        throw InvalidParam("check_local_lipschitz: r must lie in (0,1)");
    SlackTracker tracker;
    for (const auto& s : sample_pairs) {
        const double g1 = eval_generator(spec, s.t, s.y1, s.z1);
        const double g2 = eval_generator(spec, s.t, s.y2, s.z2);
        const double n1 = znorm(s.z1), n2 = znorm(s.z2);
        std::vector<double> dz(s.z1.size());
        for (std::size_t k = 0; k < dz.size(); ++k) dz[k] = s.z1[k] - s.z2[k];
        const double h1_hat =
            h1(std::fabs(s.y1), std::fabs(s.y2)) *
            (r1 + std::pow(n1, 2.0 * r) + std::pow(n2, 2.0 * r));
        const double h2_hat = h2(std::fabs(s.y1), std::fabs(s.y2)) * (r2 + n1 + n2);
        const double rhs = h1_hat * std::fabs(s.y1 - s.y2) + h2_hat * znorm(dz);
        tracker.observe(std::fabs(g1 - g2), rhs, s.t, s.y1, s.z1);
    }
    CheckReport out = tracker.report("local_lipschitz");
    return out;
}

CheckReport class_l_report(const ScalarFn& l, double cutoff) {
    CheckReport out;
    out.name = "class_l_screening";
    out.status = CheckStatus::Diagnostic;
    auto inv = [&l](double x) { return 1.0 / l(x); };
    auto tail_integral = [&](double sign, double R) {
        // piecewise over decades to keep the panels dense near the origin
        double total = 0.0;
        double lo = 0.0;
        double hi = 1.0;
        while (lo < R) {
            hi = std::min(hi, R);
            total += simpson(inv, sign * lo, sign * hi, 128) * sign;
            lo = hi;
            hi *= 10.0;
        }
        return total;
    };
    const double r_mid = std::sqrt(cutoff);
    out.stats["pos_integral_mid"] = tail_integral(1.0, r_mid);
    out.stats["pos_integral_full"] = tail_integral(1.0, cutoff);
    out.stats["neg_integral_mid"] = tail_integral(-1.0, r_mid);
    out.stats["neg_integral_full"] = tail_integral(-1.0, cutoff);
    const double pos_ratio = out.stats["pos_integral_full"] /
                             std::max(out.stats["pos_integral_mid"], 1e-300);
    const double neg_ratio = out.stats["neg_integral_full"] /
                             std::max(out.stats["neg_integral_mid"], 1e-300);
    out.stats["pos_growth_ratio"] = pos_ratio;
    out.stats["neg_growth_ratio"] = neg_ratio;
    out.note = (pos_ratio > 1.5 && neg_ratio > 1.5)
                   ? "tail integrals still growing at the cutoff (divergence-consistent)"
                   : "tail integrals flattening before the cutoff (divergence doubtful)";
    return out;
}

} // namespace qbsde
