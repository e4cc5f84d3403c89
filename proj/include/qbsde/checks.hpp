#ifndef QBSDE_CHECKS_HPP
#define QBSDE_CHECKS_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qbsde/generator.hpp"

namespace qbsde {

enum class CheckStatus { Pass, Fail, HypothesisUnmet, Diagnostic, Error };

std::string to_string(CheckStatus s);

/// Worst-case witness of a failed (or tightest passing) sample point.
struct Witness {
    bool present = false;
    double t = 0.0;
    double y = 0.0;
    std::vector<double> z;
    long path = -1;
    long step = -1;
    std::string note;
};

/// Structured result of an assumption check or theorem-level property test.
struct CheckReport {
    std::string name;
    CheckStatus status = CheckStatus::Pass;
    // signed slack of the tightest sample: negative means a violation
    double margin = 0.0;
    Witness witness;
    std::vector<CheckReport> sub;
    std::map<std::string, double> stats;
    std::string note;

    bool passed() const noexcept { return status == CheckStatus::Pass; }
};

/// Cartesian sample lattice of (t, y, z) points.
struct SampleLattice {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<std::vector<double>> z;

    static SampleLattice uniform(double t_lo, double t_hi, std::size_t nt, double y_lo,
                                 double y_hi, std::size_t ny, double z_lo, double z_hi,
                                 std::size_t nz, std::size_t dim = 1);
};

// absolute slack for convexity-style gap checks
inline constexpr double tol_convex = 1e-9;
// relative slack for growth checks
inline constexpr double tol_growth_rel = 1e-12;

/// Checks the seven one-sided growth inequalities of the declared envelope on
/// the lattice plus 1e4 seeded random points. One sub-report per inequality;
/// overall PASS iff every applicable inequality holds everywhere sampled.
CheckReport check_one_sided_growth(const GeneratorSpec& spec, const GrowthEnvelope& env,
                                   const SampleLattice& lattice);

/// Segment in D x R^d for convexity probing.
struct Segment {
    double t = 0.0;
    double y1 = 0.0;
    std::vector<double> z1;
    double y2 = 0.0;
    std::vector<double> z2;
};

CheckReport check_convexity(const GeneratorSpec& spec, const std::vector<Segment>& segments,
                            const std::vector<double>& thetas);

/// Certificate from the Hessian of y^{-r}|z|^2 on (0,inf) x R^d.
struct ConvexityCertificate {
    bool convex = false;
    // negative-direction witness (populated when convex == false)
    double y = 0.0;
    std::vector<double> z;
    std::vector<double> direction; // (v_y, v_z) in R^{d+1}
    double form_value = 0.0;       // v^T H v at the witness
    double sampled_min = 0.0;      // min v^T H v over the random sample (convex case)
};

/// True exactly when 0 <= r <= 1. In the non-convex case the certificate
/// carries a direction with v^T H v < 0; in the convex case the form is
/// sampled at seeded random points. require_convex rejects r < 0 upfront.
ConvexityCertificate power_quadratic_convexity(double r, std::size_t d,
                                               bool require_convex = false);

/// g(t,y1,z1) - theta g(t,y2,z2) - (1-theta) g(t, dy, dz) at the
/// theta-difference point (dy, dz) = ((y1 - theta y2)/(1-theta), ...).
/// Nonpositive (up to tol_convex) for convex generators.
double theta_gap(const GeneratorSpec& spec, double theta, double y1,
                 std::span<const double> z1, double y2, std::span<const double> z2,
                 double t);

/// Pointwise local Lipschitz bound with caller-supplied moduli h1, h2,
/// exponent r in (0,1) and constant proxies r1, r2.
CheckReport check_local_lipschitz(const GeneratorSpec& spec,
                                  const std::function<double(double, double)>& h1,
                                  const std::function<double(double, double)>& h2,
                                  double r, double r1, double r2,
                                  const std::vector<Segment>& sample_pairs);

/// Heuristic class-L screening: numerically integrates 1/l toward both tails
/// up to the cutoff and reports the growth trend. Diagnostic only, never
/// PASS/FAIL.
CheckReport class_l_report(const ScalarFn& l, double cutoff = 1e6);

} // namespace qbsde

#endif
