#ifndef QBSDE_TRANSFORMS_HPP
#define QBSDE_TRANSFORMS_HPP

#include <optional>
#include <vector>

#include "qbsde/domain.hpp"
#include "qbsde/scalar_fn.hpp"
#include "qbsde/solution.hpp"

namespace qbsde {

/// Monotone integral transform u(y) = int_alpha^y exp(2 int_alpha^x phi) dx.
/// Strictly increasing on its domain with u(alpha) = 0. Evaluation goes
/// through a closed form when one is tagged, otherwise through nested
/// quadrature with a per-instance cache of the inner integral on a monotone
/// node grid (built once, read-only afterwards).
class UPhiTransform {
public:
    enum class ClosedForm { None, Zero, ConstantBeta, PowerOverY, NegativeNuOverY };

    /// Numeric transform; [range_lo, range_hi] is the working interval and
    /// must contain alpha. Endpoints are pulled off finite domain walls by
    /// 1e-8 * span.
    UPhiTransform(Domain domain, ScalarFn phi, double alpha, double range_lo,
                  double range_hi);

    /// phi == 0: u(y) = y - alpha.
    static UPhiTransform zero(Domain domain, double alpha);
    /// phi == beta > 0: u(y) = (exp(2 beta (y - alpha)) - 1) / (2 beta).
    static UPhiTransform constant_beta(Domain domain, double beta, double alpha);
    /// phi = beta / y on (0, inf): u(y) = alpha/(1+2beta) ((y/alpha)^{1+2beta} - 1).
    static UPhiTransform power_over_y(double beta, double alpha = 1.0);
    /// phi = -nu / y on (-inf, 0), alpha < 0 (default -1):
    /// u(y) = alpha/(1-2nu) ((y/alpha)^{1-2nu} - 1).
    static UPhiTransform negative_nu_over_y(double nu, double alpha = -1.0);

    double alpha() const noexcept { return alpha_; }
    const Domain& domain() const noexcept { return domain_; }
    ClosedForm closed_form() const noexcept { return form_; }
    double range_lo() const noexcept { return range_lo_; }
    double range_hi() const noexcept { return range_hi_; }

    /// u(y); closed form when tagged, quadrature otherwise.
    double operator()(double y) const;

    /// Always the quadrature path, regardless of tag. Used to validate the
    /// closed forms against an independent evaluation route.
    double quadrature(double y) const;

    /// Inverse by monotone bisection on [range_lo, range_hi];
    /// |u(result) - v| <= 1e-10 (1 + |v|).
    double inverse(double v) const;

private:
    double closed(double y) const;
    double inner_integral(double x) const;

    Domain domain_;
    ScalarFn phi_;
    double alpha_;
    ClosedForm form_ = ClosedForm::None;
    double param_ = 0.0; // beta or nu for the tagged forms
    double range_lo_ = 0.0;
    double range_hi_ = 0.0;
    // inner cache: nodes_[j] -> inner_[j] = int_alpha^{nodes_[j]} phi
    std::vector<double> nodes_;
    std::vector<double> inner_;
};

/// Exponential-affine weight Lambda_t(zeta) = e^{int_0^t gamma} (|zeta| + int_0^t delta).
struct LambdaWeight {
    ScalarFn delta;
    ScalarFn gamma;
};

double lambda_weight(const LambdaWeight& w, double t, double zeta);

/// Lambda evaluated with precomputed cumulative integrals on a grid; the
/// solver-facing form for per-path-step use.
class GridLambda {
public:
    GridLambda(const LambdaWeight& w, const TimeGrid& grid);
    double at(std::size_t node, double zeta) const {
        return exp_gamma_[node] * (std::fabs(zeta) + delta_int_[node]);
    }

private:
    std::vector<double> exp_gamma_;
    std::vector<double> delta_int_;
};

/// Residual of the rescaling identity u_f(qx) = b1 u_{f^q}(x) + b2 with
/// f^q(x) = q f(qx), b1 = q exp(2 int_alpha^{q alpha} f), b2 = u_f(q alpha).
double scaling_identity_residual(const ScalarFn& f, double q, double alpha, double x,
                                 const Domain& domain);

enum class MapDirection { Forward, Inverse };

/// Y_t -> Y_t -/+ e^{int_0^t gamma} int_0^t delta; Z and K untouched.
SolutionProcess ito_shift_map(const SolutionProcess& sol, const ScalarFn& gamma,
                              const ScalarFn& delta, MapDirection dir);

/// Y, Z scaled by e^{-int gamma} (forward) or e^{+int gamma} (inverse);
/// K rescaled increment-wise with the factor at the left endpoint.
SolutionProcess ito_scale_map(const SolutionProcess& sol, const ScalarFn& gamma,
                              MapDirection dir);

/// y -> e^{int_0^t gamma} y (and likewise Z, K increments); identical to the
/// inverse direction of ito_scale_map.
SolutionProcess lemma_a2_change_of_variables(const SolutionProcess& sol,
                                             const ScalarFn& gamma);

} // namespace qbsde

#endif
