#ifndef QBSDE_GENERATOR_HPP
#define QBSDE_GENERATOR_HPP

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "qbsde/domain.hpp"
#include "qbsde/scalar_fn.hpp"

namespace qbsde {

/// Declared growth-envelope data for the one-sided growth checks.
/// u, delta, gamma are deterministic functions of t; l is the class-L
/// candidate; f weights the quadratic z-term.
struct GrowthEnvelope {
    ScalarFn u = const_fn(0.0);
    ScalarFn l = affine_abs_fn();
    ScalarFn f = const_fn(0.0);
    ScalarFn delta = const_fn(0.0);
    ScalarFn gamma = const_fn(0.0);
    double kappa = 0.0;
    double nu = 1.0;
    double b = 0.3;
    double c = 1.0;

    /// Throws InvalidParam when kappa < 0, nu <= 1/2, b outside (0, 1/e]
    /// or c < b.
    void validate() const;
};

using GenFn = std::function<double(double t, double y, std::span<const double> z)>;

/// A driver g(t, y, z) on a domain, either one of the builtin families or a
/// user-supplied evaluation rule. Immutable after construction.
class GeneratorSpec {
public:
    using Params = std::map<std::string, double>;

    /// Builtin families:
    ///   affine              g = a*y + b0                                (D = R)
    ///   pure_quadratic      g = (gamma/2)|z|^2                          (D = R)
    ///   exp_quadratic       g = -1 + e^y - |z|^2/2                      (D = R)
    ///   affine_l_quadratic  g = u0*(1+|y|) + f0*|z|^2                   (D = R)
    ///   quadratic_with_bump g = (gamma/2)|z|^2 + amp*hat(| |z|-center |) (D = R)
    ///   power_quadratic     g = coeff*|z|^2/y^r                         (D = (0,inf))
    ///   singular_one_sided  g = u0*(b1 + b2/y^k + b3*y*ln y + b4*phi(t,y))
    ///                           + b5*|z|^l + (b6/y^r)|z|^2              (D = (0,inf))
    ///   singular_linear     g = delta0 + b1/y^k + b2*|y| + b3*phi(t,y)
    ///                           + b4*|z|^l + (b5/y^r)|z|^2              (D = (0,inf))
    ///   switching_quadratic g = delta0 + h(y)(gamma0*|y| + f0*|z|^2)
    ///                           + k(y)(phi0 + psi0*|z|^r)               (D = R)
    /// phi(t,y) is the kink bump (y-c)^2*|eta0| + exp(-|eta0|) below c and
    /// exp(-|eta0|) above; h is a clamped ramp, k a tent on (-c, c).
    static GeneratorSpec builtin(const std::string& family, const Params& params);

    static GeneratorSpec custom(Domain domain, GenFn fn, std::string name,
                                bool z_independent = false);

    const Domain& domain() const noexcept { return domain_; }
    const std::string& family() const noexcept { return family_; }
    const Params& params() const noexcept { return params_; }
    bool z_independent() const noexcept { return z_independent_; }

    const std::optional<GrowthEnvelope>& envelope() const noexcept { return envelope_; }
    GeneratorSpec with_envelope(GrowthEnvelope env) const;

    /// Raw evaluation without domain or finiteness checks.
    double raw(double t, double y, std::span<const double> z) const {
        return fn_(t, y, z);
    }

private:
    GeneratorSpec(Domain d, GenFn fn, std::string family, Params params, bool z_indep)
        : domain_(d), fn_(std::move(fn)), family_(std::move(family)),
          params_(std::move(params)), z_independent_(z_indep) {}

    Domain domain_ = Domain::real_line();
    GenFn fn_;
    std::string family_;
    Params params_;
    bool z_independent_ = false;
    std::optional<GrowthEnvelope> envelope_;
};

/// Checked evaluation: y must lie in the domain and the value must be finite.
double eval_generator(const GeneratorSpec& spec, double t, double y,
                      std::span<const double> z);

inline double eval_generator(const GeneratorSpec& spec, double t, double y, double z_scalar) {
    return eval_generator(spec, t, y, std::span<const double>(&z_scalar, 1));
}

} // namespace qbsde

#endif
