#include "qbsde/generator.hpp"

#include <algorithm>
#include <cmath>

#include "qbsde/errors.hpp"

namespace qbsde {

void GrowthEnvelope::validate() const {
    if (kappa < 0.0)
        throw InvalidParam("GrowthEnvelope: kappa must be nonnegative");
    if (!(nu > 0.5))
        throw InvalidParam("GrowthEnvelope: nu must exceed 1/2");
    if (!(b > 0.0 && b <= std::exp(-1.0)))
        throw InvalidParam("GrowthEnvelope: b must lie in (0, 1/e], got " + std::to_string(b));
    if (!(c >= b))
        throw InvalidParam("GrowthEnvelope: c must be >= b");
}

namespace {

double znorm(std::span<const double> z) {
    double s = 0.0;
    for (double v : z) s += v * v;
    return std::sqrt(s);
}

double get(const GeneratorSpec::Params& p, const std::string& key, double dflt = 0.0) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

void require_range(bool ok, const std::string& what) {
    if (!ok) throw InvalidParam("GeneratorSpec: " + what);
}

// kink bump: quadratic below the threshold c, flat above
double phi_kink(double y, double c, double eta) {
    const double tail = std::exp(-std::fabs(eta));
    return y < c ? (y - c) * (y - c) * std::fabs(eta) + tail : tail;
}

} // namespace

GeneratorSpec GeneratorSpec::builtin(const std::string& family, const Params& params) {
    if (family == "affine") {
        const double a = get(params, "a");
        const double b0 = get(params, "b0");
        return GeneratorSpec(
            Domain::real_line(),
            [a, b0](double, double y, std::span<const double>) { return a * y + b0; },
            family, params, /*z_indep=*/true);
    }
    if (family == "pure_quadratic") {
        const double gamma = get(params, "gamma", 1.0);
        return GeneratorSpec(
            Domain::real_line(),
            [gamma](double, double, std::span<const double> z) {
                const double n = znorm(z);
                return 0.5 * gamma * n * n;
            },
            family, params, gamma == 0.0);
    }
    if (family == "exp_quadratic") {
        return GeneratorSpec(
            Domain::real_line(),
            [](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                return -1.0 + std::exp(y) - 0.5 * n * n;
            },
            family, params, /*z_indep=*/false);
    }
    if (family == "affine_l_quadratic") {
        const double u0 = get(params, "u0", 1.0);
        const double f0 = get(params, "f0");
        require_range(u0 >= 0.0 && f0 >= 0.0, "affine_l_quadratic needs u0, f0 >= 0");
        return GeneratorSpec(
            Domain::real_line(),
            [u0, f0](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                return u0 * (1.0 + std::fabs(y)) + f0 * n * n;
            },
            family, params, f0 == 0.0);
    }
    if (family == "quadratic_with_bump") {
        const double gamma = get(params, "gamma", 1.0);
        const double amp = get(params, "amp", 1.0);
        const double center = get(params, "center", 1.0);
        const double width = get(params, "width", 0.5);
        require_range(width > 0.0, "quadratic_with_bump needs width > 0");
        return GeneratorSpec(
            Domain::real_line(),
            [gamma, amp, center, width](double, double, std::span<const double> z) {
                const double n = znorm(z);
                const double hat = std::max(0.0, 1.0 - std::fabs(n - center) / width);
                return 0.5 * gamma * n * n + amp * hat;
            },
            family, params, /*z_indep=*/false);
    }
    if (family == "power_quadratic") {
        const double r = get(params, "r", 1.0);
        const double coeff = get(params, "coeff", 1.0);
        require_range(r >= 0.0, "power_quadratic needs r >= 0");
        return GeneratorSpec(
            Domain::positive_half_line(),
            [r, coeff](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                return coeff * n * n / std::pow(y, r);
            },
            family, params, coeff == 0.0);
    }
    if (family == "singular_one_sided") {
        const double u0 = get(params, "u0", 1.0);
        const double b1 = get(params, "b1"), b2 = get(params, "b2"), b3 = get(params, "b3"),
                     b4 = get(params, "b4"), b5 = get(params, "b5"), b6 = get(params, "b6");
        const double k = get(params, "k", 1.0);
        const double l = get(params, "l", 2.0);
        const double r = get(params, "r", 1.0);
        const double c = get(params, "c", 1.0);
        const double eta = get(params, "eta0");
        require_range(u0 >= 0.0, "singular_one_sided needs u0 >= 0");
        require_range(b1 >= 0 && b2 >= 0 && b3 >= 0 && b4 >= 0 && b5 >= 0 && b6 >= 0,
                      "singular_one_sided needs b1..b6 >= 0");
        require_range(b2 == 0.0 || k > 0.0, "singular_one_sided needs k > 0");
        require_range(b5 == 0.0 || (l >= 1.0 && l <= 2.0),
                      "singular_one_sided needs l in [1,2]");
        require_range(b6 == 0.0 || (r > 0.0 && r <= 1.0),
                      "singular_one_sided needs r in (0,1]");
        require_range(c > 0.0, "singular_one_sided needs c > 0");
        const bool z_indep = b5 == 0.0 && b6 == 0.0;
        return GeneratorSpec(
            Domain::positive_half_line(),
            [=](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                double v = u0 * (b1 + b2 / std::pow(y, k) + b3 * y * std::log(y) +
                                 b4 * phi_kink(y, c, eta));
                if (b5 != 0.0) v += b5 * std::pow(n, l);
                if (b6 != 0.0) v += b6 / std::pow(y, r) * n * n;
                return v;
            },
            family, params, z_indep);
    }
    if (family == "singular_linear") {
        const double delta0 = get(params, "delta0");
        const double b1 = get(params, "b1"), b2 = get(params, "b2"), b3 = get(params, "b3"),
                     b4 = get(params, "b4"), b5 = get(params, "b5");
        const double k = get(params, "k", 1.0);
        const double l = get(params, "l", 2.0);
        const double r = get(params, "r", 1.0);
        const double c = get(params, "c", 1.0);
        const double eta = get(params, "eta0");
        require_range(delta0 >= 0.0, "singular_linear needs delta0 >= 0");
        require_range(b1 >= 0 && b2 >= 0 && b3 >= 0 && b4 >= 0 && b5 >= 0,
                      "singular_linear needs b1..b5 >= 0");
        require_range(b1 == 0.0 || k > 0.0, "singular_linear needs k > 0");
        require_range(b4 == 0.0 || (l >= 1.0 && l <= 2.0), "singular_linear needs l in [1,2]");
        require_range(b5 == 0.0 || (r > 0.0 && r <= 1.0), "singular_linear needs r in (0,1]");
        require_range(c > 0.0, "singular_linear needs c > 0");
        const bool z_indep = b4 == 0.0 && b5 == 0.0;
        return GeneratorSpec(
            Domain::positive_half_line(),
            [=](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                double v = delta0 + b1 / std::pow(y, k) + b2 * std::fabs(y) +
                           b3 * phi_kink(y, c, eta);
                if (b4 != 0.0) v += b4 * std::pow(n, l);
                if (b5 != 0.0) v += b5 / std::pow(y, r) * n * n;
                return v;
            },
            family, params, z_indep);
    }
    if (family == "switching_quadratic") {
        const double delta0 = get(params, "delta0");
        const double gamma0 = get(params, "gamma0");
        const double f0 = get(params, "f0");
        const double phi0 = get(params, "phi0");
        const double psi0 = get(params, "psi0");
        const double r = get(params, "r", 2.0);
        const double c = get(params, "c", 1.0);
        require_range(c > 0.0, "switching_quadratic needs c > 0");
        require_range(r > 0.0 && r <= 2.0, "switching_quadratic needs r in (0,2]");
        const bool z_indep = f0 == 0.0 && psi0 == 0.0;
        return GeneratorSpec(
            Domain::real_line(),
            [=](double, double y, std::span<const double> z) {
                const double n = znorm(z);
                const double h = std::clamp(y / c, -1.0, 1.0);
                const double tent = std::max(0.0, 1.0 - std::fabs(y) / c);
                return delta0 + h * (gamma0 * std::fabs(y) + f0 * n * n) +
                       tent * (phi0 + psi0 * std::pow(n, r));
            },
            family, params, z_indep);
    }
    throw InvalidParam("GeneratorSpec: unknown builtin family '" + family + "'");
}

GeneratorSpec GeneratorSpec::custom(Domain domain, GenFn fn, std::string name,
                                    bool z_independent) {
    return GeneratorSpec(domain, std::move(fn), std::move(name), {}, z_independent);
}

GeneratorSpec GeneratorSpec::with_envelope(GrowthEnvelope env) const {
    env.validate();
    GeneratorSpec out = *this;
    out.envelope_ = std::move(env);
    return out;
}

double eval_generator(const GeneratorSpec& spec, double t, double y,
                      std::span<const double> z) {
    spec.domain().require(y, "eval_generator");
    const double v = spec.raw(t, y, z);
    if (!std::isfinite(v))
        throw NonFinite("eval_generator: non-finite value at t=" + std::to_string(t) +
                        ", y=" + std::to_string(y));
    return v;
}

} // namespace qbsde
