#include "qbsde/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "qbsde/errors.hpp"
#include "qbsde/quadrature.hpp"

namespace qbsde {

namespace {

constexpr std::size_t kInnerNodes = 2048;
constexpr double kBoundaryOffset = 1e-8;
constexpr std::size_t kOuterBudget = 100000;
constexpr std::size_t kInnerCellBudget = 4096;

double pull_off_walls(double x, const Domain& d, double span) {
    const double off = kBoundaryOffset * span;
    if (d.bounded_below()) x = std::max(x, d.lower() + off);
    if (d.bounded_above()) x = std::min(x, d.upper() - off);
    return x;
}

} // namespace

UPhiTransform::UPhiTransform(Domain domain, ScalarFn phi, double alpha, double range_lo,
                             double range_hi)
    : domain_(domain), phi_(std::move(phi)), alpha_(alpha) {
    if (!domain_.contains(alpha_))
        throw InvalidParam("UPhiTransform: alpha must lie in the domain");
    if (!(range_lo < range_hi))
        throw InvalidParam("UPhiTransform: empty working range");
    const double span = range_hi - range_lo;
    range_lo_ = pull_off_walls(std::min(range_lo, alpha_), domain_, span);
    range_hi_ = pull_off_walls(std::max(range_hi, alpha_), domain_, span);
    if (!phi_) {
        form_ = ClosedForm::Zero;
        return;
    }
    // Inner cache: exact nodal values of int_alpha^x phi on a uniform
    // monotone grid; within-cell values are refined locally at evaluation
    // time from the nearest node, so the cache never limits accuracy.
    nodes_.resize(kInnerNodes);
    inner_.resize(kInnerNodes);
    const double h = (range_hi_ - range_lo_) / static_cast<double>(kInnerNodes - 1);
    for (std::size_t j = 0; j < kInnerNodes; ++j)
        nodes_[j] = range_lo_ + h * static_cast<double>(j);
    // anchor: integrate from alpha to the first node, then cell by cell
    std::size_t ja = static_cast<std::size_t>(
        std::clamp((alpha_ - range_lo_) / h, 0.0, static_cast<double>(kInnerNodes - 1)));
    inner_[ja] = adaptive_simpson(phi_.fn, alpha_, nodes_[ja], 1e-12, 1e-14, kInnerCellBudget);
    for (std::size_t j = ja + 1; j < kInnerNodes; ++j)
        inner_[j] = inner_[j - 1] +
                    adaptive_simpson(phi_.fn, nodes_[j - 1], nodes_[j], 1e-12, 1e-14,
                                     kInnerCellBudget);
    for (std::size_t j = ja; j > 0; --j)
        inner_[j - 1] = inner_[j] -
                        adaptive_simpson(phi_.fn, nodes_[j - 1], nodes_[j], 1e-12, 1e-14,
                                         kInnerCellBudget);
}

UPhiTransform UPhiTransform::zero(Domain domain, double alpha) {
    UPhiTransform t(domain, ScalarFn{}, alpha, alpha - 1.0, alpha + 1.0);
    t.form_ = ClosedForm::Zero;
    t.phi_ = const_fn(0.0);
    return t;
}

UPhiTransform UPhiTransform::constant_beta(Domain domain, double beta, double alpha) {
    if (beta <= 0.0)
        throw InvalidParam("UPhiTransform::constant_beta: beta must be positive");
    UPhiTransform t(domain, const_fn(beta), alpha, alpha - 1.0, alpha + 1.0);
    t.form_ = ClosedForm::ConstantBeta;
    t.param_ = beta;
    return t;
}

UPhiTransform UPhiTransform::power_over_y(double beta, double alpha) {
    if (alpha <= 0.0)
        throw InvalidParam("UPhiTransform::power_over_y: alpha must be positive");
    if (beta == -0.5)
        throw InvalidParam("UPhiTransform::power_over_y: beta = -1/2 is the log case");
    ScalarFn phi = make_fn([beta](double y) { return beta / y; }, "beta/y");
    UPhiTransform t(Domain::positive_half_line(), phi, alpha, alpha * 0.5, alpha * 2.0);
    t.form_ = ClosedForm::PowerOverY;
    t.param_ = beta;
    return t;
}

UPhiTransform UPhiTransform::negative_nu_over_y(double nu, double alpha) {
    if (!(nu > 0.5))
        throw InvalidParam("UPhiTransform::negative_nu_over_y: nu must exceed 1/2");
    if (alpha >= 0.0)
        throw InvalidParam("UPhiTransform::negative_nu_over_y: alpha must be negative");
    ScalarFn phi = make_fn([nu](double y) { return -nu / y; }, "-nu/y");
    UPhiTransform t(Domain::open_interval(-std::numeric_limits<double>::infinity(), 0.0),
                    phi, alpha, alpha * 2.0, alpha * 0.5);
    t.form_ = ClosedForm::NegativeNuOverY;
    t.param_ = nu;
    return t;
}

double UPhiTransform::closed(double y) const {
    switch (form_) {
    case ClosedForm::Zero:
        return y - alpha_;
    case ClosedForm::ConstantBeta: {
        const double b = param_;
        return (std::exp(2.0 * b * (y - alpha_)) - 1.0) / (2.0 * b);
    }
    case ClosedForm::PowerOverY: {
        const double b = param_;
        return alpha_ / (1.0 + 2.0 * b) * (std::pow(y / alpha_, 1.0 + 2.0 * b) - 1.0);
    }
    case ClosedForm::NegativeNuOverY: {
        const double nu = param_;
        return alpha_ / (1.0 - 2.0 * nu) * (std::pow(y / alpha_, 1.0 - 2.0 * nu) - 1.0);
    }
    default:
        throw InvalidParam("UPhiTransform: no closed form tagged");
    }
}

double UPhiTransform::inner_integral(double x) const {
    if (nodes_.empty()) {
        // closed-form-only instance evaluated through the quadrature path
        return adaptive_simpson(phi_.fn, alpha_, x, 1e-12, 1e-14, kInnerCellBudget);
    }
    if (x <= nodes_.front())
        return inner_.front() +
               adaptive_simpson(phi_.fn, nodes_.front(), x, 1e-12, 1e-14, kInnerCellBudget);
    if (x >= nodes_.back())
        return inner_.back() +
               adaptive_simpson(phi_.fn, nodes_.back(), x, 1e-12, 1e-14, kInnerCellBudget);
    const double h = (range_hi_ - range_lo_) / static_cast<double>(nodes_.size() - 1);
    const std::size_t j = static_cast<std::size_t>((x - range_lo_) / h);
    return inner_[j] + adaptive_simpson(phi_.fn, nodes_[j], x, 1e-12, 1e-14, kInnerCellBudget);
}

double UPhiTransform::operator()(double y) const {
    domain_.require(y, "u_phi");
    if (form_ != ClosedForm::None) {
        const double v = closed(y);
        if (!std::isfinite(v)) throw NonFinite("u_phi: closed form overflow");
        return v;
    }
    return quadrature(y);
}

double UPhiTransform::quadrature(double y) const {
    domain_.require(y, "u_phi");
    auto weight = [this](double x) { return std::exp(2.0 * inner_integral(x)); };
    return adaptive_simpson(weight, alpha_, y, 1e-11, 1e-14, kOuterBudget);
}

double UPhiTransform::inverse(double v) const {
    double lo = range_lo_;
    double hi = range_hi_;
    const double tol = 1e-10 * (1.0 + std::fabs(v));
    double u_lo = (*this)(lo);
    double u_hi = (*this)(hi);
    if (v < u_lo - tol || v > u_hi + tol)
        throw OutOfRange("u_phi_inverse: value outside the transform range [" +
                         std::to_string(u_lo) + "," + std::to_string(u_hi) + "]");
    double mid = 0.5 * (lo + hi);
    for (int iter = 0; iter < 200; ++iter) {
        mid = 0.5 * (lo + hi);
        const double um = (*this)(mid);
        if (std::fabs(um - v) <= tol) return mid;
        if (um < v)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

double lambda_weight(const LambdaWeight& w, double t, double zeta) {
    const double gamma_int = w.gamma ? simpson(w.gamma.fn, 0.0, t, 256) : 0.0;
    const double delta_int = w.delta ? simpson(w.delta.fn, 0.0, t, 256) : 0.0;
    return std::exp(gamma_int) * (std::fabs(zeta) + delta_int);
}

GridLambda::GridLambda(const LambdaWeight& w, const TimeGrid& grid) {
    auto zero = const_fn(0.0);
    auto gs = cumulative_integrals((w.gamma ? w.gamma : zero).fn, grid);
    delta_int_ = cumulative_integrals((w.delta ? w.delta : zero).fn, grid);
    exp_gamma_.resize(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) exp_gamma_[i] = std::exp(gs[i]);
}

double scaling_identity_residual(const ScalarFn& f, double q, double alpha, double x,
                                 const Domain& domain) {
    if (q < 1.0) throw InvalidParam("scaling_identity_residual: q must be >= 1");
    for (double pt : {x, alpha, q * alpha, q * x})
        domain.require(pt, "scaling_identity_residual");
    const double lo = std::min({alpha, x, q * alpha, q * x});
    const double hi = std::max({alpha, x, q * alpha, q * x});
    UPhiTransform u_f(domain, f, alpha, lo, hi);
    ScalarFn fq = make_fn([&f, q](double z) { return q * f(q * z); }, f.desc + "^q");
    UPhiTransform u_fq(domain, fq, alpha, std::min(alpha, x), std::max(alpha, x));
    const double b1 = q * std::exp(2.0 * adaptive_simpson(f.fn, alpha, q * alpha, 1e-12,
                                                          1e-14, kOuterBudget));
    const double b2 = u_f(q * alpha);
    return u_f(q * x) - (b1 * u_fq(x) + b2);
}

namespace {

SolutionProcess scale_by_nodes(const SolutionProcess& sol, const std::vector<double>& factor) {
    SolutionProcess out(sol.grid(), sol.n_paths(), sol.dim(), sol.has_k());
    out.meta = sol.meta;
    const std::size_t M = sol.grid().steps();
    for (std::size_t p = 0; p < sol.n_paths(); ++p) {
        for (std::size_t i = 0; i <= M; ++i) out.y(p, i) = sol.y(p, i) * factor[i];
        for (std::size_t i = 0; i < M; ++i)
            for (std::size_t k = 0; k < sol.dim(); ++k)
                out.z(p, i, k) = sol.z(p, i, k) * factor[i];
        if (sol.has_k()) {
            // discrete Stieltjes: increments weighted at the left endpoint
            out.k_at(p, 0) = 0.0;
            for (std::size_t i = 0; i < M; ++i) {
                const double dk = sol.k_at(p, i + 1) - sol.k_at(p, i);
                out.k_at(p, i + 1) = out.k_at(p, i) + dk * factor[i];
            }
        }
    }
    return out;
}

} // namespace

SolutionProcess ito_shift_map(const SolutionProcess& sol, const ScalarFn& gamma,
                              const ScalarFn& delta, MapDirection dir) {
    auto zero = const_fn(0.0);
    auto gs = cumulative_integrals((gamma ? gamma : zero).fn, sol.grid());
    auto ds = cumulative_integrals((delta ? delta : zero).fn, sol.grid());
    const double sign = dir == MapDirection::Forward ? -1.0 : 1.0;
    SolutionProcess out = sol;
    for (std::size_t p = 0; p < sol.n_paths(); ++p)
        for (std::size_t i = 0; i < sol.grid().nodes(); ++i)
            out.y(p, i) = sol.y(p, i) + sign * std::exp(gs[i]) * ds[i];
    return out;
}

SolutionProcess ito_scale_map(const SolutionProcess& sol, const ScalarFn& gamma,
                              MapDirection dir) {
    auto zero = const_fn(0.0);
    auto gs = cumulative_integrals((gamma ? gamma : zero).fn, sol.grid());
    const double sign = dir == MapDirection::Forward ? -1.0 : 1.0;
    std::vector<double> factor(gs.size());
    for (std::size_t i = 0; i < gs.size(); ++i) factor[i] = std::exp(sign * gs[i]);
    return scale_by_nodes(sol, factor);
}

SolutionProcess lemma_a2_change_of_variables(const SolutionProcess& sol,
                                             const ScalarFn& gamma) {
    return ito_scale_map(sol, gamma, MapDirection::Inverse);
}

} // namespace qbsde
