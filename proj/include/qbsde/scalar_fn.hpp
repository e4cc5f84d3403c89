#ifndef QBSDE_SCALAR_FN_HPP
#define QBSDE_SCALAR_FN_HPP

#include <cmath>
#include <functional>
#include <string>
#include <utility>

namespace qbsde {

/// A scalar function of one real argument with a short description so that
/// reports and configs can name it. Used for the envelope coefficients
/// u(t), delta(t), gamma(t), the class-L candidate l(y) and the quadratic
/// weight f(y).
struct ScalarFn {
    std::function<double(double)> fn;
    std::string desc;

    double operator()(double x) const { return fn(x); }
    explicit operator bool() const { return static_cast<bool>(fn); }
};

inline ScalarFn const_fn(double v) {
    return ScalarFn{[v](double) { return v; }, "const(" + std::to_string(v) + ")"};
}

inline ScalarFn linear_fn(double a, double b) {
    return ScalarFn{[a, b](double x) { return a + b * x; },
                    "linear(" + std::to_string(a) + "," + std::to_string(b) + ")"};
}

/// 1 + |y|, the workhorse class-L candidate.
inline ScalarFn affine_abs_fn(double scale = 1.0) {
    return ScalarFn{[scale](double y) { return scale * (1.0 + std::fabs(y)); },
                    "affine_abs(" + std::to_string(scale) + ")"};
}

/// 1 + y^2; grows too fast to be class L, used as a counterexample envelope.
inline ScalarFn quadratic_abs_fn() {
    return ScalarFn{[](double y) { return 1.0 + y * y; }, "quadratic_abs"};
}

inline ScalarFn make_fn(std::function<double(double)> f, std::string desc) {
    return ScalarFn{std::move(f), std::move(desc)};
}

} // namespace qbsde

#endif
