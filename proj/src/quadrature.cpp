#include "qbsde/quadrature.hpp"

#include <cmath>
#include <cstdlib>

#include "qbsde/errors.hpp"

namespace qbsde {

double simpson(const Real1DFn& f, double a, double b, std::size_t panels) {
    if (a == b) return 0.0;
    if (panels % 2 == 1) ++panels;
    if (panels < 2) panels = 2;
    const double h = (b - a) / static_cast<double>(panels);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < panels; ++i) {
        const double x = a + h * static_cast<double>(i);
        sum += f(x) * ((i % 2 == 1) ? 4.0 : 2.0);
    }
    return sum * h / 3.0;
}

namespace {

struct AdaptiveState {
    const Real1DFn& f;
    double rel_tol;
    double abs_tol;
    std::size_t evals = 0;
    std::size_t max_evals;

    double eval(double x) {
        if (++evals > max_evals)
            throw QuadratureFailure("adaptive_simpson: evaluation budget exhausted");
        return f(x);
    }
};

double simpson_panel(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adapt(AdaptiveState& st, double a, double b, double fa, double fm, double fb,
             double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.eval(lm);
    const double frm = st.eval(rm);
    const double left = simpson_panel(fa, flm, fm, a, m);
    const double right = simpson_panel(fm, frm, fb, m, b);
    const double delta = left + right - whole;
    const double tol = st.abs_tol + st.rel_tol * std::fabs(left + right);
    if (depth > 60 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adapt(st, a, m, fa, flm, fm, left, depth + 1) +
           adapt(st, m, b, fm, frm, fb, right, depth + 1);
}

} // namespace

double adaptive_simpson(const Real1DFn& f, double a, double b, double rel_tol,
                        double abs_tol, std::size_t max_evals) {
    if (a == b) return 0.0;
    double sign = 1.0;
    if (a > b) {
        std::swap(a, b);
        sign = -1.0;
    }
    AdaptiveState st{f, rel_tol, abs_tol, 0, max_evals};
    const double fa = st.eval(a);
    const double m = 0.5 * (a + b);
    const double fm = st.eval(m);
    const double fb = st.eval(b);
    const double whole = simpson_panel(fa, fm, fb, a, b);
    return sign * adapt(st, a, b, fa, fm, fb, whole, 0);
}

std::vector<double> cumulative_integrals(const Real1DFn& f, const TimeGrid& grid,
                                         std::size_t panels_per_step) {
    std::vector<double> out(grid.nodes(), 0.0);
    for (std::size_t i = 0; i + 1 < grid.nodes(); ++i) {
        out[i + 1] = out[i] + simpson(f, grid.node(i), grid.node(i + 1), panels_per_step);
    }
    return out;
}

} // namespace qbsde
