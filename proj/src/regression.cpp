#include "qbsde/regression.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "qbsde/errors.hpp"

namespace qbsde {

RegressionResult conditional_expectation(const std::vector<double>& values,
                                         const std::vector<double>& state,
                                         const RegressionBasis& basis) {
    const std::size_t n = values.size();
    if (n == 0 || state.size() != n)
        throw InvalidParam("conditional_expectation: values/state size mismatch");
    if (basis.degree < 0)
        throw InvalidParam("conditional_expectation: degree must be nonnegative");

    int degree = basis.degree;
    // keep at least ten observations per coefficient
    while (degree > 0 && n < 10u * static_cast<std::size_t>(degree + 1)) --degree;

    double mu = 0.0;
    for (double s : state) mu += s;
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (double s : state) var += (s - mu) * (s - mu);
    double sd = std::sqrt(var / static_cast<double>(n));
    if (!(sd > 1e-300)) {
        degree = 0;
        sd = 1.0;
    }

    RegressionResult out;
    out.rank_reduced = degree != basis.degree;

    Eigen::Map<const Eigen::VectorXd> yv(values.data(), static_cast<Eigen::Index>(n));
    while (true) {
        const int cols = degree + 1;
        Eigen::MatrixXd X(static_cast<Eigen::Index>(n), cols);
        for (std::size_t i = 0; i < n; ++i) {
            const double x = (state[i] - mu) / sd;
            double pw = 1.0;
            for (int j = 0; j < cols; ++j) {
                X(static_cast<Eigen::Index>(i), j) = pw;
                pw *= x;
            }
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
        if (qr.rank() < cols && degree > 0) {
            --degree;
            out.rank_reduced = true;
            continue;
        }
        const Eigen::VectorXd coef = qr.solve(yv);
        const Eigen::VectorXd fit = X * coef;
        out.fitted.assign(fit.data(), fit.data() + fit.size());
        out.degree_used = degree;
        return out;
    }
}

} // namespace qbsde
