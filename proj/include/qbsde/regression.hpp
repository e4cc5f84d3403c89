#ifndef QBSDE_REGRESSION_HPP
#define QBSDE_REGRESSION_HPP

#include <vector>

#include "qbsde/solution.hpp"

namespace qbsde {

struct RegressionResult {
    std::vector<double> fitted; // one per path
    int degree_used = 0;
    bool rank_reduced = false;
};

/// Ordinary least squares of `values` on a polynomial basis of `state`,
/// returning the fitted values per path. The design matrix is standardized
/// internally (which leaves the span, hence the fit, unchanged) and solved
/// by a rank-revealing QR. A rank-deficient design falls back to a lower
/// degree, recorded in the result.
RegressionResult conditional_expectation(const std::vector<double>& values,
                                         const std::vector<double>& state,
                                         const RegressionBasis& basis);

} // namespace qbsde

#endif
