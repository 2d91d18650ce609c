#pragma once

#include <cstdint>

namespace qml {

struct Interval {
    double lo = 0.0;
    double hi = 1.0;
};

/// Exact (Clopper-Pearson) two-sided binomial confidence interval.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials,
                         double confidence = 0.95);

/// Quantile of the chi-squared distribution with `df` degrees of freedom.
double chi_squared_quantile(double df, double p);

} // namespace qml
