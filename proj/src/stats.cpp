#include "qml/stats.hpp"

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/distributions/chi_squared.hpp>

#include "qml/errors.hpp"

namespace qml {

Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence)
{
    if (trials == 0 || successes > trials)
        throw InvalidParameter("clopper_pearson: need 0 <= successes <= trials, trials > 0");
    if (!(confidence > 0.0 && confidence < 1.0))
        throw InvalidParameter("clopper_pearson: confidence must be in (0, 1)");
    using boost::math::binomial_distribution;
    const double tail = (1.0 - confidence) / 2.0;
    Interval ci;
    ci.lo = binomial_distribution<>::find_lower_bound_on_p(
        static_cast<double>(trials), static_cast<double>(successes), tail);
    ci.hi = binomial_distribution<>::find_upper_bound_on_p(
        static_cast<double>(trials), static_cast<double>(successes), tail);
    return ci;
}

double chi_squared_quantile(double df, double p)
{
    if (!(df > 0.0) || !(p > 0.0 && p < 1.0))
        throw InvalidParameter("chi_squared_quantile: parameters out of range");
    return boost::math::quantile(boost::math::chi_squared_distribution<>(df), p);
}

} // namespace qml
