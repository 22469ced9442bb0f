#ifndef WCHARGE_LINE_SEARCH_HPP
#define WCHARGE_LINE_SEARCH_HPP

#include <cmath>
#include <utility>

namespace wcharge {

/// Golden-section search for the maximum of a unimodal f on [a, b].
/// Returns {argmax, f(argmax)}.
template <class F>
std::pair<double, double> golden_section_max(F&& f, double a, double b, double tol = 1e-12,
                                             int max_iter = 200) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < max_iter && b - a > tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    const double x = 0.5 * (a + b);
    return {x, f(x)};
}

}  // namespace wcharge

#endif  // WCHARGE_LINE_SEARCH_HPP
