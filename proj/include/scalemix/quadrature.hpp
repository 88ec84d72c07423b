#pragma once

#include <cstddef>
#include <utility>

namespace scalemix {

// Composite Simpson over [a, b]; `panels` is rounded up to the next even
// count. Works for real- or complex-valued integrands.
template <typename F>
auto composite_simpson(F&& f, double a, double b, std::size_t panels) {
    if (panels < 2) panels = 2;
    if (panels % 2 != 0) ++panels;
    const double h = (b - a) / static_cast<double>(panels);
    auto acc = f(a) + f(b);
    for (std::size_t j = 1; j < panels; ++j) {
        const double x = a + h * static_cast<double>(j);
        acc += (j % 2 == 1 ? 4.0 : 2.0) * f(x);
    }
    return acc * (h / 3.0);
}

namespace detail {

template <typename F, typename V>
V adaptive_simpson_rec(F& f, double a, double m, double b, V fa, V fm, V fb,
                       V whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const V flm = f(lm);
    const V frm = f(rm);
    const V left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const V right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    using std::abs;
    if (depth <= 0 || abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, lm, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson_rec(f, m, rm, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with absolute tolerance.
template <typename F>
auto adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 40) {
    const double m = 0.5 * (a + b);
    auto fa = f(a);
    auto fm = f(m);
    auto fb = f(b);
    auto whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace scalemix
