#pragma once

#include <cmath>
#include <functional>

// Independent quadrature oracle for the gauge tests: recursive adaptive
// Simpson over expanding windows, deliberately sharing nothing with the
// library's Gauss-panel evaluator.

namespace clqg_test {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, 40);
}

// integral_a^inf f, windows [a+2^k, a+2^{k+1}] until they stop contributing.
inline double improper_integral(const std::function<double(double)>& f, double a,
                                double tol = 1e-10) {
    double acc = adaptive_simpson(f, a, a + 1.0, tol);
    double left = a + 1.0, width = 1.0;
    for (int k = 0; k < 64; ++k) {
        const double piece = adaptive_simpson(f, left, left + width, tol);
        acc += piece;
        left += width;
        width *= 2.0;
        if (std::abs(piece) < 1e-12 * std::abs(acc) + 1e-300) break;
    }
    return acc;
}

} // namespace clqg_test
