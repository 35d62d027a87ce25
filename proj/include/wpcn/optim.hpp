#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace wpcn {

struct GoldenResult {
    double x = 0.0;
    double value = 0.0;
    int evals = 0;
};

// Golden-section search for the maximum of a unimodal f on [lo, hi].
// Terminates when the bracket width drops below tol (absolute).
template <typename F>
GoldenResult golden_section_max(F&& f, double lo, double hi, double tol,
                                int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    int evals = 2;
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
        ++evals;
    }
    GoldenResult r;
    if (f1 >= f2) {
        r.x = x1;
        r.value = f1;
    } else {
        r.x = x2;
        r.value = f2;
    }
    r.evals = evals;
    return r;
}

}  // namespace wpcn
