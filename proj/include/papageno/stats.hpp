#pragma once

#include <cstdint>

namespace papageno::stats {

struct Interval {
    double low = 0.0;
    double high = 0.0;

    friend bool operator==(const Interval&, const Interval&) = default;
};

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// x such that I_x(a, b) = p, by bisection to |hi - lo| <= tol.
double inverse_incomplete_beta(double a, double b, double p, double tol = 1e-12);

// Exact (Clopper-Pearson) interval for `successes` out of `trials`.
// Throws papageno::Error unless 0 <= successes <= trials and trials >= 1.
Interval clopper_pearson(std::uint64_t successes, std::uint64_t trials, double confidence = 0.95);

}  // namespace papageno::stats
