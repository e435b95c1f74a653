#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aew {

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;  // unbiased sample stddev / sqrt(count)
    std::size_t count = 0;
};

MeanStderr mean_stderr(std::span<const double> values);

struct WilsonInterval {
    double lo = 0.0;
    double hi = 1.0;
};

// Wilson score interval; z defaults to the two-sided 95% point.
WilsonInterval wilson_interval(std::size_t successes, std::size_t total,
                               double z = 1.959963984540054);

// Nearest-rank quantile: the ceil(q*n)-th order statistic, q in (0,1];
// q = 0 gives the minimum.
double quantile_nearest_rank(std::vector<double> values, double q);

// OLS slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace aew
