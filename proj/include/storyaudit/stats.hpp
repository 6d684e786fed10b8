#pragma once

#include <cstdint>

namespace storyaudit::stats {

struct Interval {
  double low = 0.0;
  double high = 0.0;
  double confidence = 0.95;
};

// Two-sided normal quantile used for 95% intervals. Kept at this precision
// internally; display code rounds.
inline constexpr double kZ95 = 1.959964;

double normal_cdf(double x);

// Inverse of normal_cdf, accurate to ~1e-14 over (0,1).
double normal_quantile(double p);

// Wilson score interval for a binomial proportion.
// Throws std::invalid_argument on n == 0 or successes > n.
Interval wilson_interval(std::int64_t successes, std::int64_t n, double confidence);

// Two-tailed p-value for observing `successes`/`n` against a fixed null
// proportion p_star: the smallest alpha such that p_star lies on the boundary
// of the (1 - alpha) Wilson interval. Monotone bisection on alpha to 1e-10.
double wilson_p_value(std::int64_t successes, std::int64_t n, double p_star);

// Confidence interval for the ratio (a/n1)/(b/n2) on the log scale.
// Requires a, b > 0 (callers smooth zero counts before reaching here).
Interval log_ratio_interval(std::int64_t a, std::int64_t n1, std::int64_t b, std::int64_t n2,
                            double confidence);

// Same interval recentered on an externally computed ratio estimate. The
// standard error comes from the counts; the ratio may carry fractional mass
// that the integer counts approximate.
Interval log_ratio_interval_at(double ratio, std::int64_t a, std::int64_t n1, std::int64_t b,
                               std::int64_t n2, double confidence);

// Two-tailed p-value for a ratio given its 95% log-scale interval: the
// standard error is recovered from the interval endpoints and the z statistic
// formed on the log of the ratio.
double p_from_ratio_ci(double ratio, const Interval& interval);

}  // namespace storyaudit::stats
