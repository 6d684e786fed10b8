#include "storyaudit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace storyaudit::stats {

namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Acklam's rational approximation for the probit, then one Halley step
// against the erfc-based CDF to push the error well below 1e-12.
double probit_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / 2.5066282746310002;  // sqrt(2*pi)
}

double z_for_confidence(double confidence) {
  if (!(confidence > 0.0 && confidence < 1.0))
    throw std::invalid_argument("confidence must lie in (0,1)");
  // The canonical 95% value is pinned so results do not drift with the
  // quantile implementation.
  if (confidence == 0.95) return kZ95;
  return normal_quantile(0.5 + confidence / 2.0);
}

struct WilsonParts {
  double center;
  double halfwidth;
};

WilsonParts wilson_parts(double p_hat, double n, double z) {
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p_hat + z2 / (2.0 * n)) / denom;
  const double halfwidth =
      z / denom * std::sqrt(p_hat * (1.0 - p_hat) / n + z2 / (4.0 * n * n));
  return {center, halfwidth};
}

}  // namespace

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile argument must lie in (0,1)");
  double x = probit_seed(p);
  // Halley refinement.
  for (int i = 0; i < 2; ++i) {
    const double e = normal_cdf(x) - p;
    const double u = e / normal_pdf(x);
    x = x - u / (1.0 + x * u / 2.0);
  }
  return x;
}

Interval wilson_interval(std::int64_t successes, std::int64_t n, double confidence) {
  if (n <= 0) throw std::invalid_argument("wilson_interval: n must be positive");
  if (successes < 0 || successes > n)
    throw std::invalid_argument("wilson_interval: successes out of range");
  const double z = z_for_confidence(confidence);
  const auto parts = wilson_parts(static_cast<double>(successes) / static_cast<double>(n),
                                  static_cast<double>(n), z);
  Interval out;
  out.low = std::max(0.0, parts.center - parts.halfwidth);
  out.high = std::min(1.0, parts.center + parts.halfwidth);
  out.confidence = confidence;
  return out;
}

double wilson_p_value(std::int64_t successes, std::int64_t n, double p_star) {
  if (n <= 0) throw std::invalid_argument("wilson_p_value: n must be positive");
  if (successes < 0 || successes > n)
    throw std::invalid_argument("wilson_p_value: successes out of range");
  if (!(p_star > 0.0 && p_star < 1.0))
    throw std::invalid_argument("wilson_p_value: p_star must lie in (0,1)");

  const double p_hat = static_cast<double>(successes) / static_cast<double>(n);
  if (p_hat == p_star) return 1.0;

  auto contains = [&](double alpha) {
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const auto parts = wilson_parts(p_hat, static_cast<double>(n), z);
    return p_star >= parts.center - parts.halfwidth && p_star <= parts.center + parts.halfwidth;
  };

  // The (1 - alpha) interval shrinks monotonically as alpha grows; bisect for
  // the alpha at which p_star crosses the boundary.
  double lo = 1e-12;  // widest interval the quantile can evaluate
  double hi = 1.0 - 1e-12;
  if (!contains(lo)) return 0.0;  // beyond quantile resolution
  if (contains(hi)) return 1.0;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (contains(mid))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval log_ratio_interval(std::int64_t a, std::int64_t n1, std::int64_t b, std::int64_t n2,
                            double confidence) {
  if (a <= 0 || b <= 0)
    throw std::invalid_argument("log_ratio_interval: zero counts must be smoothed by the caller");
  const double ratio = (static_cast<double>(a) / static_cast<double>(n1)) /
                       (static_cast<double>(b) / static_cast<double>(n2));
  return log_ratio_interval_at(ratio, a, n1, b, n2, confidence);
}

Interval log_ratio_interval_at(double ratio, std::int64_t a, std::int64_t n1, std::int64_t b,
                               std::int64_t n2, double confidence) {
  if (a <= 0 || b <= 0)
    throw std::invalid_argument("log_ratio_interval: zero counts must be smoothed by the caller");
  if (n1 < a || n2 < b) throw std::invalid_argument("log_ratio_interval: n smaller than count");
  const double z = z_for_confidence(confidence);
  const double se = std::sqrt(1.0 / static_cast<double>(a) - 1.0 / static_cast<double>(n1) +
                              1.0 / static_cast<double>(b) - 1.0 / static_cast<double>(n2));
  Interval out;
  out.low = ratio * std::exp(-z * se);
  out.high = ratio * std::exp(z * se);
  out.confidence = confidence;
  return out;
}

double p_from_ratio_ci(double ratio, const Interval& interval) {
  if (!(interval.high > interval.low))
    throw std::invalid_argument("p_from_ratio_ci: degenerate interval");
  if (!(ratio > 0.0)) throw std::invalid_argument("p_from_ratio_ci: ratio must be positive");
  const double se = (std::log(interval.high) - std::log(interval.low)) / (2.0 * kZ95);
  const double z = std::log(ratio) / se;
  return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::fabs(z))));
}

}  // namespace storyaudit::stats
