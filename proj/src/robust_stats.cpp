#include "authpipe/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "authpipe/errors.hpp"
#include "authpipe/rng.hpp"

namespace authpipe {

double sample_median(std::vector<double> values) {
  if (values.empty()) {
    throw ValidationError("median of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double quantile_hazen(std::vector<double> values, double p) {
  if (values.empty()) {
    throw ValidationError("quantile of an empty sample");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  const double h = p * static_cast<double>(n) + 0.5;  // 1-based position
  if (h <= 1.0) return values.front();
  if (h >= static_cast<double>(n)) return values.back();
  const std::size_t lo = static_cast<std::size_t>(h);  // floor, >= 1
  const double frac = h - static_cast<double>(lo);
  return values[lo - 1] + frac * (values[lo] - values[lo - 1]);
}

MetricSummary summarize(const std::vector<double>& values, int n_bootstrap,
                        std::uint64_t seed) {
  if (values.empty()) {
    throw ValidationError("cannot summarize an empty value list");
  }
  MetricSummary s;
  s.values = values;
  s.median = sample_median(values);
  s.n_bootstrap = n_bootstrap;
  s.seed = seed;
  s.method = "bootstrap";

  const std::size_t n = values.size();
  SplitMix64 rng(seed);
  std::vector<double> resample(n);
  std::vector<double> medians(static_cast<std::size_t>(n_bootstrap));
  for (int b = 0; b < n_bootstrap; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      resample[i] = values[rng.bounded(n)];
    }
    medians[static_cast<std::size_t>(b)] = sample_median(resample);
  }
  const double q16 = quantile_hazen(medians, 0.16);
  const double q84 = quantile_hazen(medians, 0.84);
  s.half_width = 0.5 * (q84 - q16);
  return s;
}

MetricSummary summarize_empirical(const std::vector<double>& values) {
  if (values.empty()) {
    throw ValidationError("cannot summarize an empty value list");
  }
  MetricSummary s;
  s.values = values;
  s.median = sample_median(values);
  s.n_bootstrap = 0;
  s.seed = 0;
  s.method = "empirical";
  const double q16 = quantile_hazen(values, 0.16);
  const double q84 = quantile_hazen(values, 0.84);
  s.half_width = 0.5 * (q84 - q16);
  return s;
}

std::string format_parenthesis(double median, double half_width,
                               int sig_digits) {
  if (half_width < 0.0 || !std::isfinite(half_width)) {
    throw ValidationError("half width must be non-negative and finite");
  }
  if (sig_digits < 1) {
    throw ValidationError("sig_digits must be at least 1");
  }

  char buf[64];
  if (half_width == 0.0) {
    std::snprintf(buf, sizeof(buf), "%.4f(0)", median);
    return buf;
  }

  // Decimal places so the uncertainty shows sig_digits significant digits.
  int decimals =
      sig_digits - 1 - static_cast<int>(std::floor(std::log10(half_width)));
  long long u = std::llround(half_width * std::pow(10.0, decimals));
  long long limit = 1;
  for (int i = 0; i < sig_digits; ++i) limit *= 10;
  if (u >= limit) {
    // Rounding carried into an extra digit (e.g. 0.0999 -> 0.100).
    decimals -= 1;
    u = std::llround(half_width * std::pow(10.0, decimals));
  }
  if (decimals < 0) {
    // Uncertainty at or above 10^sig_digits: fall back to integer alignment.
    const double scale = std::pow(10.0, -decimals);
    std::snprintf(buf, sizeof(buf), "%.0f(%lld)", median,
                  u * static_cast<long long>(scale));
    return buf;
  }
  std::snprintf(buf, sizeof(buf), "%.*f(%lld)", decimals, median, u);
  return buf;
}

std::pair<double, double> parse_parenthesis(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.find(')', open);
  if (open == std::string::npos || close == std::string::npos) {
    throw ValidationError("not parenthesis notation: '" + text + "'");
  }
  const std::string median_part = text.substr(0, open);
  const std::string unc_part = text.substr(open + 1, close - open - 1);
  const double median = std::stod(median_part);
  const long long u = std::stoll(unc_part);
  const auto dot = median_part.find('.');
  const int decimals =
      dot == std::string::npos
          ? 0
          : static_cast<int>(median_part.size() - dot - 1);
  const double half_width =
      static_cast<double>(u) * std::pow(10.0, -decimals);
  return {median, half_width};
}

}  // namespace authpipe
