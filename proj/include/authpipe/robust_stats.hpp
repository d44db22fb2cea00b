#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace authpipe {

struct MetricSummary {
  std::vector<double> values;
  double median = 0.0;
  double half_width = 0.0;
  int n_bootstrap = 0;  // 0 when method == "empirical"
  std::uint64_t seed = 0;
  std::string method;  // "bootstrap" or "empirical"

  bool operator==(const MetricSummary&) const = default;
};

double sample_median(std::vector<double> values);

// Hazen quantile: position p*n + 0.5 in the 1-based sorted order, linear
// interpolation between neighbours, clamped at the extremes.
double quantile_hazen(std::vector<double> values, double p);

// Median with symmetrized 68% half-width from a bootstrap of the median:
// resample with replacement n_bootstrap times, take each resample's median,
// half_width = (q84 - q16) / 2 of those medians.
MetricSummary summarize(const std::vector<double>& values,
                        int n_bootstrap = 10000, std::uint64_t seed = 0);

// Same statistic from the raw values' own 16/84 quantiles instead of a
// bootstrap.
MetricSummary summarize_empirical(const std::vector<double>& values);

// Parenthesis notation, e.g. (0.710, 0.046) -> "0.710(46)". The uncertainty
// keeps sig_digits significant digits and the median is rounded to align
// with its last digit; zero uncertainty renders as "(0)" with four decimals.
std::string format_parenthesis(double median, double half_width,
                               int sig_digits = 2);

// Inverse of format_parenthesis at printed precision.
std::pair<double, double> parse_parenthesis(const std::string& text);

}  // namespace authpipe
