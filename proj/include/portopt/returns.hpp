#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "portopt/types.hpp"

namespace portopt {

/// Daily simple returns for a set of tickers. Rows with missing or
/// non-numeric cells are dropped during loading and counted.
struct ReturnsTable {
  std::vector<std::string> dates;  // ISO-8601, ascending
  std::vector<std::string> tickers;
  Mat returns;  // T x N
  int dropped_rows = 0;
};

/// Parses `date,<ticker1>,<ticker2>,...` CSV.
ReturnsTable load_returns_csv(std::istream& in);
ReturnsTable load_returns_csv_file(const std::string& path);

struct MonthStat {
  std::string month;  // YYYY-MM
  double avg_volatility;   // cross-sectional mean of annualized per-asset std
  double avg_correlation;  // mean pairwise Pearson correlation
};

struct VolCorrResult {
  std::vector<MonthStat> months;
  double huber_slope = 0.0;
  double huber_intercept = 0.0;
  std::vector<std::string> warnings;  // skipped months and why
};

/// Per calendar month: annualized (sqrt(252)) average volatility and
/// average pairwise correlation, plus a Huber regression of correlation
/// on volatility. Months with fewer than min_rows rows or a zero-variance
/// asset are skipped with a warning.
VolCorrResult compute_vol_corr(const ReturnsTable& table, int min_rows = 15);

/// IRLS Huber fit of y on x: delta = 1.345 on standardized residuals,
/// at most 100 iterations. Returns (slope, intercept).
std::pair<double, double> huber_regression(const std::vector<double>& x,
                                           const std::vector<double>& y,
                                           double delta = 1.345,
                                           int max_iter = 100);

}  // namespace portopt
