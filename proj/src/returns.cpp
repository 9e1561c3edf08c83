#include "portopt/returns.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace portopt {
namespace {

constexpr double kAnnualization = 15.874507866387544;  // sqrt(252)

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool parse_double(const std::string& s, double* out) {
  if (s.empty()) return false;
  try {
    std::size_t pos = 0;
    *out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(*out);
  } catch (...) {
    return false;
  }
}

double sample_std(const Eigen::Ref<const Vec>& x) {
  const double mean = x.mean();
  return std::sqrt((x.array() - mean).square().sum() / (x.size() - 1));
}

double pearson(const Eigen::Ref<const Vec>& x, const Eigen::Ref<const Vec>& y) {
  const double mx = x.mean(), my = y.mean();
  const Eigen::ArrayXd dx = x.array() - mx, dy = y.array() - my;
  const double denom = std::sqrt(dx.square().sum() * dy.square().sum());
  if (denom == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return (dx * dy).sum() / denom;
}

}  // namespace

ReturnsTable load_returns_csv(std::istream& in) {
  ReturnsTable table;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("returns CSV is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "date") {
    throw SchemaError("returns CSV header must be date,<ticker1>,<ticker2>,...");
  }
  table.tickers.assign(header.begin() + 1, header.end());
  const std::size_t n = table.tickers.size();

  std::vector<std::string> dates;
  std::vector<Vec> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != n + 1) {
      ++table.dropped_rows;
      continue;
    }
    Vec row(n);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      ok = parse_double(cells[i + 1], &row[i]);
    }
    if (!ok || cells[0].size() < 7) {
      ++table.dropped_rows;
      continue;
    }
    dates.push_back(cells[0]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InsufficientDataError("no valid return rows");
  table.dates = std::move(dates);
  table.returns = Mat(rows.size(), n);
  for (std::size_t r = 0; r < rows.size(); ++r) table.returns.row(r) = rows[r];
  return table;
}

ReturnsTable load_returns_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open file: " + path);
  return load_returns_csv(in);
}

VolCorrResult compute_vol_corr(const ReturnsTable& table, int min_rows) {
  if (table.returns.rows() < 21) {
    throw InsufficientDataError("need at least 21 rows for monthly aggregation");
  }
  const int n = static_cast<int>(table.tickers.size());
  if (n < 2) throw InsufficientDataError("need at least two tickers");

  std::map<std::string, std::vector<int>> by_month;  // YYYY-MM -> row indices
  for (std::size_t r = 0; r < table.dates.size(); ++r) {
    by_month[table.dates[r].substr(0, 7)].push_back(static_cast<int>(r));
  }

  VolCorrResult out;
  std::vector<double> vols, corrs;
  for (const auto& [month, idx] : by_month) {
    if (static_cast<int>(idx.size()) < min_rows) {
      out.warnings.push_back(month + ": InsufficientData (" +
                             std::to_string(idx.size()) + " rows)");
      continue;
    }
    Mat block(idx.size(), n);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      block.row(r) = table.returns.row(idx[r]);
    }
    double vol_sum = 0.0;
    bool degenerate = false;
    for (int c = 0; c < n; ++c) {
      const double sd = sample_std(block.col(c));
      if (sd == 0.0) degenerate = true;
      vol_sum += sd * kAnnualization;
    }
    if (degenerate) {
      out.warnings.push_back(month + ": ZeroVariance");
      continue;
    }
    double corr_sum = 0.0;
    int pairs = 0;
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        corr_sum += pearson(block.col(i), block.col(j));
        ++pairs;
      }
    }
    MonthStat stat{month, vol_sum / n, corr_sum / pairs};
    out.months.push_back(stat);
    vols.push_back(stat.avg_volatility);
    corrs.push_back(stat.avg_correlation);
  }
  if (vols.size() >= 2) {
    std::tie(out.huber_slope, out.huber_intercept) = huber_regression(vols, corrs);
  }
  return out;
}

std::pair<double, double> huber_regression(const std::vector<double>& x,
                                           const std::vector<double>& y,
                                           double delta, int max_iter) {
  if (x.size() != y.size() || x.size() < 2) {
    throw InsufficientDataError("huber_regression needs at least two points");
  }
  const int n = static_cast<int>(x.size());
  double slope = 0.0, intercept = 0.0;
  std::vector<double> w(n, 1.0), resid(n);
  for (int it = 0; it < max_iter; ++it) {
    // Weighted least squares step.
    double sw = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
      sw += w[i];
      sx += w[i] * x[i];
      sy += w[i] * y[i];
      sxx += w[i] * x[i] * x[i];
      sxy += w[i] * x[i] * y[i];
    }
    const double det = sw * sxx - sx * sx;
    if (std::abs(det) < 1e-14 * std::max(1.0, sxx)) break;
    const double new_slope = (sw * sxy - sx * sy) / det;
    const double new_intercept = (sy - new_slope * sx) / sw;
    const bool converged = std::abs(new_slope - slope) < 1e-12 &&
                           std::abs(new_intercept - intercept) < 1e-12;
    slope = new_slope;
    intercept = new_intercept;
    if (converged && it > 0) break;

    for (int i = 0; i < n; ++i) resid[i] = y[i] - slope * x[i] - intercept;
    // Robust scale: normalized median absolute deviation.
    std::vector<double> ar(n);
    for (int i = 0; i < n; ++i) ar[i] = std::abs(resid[i]);
    std::nth_element(ar.begin(), ar.begin() + n / 2, ar.end());
    double scale = ar[n / 2] / 0.6744897501960817;
    if (scale <= 0.0) scale = 1e-12;
    for (int i = 0; i < n; ++i) {
      const double r = std::abs(resid[i]) / scale;
      w[i] = r <= delta ? 1.0 : delta / r;
    }
  }
  return {slope, intercept};
}

}  // namespace portopt
