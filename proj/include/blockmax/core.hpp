#ifndef BLOCKMAX_CORE_HPP
#define BLOCKMAX_CORE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace blockmax {

inline constexpr const char* kVersion = "0.1.0";

/// Dense row-major matrix of doubles. Rows are observations, columns are
/// coordinates throughout the library.
class Matrix {
 public:
  Matrix() = default;
  Matrix(long rows, long cols, double fill = 0.0)
      : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Matrix: negative size");
  }

  long rows() const { return rows_; }
  long cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(long i, long j) { return a_[static_cast<size_t>(i * cols_ + j)]; }
  double operator()(long i, long j) const { return a_[static_cast<size_t>(i * cols_ + j)]; }

  const std::vector<double>& data() const { return a_; }
  std::vector<double>& data() { return a_; }

  std::vector<double> column(long j) const {
    std::vector<double> c(static_cast<size_t>(rows_));
    for (long i = 0; i < rows_; ++i) c[static_cast<size_t>(i)] = (*this)(i, j);
    return c;
  }

  bool all_finite() const {
    for (double x : a_)
      if (!std::isfinite(x)) return false;
    return true;
  }

 private:
  long rows_ = 0;
  long cols_ = 0;
  std::vector<double> a_;
};

using Point = std::vector<double>;

/// Integer part with rounding toward zero, guarded against floating-point
/// representation error in products like m*a (so 10*2.0 is 20, never 19).
inline long trunc_index(double xi) {
  const double eps = 1e-9 * std::max(1.0, std::fabs(xi));
  return xi >= 0 ? static_cast<long>(std::floor(xi + eps))
                 : static_cast<long>(std::ceil(xi - eps));
}

/// Value carrying an explicit defined/undefined flag; used where an estimator
/// can be undefined at a grid point (never a silent NaN).
struct Flagged {
  double value = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

/// Equally spaced 1-d axis lo, lo+step, ..., up to hi (inclusive within fp slack).
inline std::vector<double> axis(double lo, double hi, double step) {
  if (step <= 0) throw std::invalid_argument("axis: step must be positive");
  std::vector<double> v;
  for (long i = 0;; ++i) {
    double x = lo + static_cast<double>(i) * step;
    if (x > hi + 1e-12) break;
    v.push_back(x);
  }
  return v;
}

/// Full tensor grid axis^d as a list of points.
inline std::vector<Point> tensor_grid(const std::vector<double>& ax, int d) {
  if (d < 1) throw std::invalid_argument("tensor_grid: d must be >= 1");
  std::vector<Point> pts;
  const size_t n = ax.size();
  size_t total = 1;
  for (int j = 0; j < d; ++j) total *= n;
  pts.reserve(total);
  std::vector<size_t> idx(static_cast<size_t>(d), 0);
  for (size_t t = 0; t < total; ++t) {
    Point p(static_cast<size_t>(d));
    for (int j = 0; j < d; ++j) p[static_cast<size_t>(j)] = ax[idx[static_cast<size_t>(j)]];
    pts.push_back(std::move(p));
    for (int j = d - 1; j >= 0; --j) {
      if (++idx[static_cast<size_t>(j)] < n) break;
      idx[static_cast<size_t>(j)] = 0;
    }
  }
  return pts;
}

/// Diagonal points (u,u,...,u) for u in ax.
inline std::vector<Point> diagonal_grid(const std::vector<double>& ax, int d) {
  std::vector<Point> pts;
  pts.reserve(ax.size());
  for (double u : ax) pts.emplace_back(static_cast<size_t>(d), u);
  return pts;
}

}  // namespace blockmax

#endif  // BLOCKMAX_CORE_HPP
