#include "blockmax/blocks.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace blockmax {

namespace {

void check_block_size(const Matrix& data, int m) {
  if (data.rows() < 1 || data.cols() < 1)
    throw std::invalid_argument("block maxima: empty data");
  if (m < 1 || m > data.rows())
    throw std::invalid_argument("block maxima: block size " + std::to_string(m) +
                                " out of range [1," + std::to_string(data.rows()) + "]");
}

}  // namespace

BlockMaximaPanel sliding_maxima(const Matrix& data, int m) {
  check_block_size(data, m);
  const long n = data.rows(), d = data.cols(), k = n - m + 1;
  BlockMaximaPanel panel{m, BlockScheme::sliding, Matrix(k, d)};
  // Monotone deque holding candidate row indices per column: O(n) per column.
  std::deque<long> q;
  for (long j = 0; j < d; ++j) {
    q.clear();
    for (long i = 0; i < n; ++i) {
      while (!q.empty() && data(q.back(), j) <= data(i, j)) q.pop_back();
      q.push_back(i);
      if (q.front() <= i - m) q.pop_front();
      if (i >= m - 1) panel.maxima(i - m + 1, j) = data(q.front(), j);
    }
  }
  return panel;
}

BlockMaximaPanel disjoint_maxima(const Matrix& data, int m) {
  check_block_size(data, m);
  const long n = data.rows(), d = data.cols(), k = n / m;
  BlockMaximaPanel panel{m, BlockScheme::disjoint, Matrix(k, d)};
  for (long h = 0; h < k; ++h) {
    for (long j = 0; j < d; ++j) {
      double mx = data(h * m, j);
      for (long t = h * m + 1; t < (h + 1) * m; ++t) mx = std::max(mx, data(t, j));
      panel.maxima(h, j) = mx;
    }
  }
  return panel;
}

PseudoObservations pseudo_observations(const BlockMaximaPanel& panel) {
  const Matrix& mx = panel.maxima;
  if (mx.rows() < 1) throw std::invalid_argument("pseudo_observations: empty panel");
  const long k = mx.rows(), d = mx.cols();
  PseudoObservations p;
  p.rows = k;
  p.cols = d;
  p.ranks.resize(static_cast<size_t>(k * d));
  p.u_hat = Matrix(k, d);
  std::vector<double> sorted(static_cast<size_t>(k));
  for (long j = 0; j < d; ++j) {
    for (long i = 0; i < k; ++i) sorted[static_cast<size_t>(i)] = mx(i, j);
    std::sort(sorted.begin(), sorted.end());
    for (long i = 0; i < k; ++i) {
      // maximal rank: count of column entries <= this one
      const auto it = std::upper_bound(sorted.begin(), sorted.end(), mx(i, j));
      const int r = static_cast<int>(it - sorted.begin());
      p.ranks[static_cast<size_t>(i * d + j)] = r;
      p.u_hat(i, j) = static_cast<double>(r) / static_cast<double>(k);
    }
  }
  return p;
}

double empirical_copula(const PseudoObservations& pseudo, const Point& u) {
  if (static_cast<long>(u.size()) != pseudo.cols)
    throw std::invalid_argument("empirical_copula: point dimension mismatch");
  long count = 0;
  for (long i = 0; i < pseudo.rows; ++i) {
    bool dominated = true;
    for (long j = 0; j < pseudo.cols; ++j) {
      if (!(pseudo.u_hat(i, j) <= u[static_cast<size_t>(j)])) {
        dominated = false;
        break;
      }
    }
    count += dominated;
  }
  return static_cast<double>(count) / static_cast<double>(pseudo.rows);
}

namespace {

// rank threshold T(b) in column j: largest r in 0..k with r/k <= b, computed
// with the same double comparisons as direct counting so batch == direct.
int rank_threshold(double b, long k) {
  if (b >= 1.0) return static_cast<int>(k);
  if (b < 0.0) return 0;
  long r = static_cast<long>(b * static_cast<double>(k));  // near the answer
  r = std::clamp(r, 0L, k);
  while (r < k && static_cast<double>(r + 1) / static_cast<double>(k) <= b) ++r;
  while (r > 0 && !(static_cast<double>(r) / static_cast<double>(k) <= b)) --r;
  return static_cast<int>(r);
}

class Fenwick {
 public:
  explicit Fenwick(int n) : n_(n), tree_(static_cast<size_t>(n + 1), 0) {}
  void add(int i) {  // 1-based
    for (; i <= n_; i += i & (-i)) ++tree_[static_cast<size_t>(i)];
  }
  long prefix(int i) const {  // count of entries <= i
    long s = 0;
    for (; i > 0; i -= i & (-i)) s += tree_[static_cast<size_t>(i)];
    return s;
  }

 private:
  int n_;
  std::vector<long> tree_;
};

}  // namespace

std::vector<double> empirical_copula(const PseudoObservations& pseudo,
                                     const std::vector<Point>& grid) {
  std::vector<double> out(grid.size());
  if (pseudo.cols != 2) {
    for (size_t g = 0; g < grid.size(); ++g) out[g] = empirical_copula(pseudo, grid[g]);
    return out;
  }
  const long k = pseudo.rows;
  // Sort observation rows by first-coordinate rank, queries by threshold.
  std::vector<std::pair<int, int>> rows(static_cast<size_t>(k));
  for (long i = 0; i < k; ++i)
    rows[static_cast<size_t>(i)] = {pseudo.rank(i, 0), pseudo.rank(i, 1)};
  std::sort(rows.begin(), rows.end());
  std::vector<std::pair<std::pair<int, int>, size_t>> queries(grid.size());
  for (size_t g = 0; g < grid.size(); ++g) {
    if (grid[g].size() != 2)
      throw std::invalid_argument("empirical_copula: point dimension mismatch");
    queries[g] = {{rank_threshold(grid[g][0], k), rank_threshold(grid[g][1], k)}, g};
  }
  std::sort(queries.begin(), queries.end());
  Fenwick fen(static_cast<int>(k));
  size_t next_row = 0;
  for (const auto& [thr, g] : queries) {
    while (next_row < rows.size() && rows[next_row].first <= thr.first)
      fen.add(rows[next_row++].second);
    out[g] = static_cast<double>(fen.prefix(thr.second)) / static_cast<double>(k);
  }
  return out;
}

bool has_ties(const Matrix& data) {
  std::vector<double> col;
  for (long j = 0; j < data.cols(); ++j) {
    col = data.column(j);
    std::sort(col.begin(), col.end());
    if (std::adjacent_find(col.begin(), col.end()) != col.end()) return true;
  }
  return false;
}

}  // namespace blockmax
