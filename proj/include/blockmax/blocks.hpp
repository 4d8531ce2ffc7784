#ifndef BLOCKMAX_BLOCKS_HPP
#define BLOCKMAX_BLOCKS_HPP

#include <vector>

#include "blockmax/core.hpp"

namespace blockmax {

enum class BlockScheme { sliding, disjoint };

/// Componentwise block maxima of a data window for one block size.
/// sliding: row i is the max over input rows [i, i+m); n-m+1 rows.
/// disjoint: row h is the max over rows [hm, (h+1)m); floor(n/m) rows,
/// trailing remainder discarded.
struct BlockMaximaPanel {
  int block_size = 1;
  BlockScheme scheme = BlockScheme::sliding;
  Matrix maxima;
};

BlockMaximaPanel sliding_maxima(const Matrix& data, int m);
BlockMaximaPanel disjoint_maxima(const Matrix& data, int m);

/// Rank-based pseudo-observations of a panel: U_ij = (# rows with value in
/// column j <= M_ij) / k. Ties share the maximal rank, which makes U_ij equal
/// to the column's empirical CDF evaluated at M_ij.
struct PseudoObservations {
  long rows = 0;
  long cols = 0;
  std::vector<int> ranks;  // row-major, values in 1..rows
  Matrix u_hat;            // ranks / rows, in (0,1]

  int rank(long i, long j) const { return ranks[static_cast<size_t>(i * cols + j)]; }
};

PseudoObservations pseudo_observations(const BlockMaximaPanel& panel);

/// Empirical copula of the pseudo-observations at a single point:
/// the fraction of rows componentwise <= u.
double empirical_copula(const PseudoObservations& pseudo, const Point& u);

/// Batch evaluation over a grid. For d = 2 this runs a sweep over the first
/// coordinate with a Fenwick tree on second-coordinate ranks, O((k+g) log k)
/// instead of O(k g); higher dimensions fall back to direct counting.
/// Results are exactly equal to the per-point version.
std::vector<double> empirical_copula(const PseudoObservations& pseudo,
                                     const std::vector<Point>& grid);

/// True if some column of the matrix contains tied values (the library
/// assumes continuous margins for raw data; ties are legal but worth a flag).
bool has_ties(const Matrix& data);

}  // namespace blockmax

#endif  // BLOCKMAX_BLOCKS_HPP
