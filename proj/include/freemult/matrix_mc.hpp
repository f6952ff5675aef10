#pragma once

// Monte Carlo spectra of products of freely rotated diagonal matrices, and
// tail-index estimation from samples.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "freemult/measure.hpp"
#include "freemult/regvar.hpp"

namespace freemult {

struct McConfig {
  int t = 2;              // number of factors
  std::size_t n = 256;    // matrix size
  std::size_t reps = 10;  // independent replicates
  std::uint64_t seed = 1;
};

/// Eigenvalues of M_t, where M_1 = D_1 and M_{k+1} = M_k^{1/2} U_k D_k U_k^T M_k^{1/2}
/// with D_k diagonal of i.i.d. mu samples and U_k Haar orthogonal. Returns
/// reps blocks of n eigenvalues; each block is sorted ascending. Replicate r
/// draws from split_seed(seed, r).
std::vector<double> product_spectrum(const MeasureSpec& mu, const McConfig& cfg);

/// Haar-distributed orthogonal n x n matrix, row-major.
std::vector<double> haar_orthogonal(std::size_t n, std::uint64_t seed);

/// Hill estimator on the k largest samples. The fit describes the empirical
/// tail: index = -alpha, constant = median of x_(i)^alpha * i / n.
RegVarFit hill_fit(std::span<const double> samples, std::size_t k);

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

/// Mean of all samples, with the standard error taken from the spread of the
/// per-block means (blocks of `block` consecutive samples).
MeanEstimate block_mean(std::span<const double> samples, std::size_t block);

void dump_samples_csv(std::span<const double> samples, std::ostream& out);

}  // namespace freemult
