#include "freemult/matrix_mc.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "freemult/errors.hpp"

namespace freemult {

namespace {

using Matrix = Eigen::MatrixXd;

Matrix haar_matrix(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Matrix g(n, n);
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = normal(gen);
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  // Fixing sign(diag R) > 0 makes Q exactly Haar.
  const Matrix& r = qr.matrixQR();
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) *= -1.0;
  }
  return q;
}

Eigen::VectorXd symmetric_eigenvalues(const Matrix& a, Matrix* vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::EigensolverFailure, "eigensolver did not converge");
  if (vectors) *vectors = es.eigenvectors();
  return es.eigenvalues();
}

Eigen::VectorXd clamp_spectrum(Eigen::VectorXd ev) {
  const double floor = -1e-10 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (double& x : ev) {
    if (x < floor) throw Error(ErrorCode::EigensolverFailure, "negative eigenvalue " + std::to_string(x));
    x = std::max(x, 0.0);
  }
  return ev;
}

Eigen::VectorXd diagonal_sample(const MeasureSpec& mu, std::size_t n, std::uint64_t seed) {
  const std::vector<double> s = sample(mu, n, seed);
  return Eigen::Map<const Eigen::VectorXd>(s.data(), static_cast<Eigen::Index>(n));
}

Eigen::VectorXd one_replicate(const MeasureSpec& mu, const McConfig& cfg, std::uint64_t seed) {
  const std::size_t n = cfg.n;
  Eigen::VectorXd d = diagonal_sample(mu, n, split_seed(seed, 0));
  if (cfg.t == 1) {
    std::sort(d.begin(), d.end());
    return d;
  }
  Matrix m = d.asDiagonal();
  for (int k = 1; k < cfg.t; ++k) {
    Matrix v;
    const Eigen::VectorXd lam = clamp_spectrum(symmetric_eigenvalues(m, &v));
    const Matrix root = v * lam.cwiseSqrt().asDiagonal() * v.transpose();
    const Matrix u = haar_matrix(n, split_seed(seed, 2 * k + 1));
    const Eigen::VectorXd dk = diagonal_sample(mu, n, split_seed(seed, 2 * k));
    const Matrix b = u * dk.asDiagonal() * u.transpose();
    m = root * b * root;
    m = 0.5 * (m + m.transpose()).eval();
  }
  return clamp_spectrum(symmetric_eigenvalues(m, nullptr));
}

}  // namespace

std::vector<double> haar_orthogonal(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "haar_orthogonal: n must be positive");
  const Matrix q = haar_matrix(n, seed);
  std::vector<double> out(n * n);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      out.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = q;
  return out;
}

std::vector<double> product_spectrum(const MeasureSpec& mu, const McConfig& cfg) {
  if (cfg.t < 1) throw Error(ErrorCode::InvalidArgument, "product_spectrum: t must be >= 1");
  if (cfg.n == 0 || cfg.reps == 0) throw Error(ErrorCode::InvalidArgument, "product_spectrum: empty run");
  if (!mu.is_probability()) throw Error(ErrorCode::InvalidArgument, "product_spectrum: mu must be a probability law");
  std::vector<double> out;
  out.reserve(cfg.n * cfg.reps);
  for (std::size_t r = 0; r < cfg.reps; ++r) {
    const Eigen::VectorXd ev = one_replicate(mu, cfg, split_seed(cfg.seed, r));
    out.insert(out.end(), ev.begin(), ev.end());
  }
  return out;
}

RegVarFit hill_fit(std::span<const double> samples, std::size_t k) {
  const std::size_t n = samples.size();
  if (k < 2 || k >= n) {
    throw Error(ErrorCode::TooFewSamples, "hill_fit: need 2 <= k < n, got k = " + std::to_string(k) +
                                              ", n = " + std::to_string(n));
  }
  std::vector<double> top(samples.begin(), samples.end());
  std::partial_sort(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k + 1), top.end(),
                    std::greater<>());
  top.resize(k + 1);
  if (!(top[k] > 0.0)) throw Error(ErrorCode::NonPositiveValue, "hill_fit: top order statistics must be positive");

  const double base = std::log(top[k]);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(top[i]) - base;
  const double alpha = static_cast<double>(k) / acc;

  RegVarFit fit;
  fit.index = -alpha;
  std::vector<double> consts(k);
  for (std::size_t i = 0; i < k; ++i) {
    consts[i] = std::pow(top[i], alpha) * static_cast<double>(i + 1) / static_cast<double>(n);
  }
  std::vector<double> sorted = consts;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k / 2), sorted.end());
  fit.constant = sorted[k / 2];
  if (k % 2 == 0) {
    const double lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k / 2));
    fit.constant = 0.5 * (fit.constant + lower);
  }
  fit.grid.assign(top.begin(), top.begin() + static_cast<std::ptrdiff_t>(k));
  fit.residuals.resize(k);
  for (std::size_t i = 0; i < k; ++i) fit.residuals[i] = std::log(consts[i] / fit.constant);
  return fit;
}

MeanEstimate block_mean(std::span<const double> samples, std::size_t block) {
  if (block == 0 || samples.size() % block != 0 || samples.size() / block < 2) {
    throw Error(ErrorCode::TooFewSamples, "block_mean: need at least two full blocks");
  }
  const std::size_t nb = samples.size() / block;
  std::vector<double> means(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const auto first = samples.begin() + static_cast<std::ptrdiff_t>(b * block);
    means[b] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(block), 0.0) / static_cast<double>(block);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(nb);
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  const double var = ss / static_cast<double>(nb - 1);
  return {mean, std::sqrt(var / static_cast<double>(nb))};
}

void dump_samples_csv(std::span<const double> samples, std::ostream& out) {
  out << "eigenvalue\n";
  const auto old = out.precision(17);
  for (double x : samples) out << x << '\n';
  out.precision(old);
}

}  // namespace freemult
