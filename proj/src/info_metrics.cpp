#include "ppdac/info_metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ppdac/parallel.hpp"
#include "ppdac/rng.hpp"

namespace ppdac {

namespace {

constexpr double kEulerMascheroni = 0.57721566490153286060651209;
constexpr double kJitterAmplitude = 1e-10;

/// psi(1..max_n) via the harmonic-number recurrence.
std::vector<double> digamma_table(int max_n) {
  std::vector<double> psi(max_n + 1);
  psi[1] = -kEulerMascheroni;
  for (int i = 1; i < max_n; ++i) psi[i + 1] = psi[i] + 1.0 / i;
  return psi;
}

/// Centers the block and maps it onto the unit-covariance coordinates of
/// its significant principal directions. Directions whose singular value
/// falls below 1e-8 of the largest are degenerate (constant or exact
/// duplicates) and carry no information; they are dropped.
Eigen::MatrixXd whiten_block(const Eigen::MatrixXd& block) {
  const double n = static_cast<double>(block.rows());
  Eigen::MatrixXd centered = block.rowwise() - block.colwise().mean();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU |
                                                      Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0)
    return Eigen::MatrixXd(block.rows(), 0);
  const double cutoff = 1e-8 * sv(0);
  int rank = 0;
  while (rank < sv.size() && sv(rank) > cutoff) ++rank;
  // centered * V_r * diag(sqrt(n-1)/sigma_r) has unit sample covariance.
  Eigen::MatrixXd out = centered * svd.matrixV().leftCols(rank);
  for (int c = 0; c < rank; ++c) out.col(c) *= std::sqrt(n - 1.0) / sv(c);
  return out;
}

void add_jitter(Eigen::MatrixXd& block, RngStream& stream) {
  for (Eigen::Index i = 0; i < block.rows(); ++i)
    for (Eigen::Index c = 0; c < block.cols(); ++c)
      block(i, c) += kJitterAmplitude * stream.uniform01();
}

double chebyshev(const double* a, const double* b, int dim) {
  double d = 0.0;
  for (int c = 0; c < dim; ++c) {
    const double diff = std::abs(a[c] - b[c]);
    if (diff > d) d = diff;
  }
  return d;
}

}  // namespace

double gaussian_mi(double snr) {
  if (snr < 0) throw std::invalid_argument("snr must be >= 0");
  return 0.5 * std::log2(1.0 + snr);
}

double gaussian_mi_corr(double corr) {
  const double r2 = corr * corr;
  if (r2 >= 1.0) return std::numeric_limits<double>::infinity();
  return -0.5 * std::log2(1.0 - r2);
}

double normalized_mi(double value_bits) {
  const double bits = std::max(value_bits, 0.0);
  return 1.0 - std::exp2(-2.0 * bits);
}

MIEstimate make_analytic_estimate(double value_bits) {
  MIEstimate est;
  est.value_bits = value_bits;
  est.nmi = normalized_mi(value_bits);
  est.method = MiMethod::Analytic;
  return est;
}

MIEstimate knn_mi(const SampleMatrix& samples,
                  const std::vector<int>& target_cols,
                  const std::vector<int>& view_cols,
                  const KnnOptions& options) {
  const int n = samples.trials();
  const int k = options.k;
  if (k < 1) throw std::invalid_argument("need k >= 1");
  if (n <= 10 * k)
    throw std::invalid_argument("too few trials for kNN estimation");
  if (target_cols.empty() || view_cols.empty())
    throw std::invalid_argument("empty column selection");
  if (!samples.finite())
    throw std::invalid_argument("samples contain non-finite entries");

  auto extract = [&](const std::vector<int>& cols) {
    Eigen::MatrixXd block(n, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c)
      block.col(c) = samples.data.col(cols[c]);
    return block;
  };

  Eigen::MatrixXd x = extract(target_cols);
  Eigen::MatrixXd y = extract(view_cols);
  if (options.gaussian_compress_view && y.cols() > 1) {
    if (x.cols() != 1)
      throw std::invalid_argument(
          "gaussian view compression needs a scalar target");
    const Eigen::VectorXd xc = x.col(0).array() - x.col(0).mean();
    const Eigen::MatrixXd yc = y.rowwise() - y.colwise().mean();
    const Eigen::VectorXd beta =
        yc.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(xc);
    y = yc * beta;
  }
  if (options.whiten) {
    x = whiten_block(x);
    y = whiten_block(y);
  }

  MIEstimate est;
  est.method = MiMethod::KNN;
  est.k = k;
  est.trials = n;
  est.seed = options.jitter_seed;
  if (x.cols() == 0 || y.cols() == 0) {
    // A degenerate (constant) block is independent of everything.
    est.value_bits = 0.0;
    est.nmi = 0.0;
    return est;
  }

  RngStream jitter(options.jitter_seed, 0, Draw::Jitter);
  add_jitter(x, jitter);
  add_jitter(y, jitter);

  const int dx = static_cast<int>(x.cols());
  const int dy = static_cast<int>(y.cols());
  // Row-major copies so the pairwise scans stream through memory.
  std::vector<double> xs(static_cast<std::size_t>(n) * dx);
  std::vector<double> ys(static_cast<std::size_t>(n) * dy);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dx; ++c) xs[static_cast<std::size_t>(i) * dx + c] = x(i, c);
    for (int c = 0; c < dy; ++c) ys[static_cast<std::size_t>(i) * dy + c] = y(i, c);
  }

  const std::vector<double> psi = digamma_table(n + 1);
  std::vector<double> point_term(n);
  const unsigned threads =
      options.threads == 0 ? default_thread_count() : options.threads;

  parallel_for(
      static_cast<std::size_t>(n),
      [&](std::size_t i) {
        std::vector<double> dxs(n), dys(n), joint(n);
        const double* xi = &xs[i * dx];
        const double* yi = &ys[i * dy];
        for (int j = 0; j < n; ++j) {
          dxs[j] = chebyshev(xi, &xs[static_cast<std::size_t>(j) * dx], dx);
          dys[j] = chebyshev(yi, &ys[static_cast<std::size_t>(j) * dy], dy);
          joint[j] = std::max(dxs[j], dys[j]);
        }
        joint[i] = std::numeric_limits<double>::infinity();
        std::vector<double> order = joint;
        std::nth_element(order.begin(), order.begin() + (k - 1), order.end());
        const double eps = order[k - 1];

        int nx = 0, ny = 0;
        for (int j = 0; j < n; ++j) {
          if (j == static_cast<int>(i)) continue;
          if (dxs[j] < eps) ++nx;
          if (dys[j] < eps) ++ny;
        }
        point_term[i] = psi[nx + 1] + psi[ny + 1];
      },
      threads);

  double mean_term = 0.0;
  for (int i = 0; i < n; ++i) mean_term += point_term[i];
  mean_term /= n;

  const double nats = psi[k] + psi[n] - mean_term;
  est.value_bits = std::max(nats / std::numbers::ln2, 0.0);
  est.nmi = normalized_mi(est.value_bits);
  return est;
}

MIEstimate utility(const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& y_hat,
                   MiMethod method, const KnnOptions& options) {
  if (y.size() != y_hat.size())
    throw std::invalid_argument("mismatched trial counts");
  MIEstimate est;
  est.method = method;
  est.trials = static_cast<int>(y.size());
  if ((y.array() == y_hat.array()).all()) {
    est.value_bits = std::numeric_limits<double>::infinity();
    est.nmi = 1.0;
    return est;
  }
  if (method == MiMethod::Analytic) {
    const Eigen::VectorXd yc = y.array() - y.mean();
    const Eigen::VectorXd hc = y_hat.array() - y_hat.mean();
    const double denom = yc.norm() * hc.norm();
    const double corr = denom > 0 ? yc.dot(hc) / denom : 0.0;
    est.value_bits = gaussian_mi_corr(corr);
    est.nmi = normalized_mi(est.value_bits);
    return est;
  }
  SampleMatrix samples;
  samples.data.resize(y.size(), 2);
  samples.data.col(0) = y;
  samples.data.col(1) = y_hat;
  samples.col_names = {"y", "y_hat"};
  return knn_mi(samples, {0}, {1}, options);
}

}  // namespace ppdac
