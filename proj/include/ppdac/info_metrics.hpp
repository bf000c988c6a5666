#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace ppdac {

/// Monte-Carlo samples: one row per trial, one column per variable.
struct SampleMatrix {
  Eigen::MatrixXd data;
  std::vector<std::string> col_names;

  int trials() const { return static_cast<int>(data.rows()); }
  int variables() const { return static_cast<int>(data.cols()); }
  bool finite() const { return data.allFinite(); }
};

enum class MiMethod { Analytic, KNN };

/// Mutual information in bits plus its normalized form
/// nmi = 1 - 2^(-2 I), which maps [0, inf] onto [0, 1] and equals the
/// squared correlation coefficient for jointly Gaussian pairs.
struct MIEstimate {
  double value_bits = 0.0;
  double nmi = 0.0;
  MiMethod method = MiMethod::Analytic;
  int k = 0;
  int trials = 0;
  std::uint64_t seed = 0;
};

/// I(S; S+R) for Gaussians at the given SNR: 0.5 log2(1 + snr).
double gaussian_mi(double snr);

/// MI of a bivariate Gaussian with the given correlation coefficient.
double gaussian_mi_corr(double corr);

double normalized_mi(double value_bits);

MIEstimate make_analytic_estimate(double value_bits);

struct KnnOptions {
  int k = 3;
  std::uint64_t jitter_seed = 0x5eedULL;
  /// Rank-revealing covariance whitening of each block before estimation.
  /// MI is invariant under invertible linear maps of either argument;
  /// whitening equalizes scales across view directions and drops exactly
  /// degenerate ones, which keeps the neighborhood counts meaningful for
  /// strongly anisotropic views.
  bool whiten = true;
  /// Replace a multi-dimensional view block by its least-squares
  /// prediction of the scalar target before estimating. For jointly
  /// Gaussian data the prediction is a sufficient statistic, so the MI is
  /// unchanged while the estimator works in two dimensions instead of
  /// dozens, where its bias is negligible. Requires a 1-column target;
  /// exact only under the Gaussian sampling model the experiments use.
  bool gaussian_compress_view = false;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Kraskov-Stoegbauer-Grassberger estimator (variant 1) with Chebyshev
/// neighborhoods and uniform tie-breaking jitter of amplitude 1e-10.
/// Deterministic given samples, k, and the jitter seed; clamped at zero.
MIEstimate knn_mi(const SampleMatrix& samples,
                  const std::vector<int>& target_cols,
                  const std::vector<int>& view_cols,
                  const KnnOptions& options = {});

/// Output utility u = I(Y; Yhat) from per-trial samples of the desired and
/// computed outputs. Bitwise-identical inputs short-circuit to the
/// full-utility sentinel (infinite bits, nmi 1). The analytic method uses
/// the Gaussian correlation form; the kNN method defers to knn_mi.
MIEstimate utility(const Eigen::Ref<const Eigen::VectorXd>& y,
                   const Eigen::Ref<const Eigen::VectorXd>& y_hat,
                   MiMethod method, const KnnOptions& options = {});

}  // namespace ppdac
