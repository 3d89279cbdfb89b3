#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ntgof/error.hpp"
#include "ntgof/parallel.hpp"
#include "ntgof/random.hpp"

namespace ntgof {

/// Per-observation score values: row i holds (l_1(Y_i), ..., l_k(Y_i)).
using ScoreMatrix = Eigen::MatrixXd;

/// Vector score function l = (l_1, ..., l_k) over an opaque observation type.
template <class Observation>
struct ScoreBasis {
  std::size_t dimension = 0;
  std::function<void(const Observation&, std::span<double>)> evaluate;
};

template <class Observation>
using NullSampler = std::function<Observation(Rng&)>;

enum class MatrixProvenance { analytic_identity, estimated_from_null_sampler, user_supplied };

std::string to_string(MatrixProvenance provenance);

/// Symmetric positive definite k x k matrix L with its eigenvalues sorted
/// in non-increasing order.
class NormalizingMatrix {
 public:
  static NormalizingMatrix identity(std::size_t k);

  /// Validates symmetry (1e-12 relative) and positive definiteness.
  static NormalizingMatrix from_matrix(const Eigen::MatrixXd& matrix,
                                       MatrixProvenance provenance = MatrixProvenance::user_supplied);

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
  const Eigen::VectorXd& eigenvalues() const noexcept { return eigenvalues_; }
  MatrixProvenance provenance() const noexcept { return provenance_; }

  /// Same matrix multiplied by c > 0.
  NormalizingMatrix scaled(double c) const;

 private:
  NormalizingMatrix(Eigen::MatrixXd matrix, Eigen::VectorXd eigenvalues,
                    MatrixProvenance provenance);

  Eigen::MatrixXd matrix_;
  Eigen::VectorXd eigenvalues_;
  MatrixProvenance provenance_;
};

/// Component-wise sample mean of the scores.
struct MeanVector {
  Eigen::VectorXd values;
  std::size_t n = 0;

  static MeanVector from_scores(const ScoreMatrix& scores);
};

/// Eigenvalues of a symmetric matrix, largest first. Throws InvalidArgument
/// if the matrix is not square or not symmetric to 1e-12 relative tolerance.
Eigen::VectorXd ordered_eigenvalues(const Eigen::MatrixXd& matrix);

/// Inverse of a symmetric positive definite matrix through its
/// eigendecomposition. Throws NumericError when the smallest eigenvalue is
/// below 1e-10 times the largest (condition number above 1e10) or not positive.
Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& matrix);

/// T_m = sum_{j<=m} (n^{-1/2} sum_i l_j(Y_i))^2 for m = 1..k.
std::vector<double> snt_statistic(const ScoreMatrix& scores);

/// n * mean^T L mean.
double nt_statistic(const MeanVector& mean, const NormalizingMatrix& normalizing);

/// {n^{-1/2} sum l*} L_k {n^{-1/2} sum l*}^T for estimated scores l*. When
/// the estimated scores are the plain scores this coincides bit-for-bit with
/// nt_statistic.
double gnt_statistic(const ScoreMatrix& estimated_scores, const NormalizingMatrix& normalizing);

/// T_m = n * mean_m^T L_m mean_m for m = 1..matrices.size(), where mean_m
/// holds the first m components and matrices[m-1] is m x m.
std::vector<double> nt_series(const ScoreMatrix& scores,
                              std::span<const NormalizingMatrix> matrices);

/// L_m = (leading m x m block of second_moment)^{-1} for m = 1..d.
std::vector<NormalizingMatrix> nested_normalizing_matrices(const Eigen::MatrixXd& second_moment,
                                                           std::size_t d,
                                                           MatrixProvenance provenance);

struct SecondMomentEstimate {
  Eigen::VectorXd mean;
  Eigen::MatrixXd second_moment;  // E_0[l l^T]
  std::size_t draws = 0;
};

/// Monte Carlo estimate of E_0 l(Y) and E_0[l(Y) l(Y)^T]. Draw i uses its own
/// substream of `seed`; draws are accumulated in fixed blocks and the blocks
/// reduced in index order, so the result does not depend on `workers`.
///
/// Throws InvalidArgument if draws < 10 k^2 or if some component mean is
/// more than 4 standard errors away from 0 (the scores are not centred under
/// the null, so no quadratic form built on them is calibrated).
template <class Observation>
SecondMomentEstimate estimate_second_moment(const NullSampler<Observation>& sampler,
                                            const ScoreBasis<Observation>& basis,
                                            std::size_t draws, std::uint64_t seed,
                                            std::size_t workers = 0);

/// Inverse of estimate_second_moment's matrix, symmetrized.
template <class Observation>
NormalizingMatrix estimate_normalizing_matrix(const NullSampler<Observation>& sampler,
                                              const ScoreBasis<Observation>& basis,
                                              std::size_t draws, std::uint64_t seed,
                                              std::size_t workers = 0);

// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::size_t kMomentBlock = 1024;
inline constexpr std::uint64_t kMomentStream = 0x4d4f4d454e54ULL;

void check_centred(const Eigen::VectorXd& sum, const Eigen::MatrixXd& cross, std::size_t draws);

}  // namespace detail

template <class Observation>
SecondMomentEstimate estimate_second_moment(const NullSampler<Observation>& sampler,
                                            const ScoreBasis<Observation>& basis,
                                            std::size_t draws, std::uint64_t seed,
                                            std::size_t workers) {
  const std::size_t k = basis.dimension;
  if (k == 0 || !basis.evaluate || !sampler) {
    throw InvalidArgument("estimate_second_moment: empty basis or sampler");
  }
  if (draws < 10 * k * k) {
    throw InvalidArgument("estimate_second_moment: need at least 10 k^2 = " +
                          std::to_string(10 * k * k) + " draws");
  }
  const std::size_t blocks = (draws + detail::kMomentBlock - 1) / detail::kMomentBlock;
  std::vector<Eigen::VectorXd> block_sum(blocks, Eigen::VectorXd::Zero(k));
  std::vector<Eigen::MatrixXd> block_cross(blocks, Eigen::MatrixXd::Zero(k, k));
  parallel_for(blocks, resolve_workers(workers), [&](std::size_t b) {
    Eigen::VectorXd row(k);
    const std::size_t begin = b * detail::kMomentBlock;
    const std::size_t end = std::min(draws, begin + detail::kMomentBlock);
    for (std::size_t i = begin; i < end; ++i) {
      Rng rng = substream(seed, detail::kMomentStream, i);
      const Observation obs = sampler(rng);
      basis.evaluate(obs, std::span<double>(row.data(), k));
      if (!row.allFinite()) {
        throw NumericError("estimate_second_moment: non-finite score at draw " +
                           std::to_string(i));
      }
      block_sum[b] += row;
      block_cross[b].noalias() += row * row.transpose();
    }
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(k, k);
  for (std::size_t b = 0; b < blocks; ++b) {
    sum += block_sum[b];
    cross += block_cross[b];
  }
  detail::check_centred(sum, cross, draws);
  const auto count = static_cast<double>(draws);
  SecondMomentEstimate estimate;
  estimate.mean = sum / count;
  estimate.second_moment = cross / count;
  estimate.second_moment = 0.5 * (estimate.second_moment + estimate.second_moment.transpose()).eval();
  estimate.draws = draws;
  return estimate;
}

template <class Observation>
NormalizingMatrix estimate_normalizing_matrix(const NullSampler<Observation>& sampler,
                                              const ScoreBasis<Observation>& basis,
                                              std::size_t draws, std::uint64_t seed,
                                              std::size_t workers) {
  const auto estimate = estimate_second_moment(sampler, basis, draws, seed, workers);
  Eigen::MatrixXd inverse = invert_spd(estimate.second_moment);
  inverse = 0.5 * (inverse + inverse.transpose()).eval();
  return NormalizingMatrix::from_matrix(inverse, MatrixProvenance::estimated_from_null_sampler);
}

}  // namespace ntgof
