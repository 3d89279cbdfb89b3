#include "ntgof/statistics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>

namespace ntgof {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kConditionLimit = 1e10;

void require_symmetric(const Eigen::MatrixXd& matrix, const char* where) {
  if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
    throw InvalidArgument(std::string(where) + ": matrix must be square and non-empty");
  }
  if (!matrix.allFinite()) {
    throw NumericError(std::string(where) + ": matrix has non-finite entries");
  }
  const double scale = std::max(1.0, matrix.cwiseAbs().maxCoeff());
  const double asymmetry = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
  if (asymmetry > kSymmetryTol * scale) {
    throw InvalidArgument(std::string(where) + ": matrix is not symmetric");
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& matrix) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigensolver did not converge");
  }
  return solver;
}

void require_finite_scores(const ScoreMatrix& scores, const char* where) {
  if (scores.rows() == 0) {
    throw InvalidArgument(std::string(where) + ": empty sample");
  }
  if (scores.cols() == 0) {
    throw InvalidArgument(std::string(where) + ": zero score components");
  }
  if (!scores.allFinite()) {
    throw InvalidArgument(std::string(where) + ": non-finite score value");
  }
}

}  // namespace

std::string to_string(MatrixProvenance provenance) {
  switch (provenance) {
    case MatrixProvenance::analytic_identity:
      return "analytic_identity";
    case MatrixProvenance::estimated_from_null_sampler:
      return "estimated_from_null_sampler";
    case MatrixProvenance::user_supplied:
      return "user_supplied";
  }
  return "unknown";
}

NormalizingMatrix::NormalizingMatrix(Eigen::MatrixXd matrix, Eigen::VectorXd eigenvalues,
                                     MatrixProvenance provenance)
    : matrix_(std::move(matrix)), eigenvalues_(std::move(eigenvalues)), provenance_(provenance) {}

NormalizingMatrix NormalizingMatrix::identity(std::size_t k) {
  if (k == 0) {
    throw InvalidArgument("NormalizingMatrix::identity: k must be positive");
  }
  const auto size = static_cast<Eigen::Index>(k);
  return NormalizingMatrix(Eigen::MatrixXd::Identity(size, size), Eigen::VectorXd::Ones(size),
                           MatrixProvenance::analytic_identity);
}

NormalizingMatrix NormalizingMatrix::from_matrix(const Eigen::MatrixXd& matrix,
                                                 MatrixProvenance provenance) {
  Eigen::VectorXd eigenvalues = ordered_eigenvalues(matrix);
  if (!(eigenvalues(eigenvalues.size() - 1) > 0.0)) {
    throw NumericError("NormalizingMatrix: matrix is not positive definite");
  }
  return NormalizingMatrix(matrix, std::move(eigenvalues), provenance);
}

NormalizingMatrix NormalizingMatrix::scaled(double c) const {
  if (!(c > 0.0)) {
    throw InvalidArgument("NormalizingMatrix::scaled: factor must be positive");
  }
  return NormalizingMatrix(c * matrix_, c * eigenvalues_, provenance_);
}

MeanVector MeanVector::from_scores(const ScoreMatrix& scores) {
  require_finite_scores(scores, "MeanVector");
  MeanVector mean;
  mean.n = static_cast<std::size_t>(scores.rows());
  mean.values = scores.colwise().sum().transpose() / static_cast<double>(scores.rows());
  return mean;
}

Eigen::VectorXd ordered_eigenvalues(const Eigen::MatrixXd& matrix) {
  require_symmetric(matrix, "ordered_eigenvalues");
  Eigen::VectorXd ascending = decompose(matrix).eigenvalues();
  return ascending.reverse();
}

Eigen::MatrixXd invert_spd(const Eigen::MatrixXd& matrix) {
  require_symmetric(matrix, "invert_spd");
  const auto solver = decompose(matrix);
  const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
  const double largest = values(values.size() - 1);
  const double smallest = values(0);
  if (!(largest > 0.0) || !(smallest >= largest / kConditionLimit)) {
    throw NumericError("invert_spd: matrix is singular or ill-conditioned (eigenvalues " +
                       std::to_string(smallest) + " .. " + std::to_string(largest) + ")");
  }
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  return vectors * values.cwiseInverse().asDiagonal() * vectors.transpose();
}

std::vector<double> snt_statistic(const ScoreMatrix& scores) {
  require_finite_scores(scores, "snt_statistic");
  const auto n = static_cast<double>(scores.rows());
  std::vector<double> series(static_cast<std::size_t>(scores.cols()));
  double running = 0.0;
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    const double sum = scores.col(j).sum();
    running += sum * sum / n;
    series[static_cast<std::size_t>(j)] = running;
  }
  return series;
}

double nt_statistic(const MeanVector& mean, const NormalizingMatrix& normalizing) {
  if (mean.n == 0) {
    throw InvalidArgument("nt_statistic: empty sample");
  }
  if (static_cast<std::size_t>(mean.values.size()) != normalizing.dimension()) {
    throw InvalidArgument("nt_statistic: mean has " + std::to_string(mean.values.size()) +
                          " components, matrix is " + std::to_string(normalizing.dimension()) +
                          "-dimensional");
  }
  if (!mean.values.allFinite()) {
    throw InvalidArgument("nt_statistic: non-finite mean component");
  }
  const double form = mean.values.dot(normalizing.matrix() * mean.values);
  return static_cast<double>(mean.n) * form;
}

double gnt_statistic(const ScoreMatrix& estimated_scores, const NormalizingMatrix& normalizing) {
  return nt_statistic(MeanVector::from_scores(estimated_scores), normalizing);
}

std::vector<double> nt_series(const ScoreMatrix& scores,
                              std::span<const NormalizingMatrix> matrices) {
  const auto full = MeanVector::from_scores(scores);
  if (matrices.size() > static_cast<std::size_t>(scores.cols())) {
    throw InvalidArgument("nt_series: more matrices than score components");
  }
  std::vector<double> series;
  series.reserve(matrices.size());
  for (std::size_t m = 1; m <= matrices.size(); ++m) {
    MeanVector head{full.values.head(static_cast<Eigen::Index>(m)), full.n};
    series.push_back(nt_statistic(head, matrices[m - 1]));
  }
  return series;
}

std::vector<NormalizingMatrix> nested_normalizing_matrices(const Eigen::MatrixXd& second_moment,
                                                           std::size_t d,
                                                           MatrixProvenance provenance) {
  if (d == 0 || d > static_cast<std::size_t>(second_moment.rows())) {
    throw InvalidArgument("nested_normalizing_matrices: d out of range");
  }
  std::vector<NormalizingMatrix> out;
  out.reserve(d);
  for (std::size_t m = 1; m <= d; ++m) {
    const auto size = static_cast<Eigen::Index>(m);
    Eigen::MatrixXd inverse = invert_spd(second_moment.topLeftCorner(size, size));
    inverse = 0.5 * (inverse + inverse.transpose()).eval();
    out.push_back(NormalizingMatrix::from_matrix(inverse, provenance));
  }
  return out;
}

namespace detail {

void check_centred(const Eigen::VectorXd& sum, const Eigen::MatrixXd& cross, std::size_t draws) {
  const auto count = static_cast<double>(draws);
  for (Eigen::Index j = 0; j < sum.size(); ++j) {
    const double mean = sum(j) / count;
    const double variance = std::max(0.0, cross(j, j) / count - mean * mean);
    const double standard_error = std::sqrt(variance / count);
    if (std::abs(mean) > 4.0 * standard_error) {
      throw InvalidArgument("estimate_second_moment: component " + std::to_string(j + 1) +
                            " has null mean " + std::to_string(mean) +
                            ", more than 4 standard errors from 0");
    }
  }
}

}  // namespace detail

}  // namespace ntgof
