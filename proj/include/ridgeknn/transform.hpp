#pragma once

#include <Eigen/Cholesky>
#include <Eigen/SparseCore>

#include <cmath>
#include <string>
#include <string_view>

#include "ridgeknn/targets.hpp"

namespace ridgeknn {

/// Which side of the dissimilarity the learned map moves.
///
/// MoveLabeled learns W with f(x, z) = |x - Wz| (labeled objects move toward
/// queries). MoveQuery learns W with f(x, z) = |Wx - z| and is the negative
/// control: it shrinks queries toward the center and promotes hubs.
enum class Direction { MoveLabeled, MoveQuery };

/// PaperClosedForm solves W (X X^T + lambda I) = X J X^T. ExactMinimizer
/// weights each object's outer product by how often it serves as a target,
/// W (X diag(c) X^T + lambda I) = X J X^T, which is the true minimizer of the
/// squared-loss objective. The two agree when every object is a target once.
enum class Solver { PaperClosedForm, ExactMinimizer };

inline std::string to_string(Direction d) {
  return d == Direction::MoveLabeled ? "move-labeled" : "move-query";
}
inline std::string to_string(Solver s) {
  return s == Solver::PaperClosedForm ? "paper" : "exact";
}
inline Direction parse_direction(std::string_view s) {
  if (s == "move-labeled") return Direction::MoveLabeled;
  if (s == "move-query") return Direction::MoveQuery;
  throw InvalidArgument("unknown direction '" + std::string(s) + "'");
}
inline Solver parse_solver(std::string_view s) {
  if (s == "paper") return Solver::PaperClosedForm;
  if (s == "exact") return Solver::ExactMinimizer;
  throw InvalidArgument("unknown solver '" + std::string(s) + "' (expected paper or exact)");
}

struct TransformModel {
  Matrix W;
  Direction direction = Direction::MoveLabeled;
  double lambda = 0.0;
  Solver solver = Solver::PaperClosedForm;

  Index dim() const { return W.rows(); }
};

/// The pieces of a ridge normal equation W * gram = rhs.
struct RidgeSystem {
  Matrix gram;  // includes the lambda I term
  Matrix rhs;
};

namespace detail {

inline void check_system_inputs(const Matrix& X, const IndicatorMatrix& J, double lambda) {
  if (J.rows() != X.cols() || J.cols() != X.cols()) {
    throw DimensionError("indicator matrix is " + std::to_string(J.rows()) + "x" +
                         std::to_string(J.cols()) + " but X has " + std::to_string(X.cols()) +
                         " objects");
  }
  require(lambda >= 0.0 && std::isfinite(lambda), "lambda must be a finite non-negative number");
  require(X.allFinite(), "training features contain non-finite values");
}

inline Vector row_sums(const IndicatorMatrix& J) {
  return J * Vector::Ones(J.cols());
}
inline Vector col_sums(const IndicatorMatrix& J) {
  return (RowVector::Ones(J.rows()) * J).transpose();
}

/// Solves W * gram = rhs for symmetric positive-definite gram.
inline Matrix solve_right(const RidgeSystem& sys, double lambda) {
  Eigen::LLT<Matrix> llt(sys.gram);
  constexpr double kMinRcond = 1e-12;
  if (llt.info() != Eigen::Success || !(llt.rcond() > kMinRcond)) {
    throw SingularSystemError(
        "ridge system is numerically singular (lambda = " + std::to_string(lambda) +
        "); use lambda > 0 or more training objects than dimensions");
  }
  Matrix W = llt.solve(sys.rhs.transpose()).transpose();
  if (!W.allFinite()) throw SingularSystemError("ridge solve produced non-finite entries");
  return W;
}

}  // namespace detail

/// Normal equation of the move-labeled objective for columns-as-objects X (d x n).
inline RidgeSystem move_labeled_system(const Matrix& X, const IndicatorMatrix& J, double lambda,
                                       Solver solver) {
  detail::check_system_inputs(X, J, lambda);
  RidgeSystem sys;
  const Matrix XJ = X * J;
  sys.rhs = XJ * X.transpose();
  if (solver == Solver::PaperClosedForm) {
    sys.gram = X * X.transpose();
  } else {
    sys.gram = X * detail::col_sums(J).asDiagonal() * X.transpose();
  }
  sys.gram.diagonal().array() += lambda;
  return sys;
}

/// Normal equation of the move-query objective: inputs and responses swapped,
/// each input weighted by its target count.
inline RidgeSystem move_query_system(const Matrix& X, const IndicatorMatrix& J, double lambda) {
  detail::check_system_inputs(X, J, lambda);
  RidgeSystem sys;
  const Matrix XJt = X * J.transpose();
  sys.rhs = XJt * X.transpose();
  sys.gram = X * detail::row_sums(J).asDiagonal() * X.transpose();
  sys.gram.diagonal().array() += lambda;
  return sys;
}

/// Learns W for f(x, z) = |x - Wz|. X holds one training object per column.
inline TransformModel fit_move_labeled(const Matrix& X, const IndicatorMatrix& J, double lambda,
                                       Solver solver = Solver::PaperClosedForm) {
  auto sys = move_labeled_system(X, J, lambda, solver);
  return {detail::solve_right(sys, lambda), Direction::MoveLabeled, lambda, solver};
}

/// Learns W for f(x, z) = |Wx - z|; always the exact minimizer.
inline TransformModel fit_move_query(const Matrix& X, const IndicatorMatrix& J, double lambda) {
  auto sys = move_query_system(X, J, lambda);
  return {detail::solve_right(sys, lambda), Direction::MoveQuery, lambda, Solver::ExactMinimizer};
}

/// Convenience entry point on row-per-object training points.
inline TransformModel fit_transform(const Matrix& points, const TargetAssignment& targets,
                                    Direction direction, double lambda,
                                    Solver solver = Solver::PaperClosedForm) {
  const auto J = indicator_matrix(targets, static_cast<std::size_t>(points.rows()));
  const Matrix X = points.transpose();
  return direction == Direction::MoveLabeled ? fit_move_labeled(X, J, lambda, solver)
                                             : fit_move_query(X, J, lambda);
}

/// Maps every row through W.
inline Matrix transform_points(const TransformModel& model, const Matrix& points) {
  require_dims(points.cols(), model.dim(), "transform_points");
  return points * model.W.transpose();
}

/// |W gram - rhs|_F / |rhs|_F for the system the model was fitted against.
inline double normal_equation_residual(const TransformModel& model, const Matrix& X,
                                       const IndicatorMatrix& J) {
  const auto sys = model.direction == Direction::MoveLabeled
                       ? move_labeled_system(X, J, model.lambda, model.solver)
                       : move_query_system(X, J, model.lambda);
  const double scale = sys.rhs.norm();
  const double resid = (model.W * sys.gram - sys.rhs).norm();
  return scale > 0 ? resid / scale : resid;
}

/// Value of the regularized squared-loss objective at W.
///
/// MoveLabeled: sum_i sum_{j in T_i} |x_i - W x_j|^2 + lambda |W|_F^2.
/// MoveQuery:   sum_i sum_{j in T_i} |W x_i - x_j|^2 + lambda |W|_F^2.
inline double ridge_objective(const Matrix& W, const Matrix& X, const TargetAssignment& targets,
                              double lambda, Direction direction) {
  require_dims(X.cols(), static_cast<Index>(targets.size()), "ridge_objective");
  const Matrix WX = W * X;
  double total = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto ii = static_cast<Index>(i);
    for (auto j : targets.targets_of[i]) {
      const auto jj = static_cast<Index>(j);
      total += direction == Direction::MoveLabeled ? (X.col(ii) - WX.col(jj)).squaredNorm()
                                                   : (WX.col(ii) - X.col(jj)).squaredNorm();
    }
  }
  return total + lambda * W.squaredNorm();
}

}  // namespace ridgeknn
