#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "ridgeknn/ridgeknn.hpp"

using namespace ridgeknn;

namespace {

struct Problem {
  Matrix X;  // d x n
  LabelList y;
  TargetAssignment targets;
  IndicatorMatrix J;
};

Problem make_problem(std::mt19937_64& rng, Index d, Index n, int classes, int k_targets) {
  Problem p;
  p.X = oracle::random_matrix(rng, d, n);
  p.y.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) p.y[static_cast<std::size_t>(i)] = static_cast<int>(i % classes);
  p.targets = select_targets(Matrix(p.X.transpose()), p.y, k_targets);
  p.J = indicator_matrix(p.targets, static_cast<std::size_t>(n));
  return p;
}

IndicatorMatrix identity_indicator(Index n) {
  TargetAssignment t;
  for (Index i = 0; i < n; ++i) t.targets_of.push_back({static_cast<std::size_t>(i)});
  return indicator_matrix(t, static_cast<std::size_t>(n));
}

double rel(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(FitMoveLabeled, IdentityTargetsGiveIdentity) {
  std::mt19937_64 rng(1);
  const Matrix X = oracle::random_matrix(rng, 6, 30);
  const auto J = identity_indicator(30);
  for (auto solver : {Solver::PaperClosedForm, Solver::ExactMinimizer}) {
    const auto m = fit_move_labeled(X, J, 0.0, solver);
    EXPECT_LT((m.W - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_EQ(m.direction, Direction::MoveLabeled);
    EXPECT_EQ(m.solver, solver);
  }
  EXPECT_LT((fit_move_query(X, J, 0.0).W - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(FitMoveLabeled, HugeLambdaShrinksToZero) {
  std::mt19937_64 rng(2);
  const auto p = make_problem(rng, 5, 40, 2, 1);
  const double rhs = (p.X * p.J * p.X.transpose()).norm();
  for (auto solver : {Solver::PaperClosedForm, Solver::ExactMinimizer}) {
    const auto m = fit_move_labeled(p.X, p.J, 1e12, solver);
    EXPECT_LE(m.W.norm(), rhs / 1e12 * (1.0 + 1e-9));
    EXPECT_LT(m.W.norm(), 1e-8);
  }
  EXPECT_LT(fit_move_query(p.X, p.J, 1e12).W.norm(), 1e-8);
}

TEST(FitMoveLabeled, ExactMinimizerMatchesGradientDescent) {
  std::mt19937_64 rng(512);
  const auto p = make_problem(rng, 5, 12, 2, 1);
  const auto m = fit_move_labeled(p.X, p.J, 0.1, Solver::ExactMinimizer);
  const auto f = oracle::move_labeled_objective(p.X, oracle::pairs_of(p.targets.targets_of), 0.1);
  const Matrix W_gd = oracle::gradient_descent(f);
  EXPECT_LT((m.W - W_gd).norm(), 1e-6);
  EXPECT_LT(normal_equation_residual(m, p.X, p.J), 1e-8);
}

TEST(FitMoveQuery, MatchesGradientDescent) {
  std::mt19937_64 rng(513);
  for (int k : {1, 2, 3}) {
    const auto p = make_problem(rng, 5, 12, 2, k);
    const auto m = fit_move_query(p.X, p.J, 0.1);
    EXPECT_EQ(m.direction, Direction::MoveQuery);
    const auto f = oracle::move_query_objective(p.X, oracle::pairs_of(p.targets.targets_of), 0.1);
    EXPECT_LT((m.W - oracle::gradient_descent(f)).norm(), 1e-6) << "k_targets=" << k;
  }
}

TEST(FitMoveQuery, EqualsSwappedRolesRegression) {
  // Regressing responses z_j on inputs x_i: W = (sum z x^T)(sum x x^T + lambda I)^-1.
  std::mt19937_64 rng(21);
  const auto p = make_problem(rng, 4, 30, 3, 2);
  Matrix A = Matrix::Zero(4, 4), G = 0.5 * Matrix::Identity(4, 4);
  for (std::size_t i = 0; i < p.targets.size(); ++i) {
    for (auto j : p.targets.targets_of[i]) {
      A += p.X.col(static_cast<Index>(j)) * p.X.col(static_cast<Index>(i)).transpose();
      G += p.X.col(static_cast<Index>(i)) * p.X.col(static_cast<Index>(i)).transpose();
    }
  }
  const Matrix expected = A * G.inverse();
  EXPECT_LT(rel(fit_move_query(p.X, p.J, 0.5).W, expected), 1e-10);
}

TEST(FitMoveLabeled, ClosedFormSolvesItsOwnNormalEquation) {
  std::mt19937_64 rng(7);
  const auto p = make_problem(rng, 6, 40, 3, 2);
  const double lambda = 0.3;
  const Matrix Jd = Matrix(p.J);
  const Matrix expected = p.X * Jd * p.X.transpose() *
                          (p.X * p.X.transpose() + lambda * Matrix::Identity(6, 6)).inverse();
  const auto m = fit_move_labeled(p.X, p.J, lambda);
  EXPECT_EQ(m.solver, Solver::PaperClosedForm);
  EXPECT_LT(rel(m.W, expected), 1e-10);
  EXPECT_LT(normal_equation_residual(m, p.X, p.J), 1e-8);
}

TEST(FitMoveLabeled, SolversAgreeWhenEveryObjectIsTargetOnce) {
  std::mt19937_64 rng(8);
  const Matrix X = oracle::random_matrix(rng, 4, 10);
  TargetAssignment t;
  for (std::size_t i = 0; i < 10; ++i) t.targets_of.push_back({(i + 1) % 10});
  const auto J = indicator_matrix(t, 10);
  const auto a = fit_move_labeled(X, J, 0.2, Solver::PaperClosedForm);
  const auto b = fit_move_labeled(X, J, 0.2, Solver::ExactMinimizer);
  EXPECT_LT(rel(a.W, b.W), 1e-12);
}

TEST(FitMoveLabeled, SolversDisagreeWithUnevenTargetCounts) {
  std::mt19937_64 rng(9);
  const auto p = make_problem(rng, 4, 40, 2, 1);
  const auto c = (RowVector::Ones(40) * p.J).eval();
  ASSERT_GT(c.maxCoeff(), 1.0);
  const auto a = fit_move_labeled(p.X, p.J, 0.2, Solver::PaperClosedForm);
  const auto b = fit_move_labeled(p.X, p.J, 0.2, Solver::ExactMinimizer);
  EXPECT_GT(rel(a.W, b.W), 1e-3);
}

TEST(FitMoveLabeled, ShrinkageIsMonotoneInLambda) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = make_problem(rng, 5, 30, 3, 1 + trial % 2);
    for (auto solver : {Solver::PaperClosedForm, Solver::ExactMinimizer}) {
      double last = std::numeric_limits<double>::infinity();
      for (double lambda : {0.0, 1e-3, 1e-1, 1.0, 10.0, 1e3}) {
        const double norm = fit_move_labeled(p.X, p.J, lambda, solver).W.norm();
        EXPECT_LE(norm, last * (1 + 1e-12));
        last = norm;
      }
    }
  }
}

TEST(FitMoveLabeled, ExactMinimizerDominatesObjective) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = make_problem(rng, 4, 24, 2, 1 + trial % 3);
    const double lambda = trial % 2 ? 0.5 : 0.0;
    const auto exact = fit_move_labeled(p.X, p.J, lambda, Solver::ExactMinimizer);
    const auto closed = fit_move_labeled(p.X, p.J, lambda, Solver::PaperClosedForm);
    const auto obj = [&](const Matrix& W) {
      return ridge_objective(W, p.X, p.targets, lambda, Direction::MoveLabeled);
    };
    const double best = obj(exact.W);
    const double slack = 1e-10 * best;
    EXPECT_LE(best, obj(closed.W) + slack);
    EXPECT_LE(best, obj(Matrix::Identity(4, 4)) + slack);
    EXPECT_LE(best, obj(Matrix::Zero(4, 4)) + slack);
  }
}

TEST(RidgeObjective, MatchesOracleValue) {
  std::mt19937_64 rng(12);
  const auto p = make_problem(rng, 3, 15, 2, 2);
  const Matrix W = oracle::random_matrix(rng, 3, 3);
  const auto pairs = oracle::pairs_of(p.targets.targets_of);
  EXPECT_NEAR(ridge_objective(W, p.X, p.targets, 0.7, Direction::MoveLabeled),
              oracle::move_labeled_objective(p.X, pairs, 0.7).value(W), 1e-10);
  EXPECT_NEAR(ridge_objective(W, p.X, p.targets, 0.7, Direction::MoveQuery),
              oracle::move_query_objective(p.X, pairs, 0.7).value(W), 1e-10);
}

TEST(FitMoveLabeled, PermutationInvariant) {
  std::mt19937_64 rng(13);
  const auto p = make_problem(rng, 5, 30, 3, 2);
  std::vector<std::size_t> perm(30);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::size_t> inv(30);
  for (std::size_t a = 0; a < 30; ++a) inv[perm[a]] = a;
  Matrix Xp(5, 30);
  TargetAssignment tp;
  tp.k_targets = 2;
  for (std::size_t a = 0; a < 30; ++a) {
    Xp.col(static_cast<Index>(a)) = p.X.col(static_cast<Index>(perm[a]));
    IndexList list;
    for (auto j : p.targets.targets_of[perm[a]]) list.push_back(inv[j]);
    tp.targets_of.push_back(list);
  }
  const auto Jp = indicator_matrix(tp, 30);
  for (auto solver : {Solver::PaperClosedForm, Solver::ExactMinimizer}) {
    EXPECT_LT(rel(fit_move_labeled(Xp, Jp, 0.1, solver).W, fit_move_labeled(p.X, p.J, 0.1, solver).W),
              1e-10);
  }
  EXPECT_LT(rel(fit_move_query(Xp, Jp, 0.1).W, fit_move_query(p.X, p.J, 0.1).W), 1e-10);
}

TEST(FitMoveLabeled, MappedTargetsHaveSmallerVariance) {
  std::mt19937_64 rng(14);
  const Index d = 10;
  const auto p = make_problem(rng, d, 20 * d, 4, 1);
  const auto m = fit_move_labeled(p.X, p.J, 1.0);
  const auto total_variance = [](const Matrix& cols) {
    const Matrix c = cols.colwise() - cols.rowwise().mean();
    return c.squaredNorm() / static_cast<double>(cols.cols() - 1);
  };
  Matrix mapped(d, p.X.cols()), responses(d, p.X.cols());
  for (Index i = 0; i < p.X.cols(); ++i) {
    const auto j = static_cast<Index>(p.targets.targets_of[static_cast<std::size_t>(i)][0]);
    mapped.col(i) = m.W * p.X.col(j);
    responses.col(i) = p.X.col(i);
  }
  EXPECT_LT(total_variance(mapped), total_variance(responses));
}

TEST(FitMoveLabeled, Errors) {
  std::mt19937_64 rng(15);
  const auto p = make_problem(rng, 8, 6, 2, 1);  // n < d: singular Gram
  EXPECT_THROW(fit_move_labeled(p.X, p.J, 0.0), SingularSystemError);
  EXPECT_THROW(fit_move_labeled(p.X, p.J, 0.0, Solver::ExactMinimizer), SingularSystemError);
  EXPECT_THROW(fit_move_query(p.X, p.J, 0.0), SingularSystemError);
  EXPECT_NO_THROW(fit_move_labeled(p.X, p.J, 0.1));
  EXPECT_THROW(fit_move_labeled(p.X, identity_indicator(7), 0.1), DimensionError);
  EXPECT_THROW(fit_move_query(p.X, identity_indicator(5), 0.1), DimensionError);
  EXPECT_THROW(fit_move_labeled(p.X, p.J, -1.0), InvalidArgument);
  EXPECT_THROW(fit_move_labeled(p.X, p.J, std::numeric_limits<double>::quiet_NaN()), InvalidArgument);
}

TEST(TransformPoints, Examples) {
  std::mt19937_64 rng(16);
  const Matrix pts = oracle::random_matrix(rng, 7, 4);
  TransformModel id{Matrix::Identity(4, 4)};
  EXPECT_TRUE(transform_points(id, pts) == pts);
  TransformModel zero{Matrix::Zero(4, 4)};
  EXPECT_EQ(transform_points(zero, pts).norm(), 0.0);

  TransformModel m{oracle::random_matrix(rng, 4, 4)};
  const Matrix got = transform_points(m, pts);
  for (Index i = 0; i < 7; ++i) {
    for (Index r = 0; r < 4; ++r) {
      double s = 0.0;
      for (Index c = 0; c < 4; ++c) s += m.W(r, c) * pts(i, c);
      EXPECT_NEAR(got(i, r), s, 1e-12);
    }
  }
  EXPECT_THROW(transform_points(m, Matrix::Zero(2, 3)), DimensionError);
}

TEST(TransformModel, JsonRoundTrip) {
  std::mt19937_64 rng(17);
  const auto p = make_problem(rng, 3, 12, 2, 1);
  const auto m = fit_move_labeled(p.X, p.J, 0.1);
  const auto j = to_json(m);
  EXPECT_EQ(j.at("version"), 1);
  EXPECT_EQ(j.at("direction"), "move-labeled");
  EXPECT_EQ(j.at("solver"), "paper");
  EXPECT_EQ(j.at("d"), 3);
  const auto back = transform_from_json(Json::parse(j.dump()));
  EXPECT_TRUE(back.W == m.W);
  EXPECT_EQ(back.lambda, 0.1);

  auto bad = j;
  bad["d"] = 4;
  EXPECT_THROW(transform_from_json(bad), Error);
  bad = j;
  bad["version"] = 2;
  EXPECT_THROW(transform_from_json(bad), Error);
  bad = j;
  bad["direction"] = "sideways";
  EXPECT_THROW(transform_from_json(bad), InvalidArgument);
}
