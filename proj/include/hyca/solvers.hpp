#ifndef HYCA_SOLVERS_HPP
#define HYCA_SOLVERS_HPP

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "hyca/error.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

// History-only predictors. Each one forecasts y(t_n + kappa * h_c) from
// cached values y_n, y_{n-1}, ... on a uniform grid of spacing h_c. Every
// predictor is a fixed linear combination of the history, so h_c cancels out
// and only kappa (the offset in grid units) enters the weights.
//
// Slopes are backward secants g_j = (y_j - y_{j-1}) / h_c. Implicit families
// are closed history-only: AM as an AB-predicted corrector, BDF with the
// new-point slope extrapolated from the secant sequence.

enum class SolverFamily { Reuse, TF, AB, AM, BDF, RKHeun };

struct SolverSpec {
  SolverFamily family = SolverFamily::Reuse;
  int order = 0;

  /// Number of cached points the predictor reads.
  int history_required() const noexcept;
  /// Short form used in plans and CLI flags: REUSE, TF2, AB3, AM2, BDF2, RK.
  std::string name() const;

  friend bool operator==(const SolverSpec&, const SolverSpec&) = default;
};

/// Throws ValidationError for unsupported family/order combinations.
SolverSpec make_solver(SolverFamily family, int order);
SolverSpec parse_solver(std::string_view name);

/// [REUSE, TF1, TF2, TF3, AB2, AB3, AM2, BDF2, RK], cheapest / most stable first.
std::vector<SolverSpec> default_solver_pool();
/// Parses and validates names; rejects duplicates and empty lists.
std::vector<SolverSpec> solver_pool(std::span<const std::string> names);

/// Weights w with sum_j w_j u_j^p = kappa^p / (p + 1) for p < nodes.size(),
/// i.e. the rule integrating the interpolant through `nodes` over [0, kappa],
/// divided by kappa.
Eigen::VectorXd quadrature_weights(std::span<const double> nodes, double kappa);

/// Adams-Bashforth weights on derivative nodes 0, -1, ..., -(steps-1).
Eigen::VectorXd adams_bashforth_weights(int steps, double kappa);
/// Adams-Moulton weights on derivative nodes kappa, 0, -1, ..., -(steps-1).
Eigen::VectorXd adams_moulton_weights(int steps, double kappa);
/// Derivative at kappa of the Lagrange basis on kappa, 0, -1, ..., -(steps-1).
Eigen::VectorXd bdf_derivative_weights(int steps, double kappa);
/// Newton backward coefficients kappa (kappa+1) ... (kappa+i-1) / i!, i = 0..order.
Eigen::VectorXd newton_backward_coefficients(int order, double kappa);

/// Weights over the last history_required() values, oldest first.
Eigen::VectorXd predictor_weights(const SolverSpec& spec, double kappa);

namespace detail {
void check_prediction_inputs(const SolverSpec& spec, Index rows, double kappa);
}

/// Predicts one row from a chronological history (rows = cached steps,
/// columns = dimensions). Only the newest history_required() rows are read.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, 1, Eigen::Dynamic> predict(
    const SolverSpec& spec, const Eigen::MatrixBase<Derived>& history, double kappa) {
  using Scalar = typename Derived::Scalar;
  detail::check_prediction_inputs(spec, history.rows(), kappa);
  const Index needed = spec.history_required();
  if (!history.bottomRows(needed).allFinite()) {
    throw ValidationError("prediction from a non-finite history");
  }
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w =
      predictor_weights(spec, kappa).template cast<Scalar>();
  return w.transpose() * history.bottomRows(needed);
}

/// Scalar convenience form; history is chronological.
double predict(const SolverSpec& spec, std::span<const double> history, double kappa);

enum class StepKind { Computed, Predicted };

/// Cache of fully computed feature rows, keyed by step index. Predictions
/// are rejected: the buffer only ever holds computed values.
class HistoryBuffer {
 public:
  explicit HistoryBuffer(Index dims) : dims_(dims) {}

  /// Throws unless kind == Computed and step is newer than every entry.
  void record(Index step, StepKind kind, const Eigen::Ref<const Eigen::RowVectorXd>& row);

  Index dims() const noexcept { return dims_; }
  std::size_t size() const noexcept { return steps_.size(); }
  bool empty() const noexcept { return steps_.empty(); }
  Index newest_step() const;
  bool contains(Index step) const;
  const std::vector<Index>& steps() const noexcept { return steps_; }

  /// Rows for steps newest - (count-1)*stride, ..., newest in chronological
  /// order, restricted to `columns` when given. Empty when any step is missing.
  std::optional<Eigen::MatrixXd> gather(Index newest, Index stride, Index count,
                                        std::span<const Index> columns = {}) const;

 private:
  Index dims_;
  std::vector<Index> steps_;
  std::vector<Eigen::RowVectorXd> rows_;
};

/// Which polynomial-exactness test to run.
///   Values: predict() on monomial samples.
///   Slopes: the coefficient table fed exact derivatives (AB, AM, BDF, RK).
///   Auto:   Values for REUSE/TF, Slopes otherwise.
enum class ExactnessForm { Auto, Values, Slopes };

/// True iff every monomial t^p, p <= degree, is reproduced at
/// kappa in {0.5, 1, 2} to 1e-9 relative. degree must be in [0, 5].
bool exactness_check(const SolverSpec& spec, int degree,
                     ExactnessForm form = ExactnessForm::Auto);

}  // namespace hyca

#endif  // HYCA_SOLVERS_HPP
