#include "hyca/solvers.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>

namespace hyca {

namespace {

// Weight vectors below are indexed newest-first: entry j multiplies y_{n-j}.
using Weights = Eigen::VectorXd;

Weights unit(Index size, Index offset) {
  Weights w = Weights::Zero(size);
  w[offset] = 1.0;
  return w;
}

// Backward secant g_{n-j} with h_c = 1.
Weights secant(Index size, Index j) { return unit(size, j) - unit(size, j + 1); }

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

// Newton backward extrapolation over `points` newest-first samples.
Weights newton_backward(int order, double kappa, Index points) {
  const Eigen::VectorXd c = newton_backward_coefficients(order, kappa);
  Weights w = Weights::Zero(points);
  for (int i = 0; i <= order; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double sign = (j % 2 == 0) ? 1.0 : -1.0;
      w[j] += c[i] * sign * binomial(i, j);
    }
  }
  return w;
}

Weights adams_bashforth(int steps, double kappa, Index size) {
  const Eigen::VectorXd beta = adams_bashforth_weights(steps, kappa);
  Weights w = unit(size, 0);
  for (int j = 0; j < steps; ++j) w += kappa * beta[j] * secant(size, j);
  return w;
}

Weights adams_moulton(int steps, double kappa, Index size) {
  const Weights predicted = adams_bashforth(steps, kappa, size);
  const Weights new_slope = (predicted - unit(size, 0)) / kappa;
  const Eigen::VectorXd alpha = adams_moulton_weights(steps, kappa);
  Weights w = unit(size, 0) + kappa * alpha[0] * new_slope;
  for (int j = 0; j < steps; ++j) w += kappa * alpha[j + 1] * secant(size, j);
  return w;
}

Weights backward_differentiation(int steps, double kappa, Index size) {
  // Slope at the new point: Newton extrapolation of the secant sequence.
  const Weights over_slopes = newton_backward(steps - 1, kappa, steps);
  Weights new_slope = Weights::Zero(size);
  for (int j = 0; j < steps; ++j) new_slope += over_slopes[j] * secant(size, j);

  const Eigen::VectorXd l = bdf_derivative_weights(steps, kappa);
  Weights w = new_slope;
  for (int j = 0; j < steps; ++j) w -= l[j + 1] * unit(size, j);
  return w / l[0];
}

Weights heun(double kappa) {
  const Weights g = secant(2, 0);
  const Weights euler = unit(2, 0) + kappa * g;
  const Weights end_slope = (euler - unit(2, 0)) / kappa;
  return unit(2, 0) + kappa * 0.5 * (g + end_slope);
}

std::vector<double> derivative_nodes(int steps, std::optional<double> leading) {
  std::vector<double> nodes;
  if (leading) nodes.push_back(*leading);
  for (int j = 0; j < steps; ++j) nodes.push_back(-static_cast<double>(j));
  return nodes;
}

bool close_relative(double got, double want) {
  return std::abs(got - want) <= 1e-9 * std::max(1.0, std::abs(want));
}

}  // namespace

int SolverSpec::history_required() const noexcept {
  switch (family) {
    case SolverFamily::Reuse:
      return 1;
    case SolverFamily::TF:
    case SolverFamily::AB:
    case SolverFamily::AM:
    case SolverFamily::BDF:
      return order + 1;
    case SolverFamily::RKHeun:
      return 2;
  }
  return 1;
}

std::string SolverSpec::name() const {
  switch (family) {
    case SolverFamily::Reuse:
      return "REUSE";
    case SolverFamily::TF:
      return "TF" + std::to_string(order);
    case SolverFamily::AB:
      return "AB" + std::to_string(order);
    case SolverFamily::AM:
      return "AM" + std::to_string(order);
    case SolverFamily::BDF:
      return "BDF" + std::to_string(order);
    case SolverFamily::RKHeun:
      return "RK";
  }
  return "?";
}

SolverSpec make_solver(SolverFamily family, int order) {
  bool ok = false;
  switch (family) {
    case SolverFamily::Reuse:
      ok = order == 0;
      break;
    case SolverFamily::TF:
      ok = order >= 1 && order <= 4;
      break;
    case SolverFamily::AB:
    case SolverFamily::AM:
    case SolverFamily::BDF:
      ok = order >= 1 && order <= 3;
      break;
    case SolverFamily::RKHeun:
      ok = order == 2;
      break;
  }
  const SolverSpec spec{family, order};
  if (!ok) {
    throw ValidationError("unsupported solver order " + std::to_string(order) + " for " +
                          spec.name());
  }
  return spec;
}

SolverSpec parse_solver(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "REUSE") return make_solver(SolverFamily::Reuse, 0);
  if (upper == "RK") return make_solver(SolverFamily::RKHeun, 2);

  struct Prefix {
    std::string_view text;
    SolverFamily family;
  };
  // BDF before the two-letter prefixes so "BDF2" is not read as "B..."
  constexpr std::array<Prefix, 4> prefixes{{{"BDF", SolverFamily::BDF},
                                            {"TF", SolverFamily::TF},
                                            {"AB", SolverFamily::AB},
                                            {"AM", SolverFamily::AM}}};
  for (const auto& prefix : prefixes) {
    if (upper.size() <= prefix.text.size() || upper.compare(0, prefix.text.size(), prefix.text) != 0) {
      continue;
    }
    int order = 0;
    const char* begin = upper.data() + prefix.text.size();
    const char* end = upper.data() + upper.size();
    const auto [ptr, ec] = std::from_chars(begin, end, order);
    if (ec == std::errc() && ptr == end) return make_solver(prefix.family, order);
  }
  throw ValidationError("unknown solver '" + std::string(name) + "'");
}

std::vector<SolverSpec> default_solver_pool() {
  return {make_solver(SolverFamily::Reuse, 0), make_solver(SolverFamily::TF, 1),
          make_solver(SolverFamily::TF, 2),    make_solver(SolverFamily::TF, 3),
          make_solver(SolverFamily::AB, 2),    make_solver(SolverFamily::AB, 3),
          make_solver(SolverFamily::AM, 2),    make_solver(SolverFamily::BDF, 2),
          make_solver(SolverFamily::RKHeun, 2)};
}

std::vector<SolverSpec> solver_pool(std::span<const std::string> names) {
  if (names.empty()) throw ValidationError("solver pool is empty");
  std::vector<SolverSpec> pool;
  for (const auto& name : names) {
    const SolverSpec spec = parse_solver(name);
    if (std::find(pool.begin(), pool.end(), spec) != pool.end()) {
      throw ValidationError("duplicate solver " + spec.name() + " in pool");
    }
    pool.push_back(spec);
  }
  return pool;
}

Eigen::VectorXd quadrature_weights(std::span<const double> nodes, double kappa) {
  const auto n = static_cast<Index>(nodes.size());
  Eigen::MatrixXd vandermonde(n, n);
  Eigen::VectorXd moments(n);
  for (Index p = 0; p < n; ++p) {
    for (Index j = 0; j < n; ++j) vandermonde(p, j) = std::pow(nodes[static_cast<std::size_t>(j)], p);
    moments[p] = std::pow(kappa, p) / static_cast<double>(p + 1);
  }
  return vandermonde.fullPivLu().solve(moments);
}

Eigen::VectorXd adams_bashforth_weights(int steps, double kappa) {
  const auto nodes = derivative_nodes(steps, std::nullopt);
  return quadrature_weights(nodes, kappa);
}

Eigen::VectorXd adams_moulton_weights(int steps, double kappa) {
  const auto nodes = derivative_nodes(steps, kappa);
  return quadrature_weights(nodes, kappa);
}

Eigen::VectorXd bdf_derivative_weights(int steps, double kappa) {
  // Row p of V^T holds u_j^p; solving V^T l = d with d_p = p kappa^(p-1)
  // gives the derivative-at-kappa weights on node values.
  const auto nodes = derivative_nodes(steps, kappa);
  const auto n = static_cast<Index>(nodes.size());
  Eigen::MatrixXd powers(n, n);
  Eigen::VectorXd derivative(n);
  for (Index p = 0; p < n; ++p) {
    for (Index j = 0; j < n; ++j) powers(p, j) = std::pow(nodes[static_cast<std::size_t>(j)], p);
    derivative[p] = p == 0 ? 0.0 : static_cast<double>(p) * std::pow(kappa, p - 1);
  }
  return powers.fullPivLu().solve(derivative);
}

Eigen::VectorXd newton_backward_coefficients(int order, double kappa) {
  Eigen::VectorXd c(order + 1);
  c[0] = 1.0;
  for (int i = 1; i <= order; ++i) c[i] = c[i - 1] * (kappa + i - 1) / i;
  return c;
}

Eigen::VectorXd predictor_weights(const SolverSpec& spec, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ValidationError("prediction offset kappa must be positive");
  }
  const Index size = spec.history_required();
  Weights newest_first;
  switch (spec.family) {
    case SolverFamily::Reuse:
      newest_first = unit(1, 0);
      break;
    case SolverFamily::TF:
      newest_first = newton_backward(spec.order, kappa, size);
      break;
    case SolverFamily::AB:
      newest_first = adams_bashforth(spec.order, kappa, size);
      break;
    case SolverFamily::AM:
      newest_first = adams_moulton(spec.order, kappa, size);
      break;
    case SolverFamily::BDF:
      newest_first = backward_differentiation(spec.order, kappa, size);
      break;
    case SolverFamily::RKHeun:
      newest_first = heun(kappa);
      break;
  }
  return newest_first.reverse();
}

namespace detail {
void check_prediction_inputs(const SolverSpec& spec, Index rows, double kappa) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) {
    throw ValidationError("prediction offset kappa must be positive");
  }
  if (rows < spec.history_required()) {
    throw ValidationError(spec.name() + " needs " + std::to_string(spec.history_required()) +
                          " cached points, history has " + std::to_string(rows));
  }
}
}  // namespace detail

double predict(const SolverSpec& spec, std::span<const double> history, double kappa) {
  const Eigen::Map<const Eigen::VectorXd> column(history.data(),
                                                  static_cast<Index>(history.size()));
  return predict(spec, column, kappa)[0];
}

void HistoryBuffer::record(Index step, StepKind kind,
                           const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  if (kind != StepKind::Computed) {
    throw ValidationError("history buffer only accepts computed steps (step " +
                          std::to_string(step) + " was predicted)");
  }
  if (row.size() != dims_) throw ValidationError("history row has the wrong dimension");
  if (!steps_.empty() && step <= steps_.back()) {
    throw ValidationError("history steps must be strictly increasing");
  }
  steps_.push_back(step);
  rows_.emplace_back(row);
}

Index HistoryBuffer::newest_step() const {
  if (steps_.empty()) throw ValidationError("history buffer is empty");
  return steps_.back();
}

bool HistoryBuffer::contains(Index step) const {
  return std::binary_search(steps_.begin(), steps_.end(), step);
}

std::optional<Eigen::MatrixXd> HistoryBuffer::gather(Index newest, Index stride, Index count,
                                                     std::span<const Index> columns) const {
  const Index width = columns.empty() ? dims_ : static_cast<Index>(columns.size());
  Eigen::MatrixXd out(count, width);
  for (Index m = 0; m < count; ++m) {
    const Index step = newest - (count - 1 - m) * stride;
    const auto it = std::lower_bound(steps_.begin(), steps_.end(), step);
    if (step < 0 || it == steps_.end() || *it != step) return std::nullopt;
    const Eigen::RowVectorXd& row = rows_[static_cast<std::size_t>(it - steps_.begin())];
    if (columns.empty()) {
      out.row(m) = row;
    } else {
      for (Index c = 0; c < width; ++c) out(m, c) = row[columns[static_cast<std::size_t>(c)]];
    }
  }
  return out;
}

bool exactness_check(const SolverSpec& spec, int degree, ExactnessForm form) {
  if (degree < 0 || degree > 5) throw ValidationError("exactness degree must be in [0, 5]");
  if (form == ExactnessForm::Auto) {
    form = (spec.family == SolverFamily::Reuse || spec.family == SolverFamily::TF)
               ? ExactnessForm::Values
               : ExactnessForm::Slopes;
  }
  const int points = spec.history_required();
  // Newest sample sits at t_n; older ones at t_n - 1, t_n - 2, ... (h_c = 1).
  const double t_n = static_cast<double>(points);
  constexpr std::array<double, 3> offsets{0.5, 1.0, 2.0};

  for (int p = 0; p <= degree; ++p) {
    auto y = [p](double t) { return std::pow(t, p); };
    auto dy = [p](double t) { return p == 0 ? 0.0 : p * std::pow(t, p - 1); };
    for (const double kappa : offsets) {
      const double want = y(t_n + kappa);
      double got = 0.0;
      if (form == ExactnessForm::Values) {
        std::vector<double> history(static_cast<std::size_t>(points));
        for (int m = 0; m < points; ++m) history[static_cast<std::size_t>(m)] = y(t_n - (points - 1 - m));
        got = predict(spec, history, kappa);
      } else {
        switch (spec.family) {
          case SolverFamily::Reuse:
          case SolverFamily::TF:
            throw ValidationError(spec.name() + " has no slope form");
          case SolverFamily::AB: {
            const Eigen::VectorXd beta = adams_bashforth_weights(spec.order, kappa);
            double slope = 0.0;
            for (int j = 0; j < spec.order; ++j) slope += beta[j] * dy(t_n - j);
            got = y(t_n) + kappa * slope;
            break;
          }
          case SolverFamily::AM: {
            const Eigen::VectorXd alpha = adams_moulton_weights(spec.order, kappa);
            double slope = alpha[0] * dy(t_n + kappa);
            for (int j = 0; j < spec.order; ++j) slope += alpha[j + 1] * dy(t_n - j);
            got = y(t_n) + kappa * slope;
            break;
          }
          case SolverFamily::BDF: {
            const Eigen::VectorXd l = bdf_derivative_weights(spec.order, kappa);
            double rhs = dy(t_n + kappa);
            for (int j = 0; j < spec.order; ++j) rhs -= l[j + 1] * y(t_n - j);
            got = rhs / l[0];
            break;
          }
          case SolverFamily::RKHeun:
            got = y(t_n) + kappa * 0.5 * (dy(t_n) + dy(t_n + kappa));
            break;
        }
      }
      if (!close_relative(got, want)) return false;
    }
  }
  return true;
}

}  // namespace hyca
