#ifndef HYCA_TRAJECTORY_HPP
#define HYCA_TRAJECTORY_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace hyca {

using Index = Eigen::Index;

/// Reference RK4 substeps per trajectory step unless the caller says otherwise.
inline constexpr int kDefaultSubsteps = 100;

/// Feature values sampled on a uniform timestep grid. Rows are timesteps,
/// columns are feature dimensions. Immutable once constructed.
class TrajectoryTensor {
 public:
  /// Throws ValidationError unless steps >= 2, dims >= 1, h > 0 and every
  /// entry is finite.
  TrajectoryTensor(Eigen::MatrixXd values, double step_size);

  Index num_steps() const noexcept { return values_.rows(); }
  Index num_dims() const noexcept { return values_.cols(); }
  double step_size() const noexcept { return step_size_; }
  const Eigen::MatrixXd& values() const noexcept { return values_; }

  auto row(Index k) const { return values_.row(k); }
  auto column(Index d) const { return values_.col(d); }

  TrajectoryTensor scaled(double alpha) const;

  /// Bitwise equality of shape, step size and payload.
  friend bool operator==(const TrajectoryTensor& a, const TrajectoryTensor& b);

 private:
  Eigen::MatrixXd values_;
  double step_size_;
};

/// Closed parameter interval a uniform draw is taken from.
struct ParamRange {
  double min = 0.0;
  double max = 0.0;
};

/// dx/dt = -rate * x
struct ExpDecaySpec {
  std::size_t size = 0;
  ParamRange rate{0.5, 2.0};
};

/// Adjacent (x, v) pairs: dx/dt = v, dv/dt = -omega^2 x - 2 zeta omega v.
/// size counts dimensions, so it must be even.
struct DampedOscillatorSpec {
  std::size_t size = 0;
  ParamRange omega{2.0, 6.0};
  ParamRange zeta{0.0, 0.2};
};

/// Exponential decay with rate >= 50.
struct StiffDecaySpec {
  std::size_t size = 0;
  ParamRange rate{50.0, 100.0};
};

/// dx/dt = slope
struct LinearDriftSpec {
  std::size_t size = 0;
  ParamRange slope{-1.0, 1.0};
};

/// dx/dt = rate * x * (1 - x / capacity)
struct LogisticSpec {
  std::size_t size = 0;
  ParamRange rate{1.0, 3.0};
  ParamRange capacity{1.0, 2.0};
};

using FamilySpec = std::variant<ExpDecaySpec, DampedOscillatorSpec,
                                StiffDecaySpec, LinearDriftSpec, LogisticSpec>;

enum class FamilyKind { ExpDecay, DampedOscillator, StiffDecay, LinearDrift, Logistic };

const char* to_string(FamilyKind kind) noexcept;
FamilyKind family_kind(const FamilySpec& spec) noexcept;
std::size_t family_size(const FamilySpec& spec) noexcept;

/// Ordered list of dimension groups. Group i occupies the next size_i
/// dimensions and carries ground-truth label i.
struct MixtureSpec {
  std::vector<FamilySpec> families;
};

/// A mixture spec plus the seed its parameters are drawn with.
struct SystemConfig {
  MixtureSpec mixture;
  std::uint64_t seed = 0;
};

struct FamilyLabels {
  std::vector<int> labels;
  int num_families = 0;
};

/// Parameters governing a single dimension. Oscillator dimensions reference
/// their pair partner.
struct DimensionLaw {
  FamilyKind kind = FamilyKind::ExpDecay;
  double a = 0.0;  // rate / omega / slope
  double b = 0.0;  // zeta / capacity
  Index partner = -1;
  bool velocity = false;
};

/// An explicit autonomous vector field over D dimensions with known family
/// labels. Built by generate_system().
class SyntheticSystem {
 public:
  Index total_dims() const noexcept { return static_cast<Index>(laws_.size()); }
  std::uint64_t seed() const noexcept { return seed_; }
  const MixtureSpec& spec() const noexcept { return spec_; }
  const FamilyLabels& labels() const noexcept { return labels_; }
  const std::vector<DimensionLaw>& laws() const noexcept { return laws_; }

  Eigen::VectorXd vector_field(const Eigen::Ref<const Eigen::VectorXd>& x) const;

 private:
  friend SyntheticSystem generate_system(const MixtureSpec& spec, std::uint64_t seed);

  MixtureSpec spec_;
  std::uint64_t seed_ = 0;
  FamilyLabels labels_;
  std::vector<DimensionLaw> laws_;
};

/// Draws per-dimension parameters uniformly from the declared ranges.
/// Deterministic in (spec, seed) on every platform.
SyntheticSystem generate_system(const MixtureSpec& spec, std::uint64_t seed);

/// A family-appropriate random initial state, deterministic in seed.
Eigen::VectorXd initial_state(const SyntheticSystem& system, std::uint64_t seed);

/// Classical RK4, `substeps` steps of size dt / substeps.
Eigen::VectorXd integrate_reference(const SyntheticSystem& system,
                                    const Eigen::Ref<const Eigen::VectorXd>& state,
                                    double t, double dt,
                                    int substeps = kDefaultSubsteps);

/// Row k is integrate_reference iterated k times from x0.
TrajectoryTensor sample_trajectory(const SyntheticSystem& system,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0,
                                   Index steps, double h,
                                   int substeps = kDefaultSubsteps);

}  // namespace hyca

#endif  // HYCA_TRAJECTORY_HPP
