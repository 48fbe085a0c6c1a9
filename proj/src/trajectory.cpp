#include "hyca/trajectory.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "hyca/error.hpp"

namespace hyca {

namespace {

// Portable uniform draw in [0, 1): std::uniform_real_distribution is
// implementation-defined, mt19937_64 is not.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& rng, const ParamRange& range) {
  return range.min + (range.max - range.min) * unit_draw(rng);
}

void check_range(const ParamRange& range, const char* family, const char* name,
                 double lower_bound) {
  if (!std::isfinite(range.min) || !std::isfinite(range.max)) {
    throw ValidationError(std::string(family) + "." + name + ": non-finite range");
  }
  if (range.min > range.max) {
    std::ostringstream os;
    os << family << "." << name << ": invalid range (min " << range.min
       << " > max " << range.max << ")";
    throw ValidationError(os.str());
  }
  if (range.min < lower_bound) {
    std::ostringstream os;
    os << family << "." << name << ": min " << range.min << " below " << lower_bound;
    throw ValidationError(os.str());
  }
}

constexpr double kNoBound = -std::numeric_limits<double>::infinity();

}  // namespace

TrajectoryTensor::TrajectoryTensor(Eigen::MatrixXd values, double step_size)
    : values_(std::move(values)), step_size_(step_size) {
  if (values_.rows() < 2) throw ValidationError("trajectory needs at least 2 steps");
  if (values_.cols() < 1) throw ValidationError("trajectory needs at least 1 dimension");
  if (!(step_size_ > 0.0) || !std::isfinite(step_size_)) {
    throw ValidationError("trajectory step size must be positive and finite");
  }
  if (!values_.allFinite()) throw ValidationError("trajectory contains non-finite values");
}

TrajectoryTensor TrajectoryTensor::scaled(double alpha) const {
  return TrajectoryTensor(values_ * alpha, step_size_);
}

bool operator==(const TrajectoryTensor& a, const TrajectoryTensor& b) {
  if (a.num_steps() != b.num_steps() || a.num_dims() != b.num_dims()) return false;
  if (std::memcmp(&a.step_size_, &b.step_size_, sizeof(double)) != 0) return false;
  const auto bytes = static_cast<std::size_t>(a.values_.size()) * sizeof(double);
  return std::memcmp(a.values_.data(), b.values_.data(), bytes) == 0;
}

const char* to_string(FamilyKind kind) noexcept {
  switch (kind) {
    case FamilyKind::ExpDecay:
      return "exp_decay";
    case FamilyKind::DampedOscillator:
      return "damped_oscillator";
    case FamilyKind::StiffDecay:
      return "stiff_decay";
    case FamilyKind::LinearDrift:
      return "linear_drift";
    case FamilyKind::Logistic:
      return "logistic";
  }
  return "unknown";
}

FamilyKind family_kind(const FamilySpec& spec) noexcept {
  return static_cast<FamilyKind>(spec.index());
}

std::size_t family_size(const FamilySpec& spec) noexcept {
  return std::visit([](const auto& f) { return f.size; }, spec);
}

Eigen::VectorXd SyntheticSystem::vector_field(
    const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Eigen::VectorXd f(x.size());
  for (Index d = 0; d < total_dims(); ++d) {
    const DimensionLaw& law = laws_[static_cast<std::size_t>(d)];
    switch (law.kind) {
      case FamilyKind::ExpDecay:
      case FamilyKind::StiffDecay:
        f[d] = -law.a * x[d];
        break;
      case FamilyKind::LinearDrift:
        f[d] = law.a;
        break;
      case FamilyKind::Logistic:
        f[d] = law.a * x[d] * (1.0 - x[d] / law.b);
        break;
      case FamilyKind::DampedOscillator:
        if (law.velocity) {
          f[d] = -law.a * law.a * x[law.partner] - 2.0 * law.b * law.a * x[d];
        } else {
          f[d] = x[law.partner];
        }
        break;
    }
  }
  return f;
}

SyntheticSystem generate_system(const MixtureSpec& spec, std::uint64_t seed) {
  if (spec.families.empty()) throw ValidationError("mixture spec lists no families");

  SyntheticSystem system;
  system.spec_ = spec;
  system.seed_ = seed;
  system.labels_.num_families = static_cast<int>(spec.families.size());

  std::mt19937_64 rng(seed);
  for (std::size_t group = 0; group < spec.families.size(); ++group) {
    const FamilySpec& family = spec.families[group];
    const std::size_t size = family_size(family);
    const char* name = to_string(family_kind(family));
    if (size == 0) {
      throw ValidationError(std::string(name) + ": group size must be positive");
    }
    const int label = static_cast<int>(group);
    auto push = [&](DimensionLaw law) {
      system.laws_.push_back(law);
      system.labels_.labels.push_back(label);
    };

    std::visit(
        [&](const auto& f) {
          using T = std::decay_t<decltype(f)>;
          if constexpr (std::is_same_v<T, ExpDecaySpec>) {
            check_range(f.rate, name, "rate", 0.0);
            for (std::size_t i = 0; i < size; ++i) {
              push({FamilyKind::ExpDecay, draw(rng, f.rate)});
            }
          } else if constexpr (std::is_same_v<T, StiffDecaySpec>) {
            check_range(f.rate, name, "rate", 50.0);
            for (std::size_t i = 0; i < size; ++i) {
              push({FamilyKind::StiffDecay, draw(rng, f.rate)});
            }
          } else if constexpr (std::is_same_v<T, LinearDriftSpec>) {
            check_range(f.slope, name, "slope", kNoBound);
            for (std::size_t i = 0; i < size; ++i) {
              push({FamilyKind::LinearDrift, draw(rng, f.slope)});
            }
          } else if constexpr (std::is_same_v<T, LogisticSpec>) {
            check_range(f.rate, name, "rate", kNoBound);
            check_range(f.capacity, name, "capacity", 0.0);
            if (!(f.capacity.min > 0.0)) {
              throw ValidationError(std::string(name) + ".capacity must be positive");
            }
            for (std::size_t i = 0; i < size; ++i) {
              const double rate = draw(rng, f.rate);
              push({FamilyKind::Logistic, rate, draw(rng, f.capacity)});
            }
          } else {
            check_range(f.omega, name, "omega", 0.0);
            check_range(f.zeta, name, "zeta", 0.0);
            if (size % 2 != 0) {
              throw ValidationError(std::string(name) +
                                    ": group size must be even (x, v pairs)");
            }
            for (std::size_t i = 0; i < size; i += 2) {
              const double omega = draw(rng, f.omega);
              const double zeta = draw(rng, f.zeta);
              const auto base = static_cast<Index>(system.laws_.size());
              push({FamilyKind::DampedOscillator, omega, zeta, base + 1, false});
              push({FamilyKind::DampedOscillator, omega, zeta, base, true});
            }
          }
        },
        family);
  }
  return system;
}

Eigen::VectorXd initial_state(const SyntheticSystem& system, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(system.total_dims());
  for (Index d = 0; d < system.total_dims(); ++d) {
    const DimensionLaw& law = system.laws()[static_cast<std::size_t>(d)];
    switch (law.kind) {
      case FamilyKind::ExpDecay:
      case FamilyKind::StiffDecay: {
        const double magnitude = draw(rng, {0.5, 2.0});
        x[d] = unit_draw(rng) < 0.5 ? -magnitude : magnitude;
        break;
      }
      case FamilyKind::LinearDrift:
        x[d] = draw(rng, {-1.0, 1.0});
        break;
      case FamilyKind::Logistic:
        x[d] = draw(rng, {0.05, 0.3}) * law.b;
        break;
      case FamilyKind::DampedOscillator:
        x[d] = law.velocity ? draw(rng, {-1.0, 1.0}) * law.a : draw(rng, {-1.0, 1.0});
        break;
    }
  }
  return x;
}

Eigen::VectorXd integrate_reference(const SyntheticSystem& system,
                                    const Eigen::Ref<const Eigen::VectorXd>& state,
                                    double t, double dt, int substeps) {
  if (substeps < 1) throw ValidationError("substeps must be >= 1");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be positive");
  if (state.size() != system.total_dims()) {
    throw ValidationError("state dimension does not match the system");
  }
  if (!state.allFinite()) throw ValidationError("reference integration from a non-finite state");

  const double step = dt / substeps;
  Eigen::VectorXd x = state;
  for (int s = 0; s < substeps; ++s) {
    const Eigen::VectorXd k1 = system.vector_field(x);
    const Eigen::VectorXd k2 = system.vector_field(x + 0.5 * step * k1);
    const Eigen::VectorXd k3 = system.vector_field(x + 0.5 * step * k2);
    const Eigen::VectorXd k4 = system.vector_field(x + step * k3);
    x += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite()) {
      std::ostringstream os;
      os << "overflow during reference integration at t=" << t + (s + 1) * step;
      throw NumericalError(os.str());
    }
  }
  return x;
}

TrajectoryTensor sample_trajectory(const SyntheticSystem& system,
                                   const Eigen::Ref<const Eigen::VectorXd>& x0,
                                   Index steps, double h, int substeps) {
  if (steps < 2) throw ValidationError("sample_trajectory needs at least 2 steps");
  Eigen::MatrixXd values(steps, system.total_dims());
  values.row(0) = x0.transpose();
  Eigen::VectorXd x = x0;
  for (Index k = 1; k < steps; ++k) {
    x = integrate_reference(system, x, static_cast<double>(k - 1) * h, h, substeps);
    values.row(k) = x.transpose();
  }
  return TrajectoryTensor(std::move(values), h);
}

}  // namespace hyca
