#include <cmath>
#include <cstring>
#include <filesystem>

#include "doctest.h"

#include "hyca/error.hpp"
#include "hyca/io.hpp"
#include "hyca/pipeline.hpp"
#include "hyca/trajectory.hpp"

using namespace hyca;

namespace {

TrajectoryTensor small_trajectory() {
  Eigen::MatrixXd v(3, 2);
  v << 0.1, -2.5, 1.0 / 3.0, 1e-300, 7.0, 123456.789;
  return TrajectoryTensor(v, 0.25);
}

FormatErrc decode_error(const std::string& bytes) {
  try {
    decode_trajectory(bytes);
  } catch (const FormatError& e) {
    return e.code();
  }
  FAIL("decode succeeded");
  return FormatErrc::BadHeader;
}

}  // namespace

TEST_CASE("trajectory tensor validates its payload") {
  CHECK_THROWS_AS(TrajectoryTensor(Eigen::MatrixXd::Zero(1, 3), 0.1), ValidationError);
  CHECK_THROWS_AS(TrajectoryTensor(Eigen::MatrixXd::Zero(3, 0), 0.1), ValidationError);
  CHECK_THROWS_AS(TrajectoryTensor(Eigen::MatrixXd::Zero(3, 2), 0.0), ValidationError);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 2);
  bad(1, 1) = std::nan("");
  CHECK_THROWS_AS(TrajectoryTensor(bad, 0.1), ValidationError);
}

TEST_CASE("generate_system is deterministic and labels groups in order") {
  const MixtureSpec spec = standard_mixture();
  const SyntheticSystem a = generate_system(spec, 7);
  const SyntheticSystem b = generate_system(spec, 7);
  REQUIRE(a.total_dims() == 64);
  for (std::size_t d = 0; d < a.laws().size(); ++d) {
    CHECK(a.laws()[d].a == b.laws()[d].a);
    CHECK(a.labels().labels[d] == static_cast<int>(d / 16));
  }
  const SyntheticSystem c = generate_system(spec, 8);
  CHECK(c.laws()[0].a != a.laws()[0].a);
}

TEST_CASE("drawn parameters stay inside their ranges") {
  const SyntheticSystem sys = generate_system(standard_mixture(), 3);
  for (const auto& law : sys.laws()) {
    switch (law.kind) {
      case FamilyKind::ExpDecay:
        CHECK((law.a >= 3.0 && law.a <= 5.0));
        break;
      case FamilyKind::DampedOscillator:
        CHECK((law.a >= 7.0 && law.a <= 9.0));
        CHECK((law.b >= 0.0 && law.b <= 0.1));
        break;
      case FamilyKind::StiffDecay:
        CHECK(law.a >= 50.0);
        break;
      case FamilyKind::LinearDrift:
        CHECK(std::abs(law.a) <= 1.0);
        break;
      case FamilyKind::Logistic:
        break;
    }
  }
}

TEST_CASE("generate_system rejects malformed specs") {
  CHECK_THROWS_AS(generate_system(MixtureSpec{}, 0), ValidationError);
  CHECK_THROWS_AS(generate_system({{ExpDecaySpec{4, {2.0, 1.0}}}}, 0), ValidationError);
  CHECK_THROWS_AS(generate_system({{ExpDecaySpec{0}}}, 0), ValidationError);
  CHECK_THROWS_AS(generate_system({{StiffDecaySpec{2, {10.0, 60.0}}}}, 0), ValidationError);
  CHECK_THROWS_AS(generate_system({{DampedOscillatorSpec{3}}}, 0), ValidationError);
  CHECK_THROWS_AS(generate_system({{DampedOscillatorSpec{2, {-1.0, 1.0}}}}, 0), ValidationError);
}

TEST_CASE("reference integration matches closed forms") {
  const MixtureSpec spec{{ExpDecaySpec{1, {2.0, 2.0}}, LinearDriftSpec{1, {0.5, 0.5}},
                          DampedOscillatorSpec{2, {3.0, 3.0}, {0.0, 0.0}}}};
  const SyntheticSystem sys = generate_system(spec, 1);
  Eigen::VectorXd x0(4);
  x0 << 1.0, -1.0, 1.0, 0.0;
  const TrajectoryTensor traj = sample_trajectory(sys, x0, 11, 0.1);
  const double t = 1.0;
  CHECK(traj.values()(10, 0) == doctest::Approx(std::exp(-2.0 * t)).epsilon(1e-10));
  CHECK(traj.values()(10, 1) == doctest::Approx(-1.0 + 0.5 * t).epsilon(1e-12));
  CHECK(traj.values()(10, 2) == doctest::Approx(std::cos(3.0 * t)).epsilon(1e-9));
  CHECK(traj.values()(10, 3) == doctest::Approx(-3.0 * std::sin(3.0 * t)).epsilon(1e-9));
}

TEST_CASE("integration overflow is a numerical error") {
  const SyntheticSystem sys = generate_system({{LogisticSpec{1, {-50.0, -50.0}, {1.0, 1.0}}}}, 0);
  Eigen::VectorXd x0(1);
  x0 << -1e3;
  CHECK_THROWS_AS(sample_trajectory(sys, x0, 50, 0.5, 10), NumericalError);
}

TEST_CASE("initial_state is deterministic in its seed") {
  const SyntheticSystem sys = generate_system(standard_mixture(), 42);
  CHECK(initial_state(sys, 5) == initial_state(sys, 5));
  CHECK(initial_state(sys, 5) != initial_state(sys, 6));
}

TEST_CASE("HYCA round trip is bitwise") {
  const TrajectoryTensor traj = small_trajectory();
  const std::string bytes = encode_trajectory(traj);
  CHECK(bytes.size() == kHycaHeaderSize + 6 * sizeof(double));
  CHECK(bytes.substr(0, 4) == "HYCA");
  CHECK(decode_trajectory(bytes) == traj);
  CHECK(encode_trajectory(decode_trajectory(bytes)) == bytes);

  const auto path = std::filesystem::temp_directory_path() / "hyca_test_roundtrip.hyca";
  write_trajectory(traj, path);
  CHECK(read_trajectory(path) == traj);
  std::filesystem::remove(path);
}

TEST_CASE("f32 payloads widen on read") {
  const TrajectoryTensor traj = small_trajectory();
  const std::string bytes = encode_trajectory(traj, Dtype::F32);
  CHECK(bytes.size() == kHycaHeaderSize + 6 * sizeof(float));
  const TrajectoryTensor back = decode_trajectory(bytes);
  CHECK(back.values()(0, 0) == static_cast<double>(0.1f));
}

TEST_CASE("malformed HYCA files fail with distinct errors") {
  const std::string good = encode_trajectory(small_trajectory());
  std::string magic = good;
  magic[0] = 'X';
  CHECK(decode_error(magic) == FormatErrc::BadMagic);
  std::string version = good;
  version[4] = 9;
  CHECK(decode_error(version) == FormatErrc::VersionMismatch);
  std::string dtype = good;
  dtype[6] = 7;
  CHECK(decode_error(dtype) == FormatErrc::BadDtype);
  CHECK(decode_error(good.substr(0, good.size() - 1)) == FormatErrc::Truncated);
  CHECK(decode_error(good.substr(0, 10)) == FormatErrc::Truncated);
  CHECK(decode_error(good + "x") == FormatErrc::TrailingBytes);
  std::string nan = good;
  const double q = std::nan("");
  std::memcpy(nan.data() + kHycaHeaderSize, &q, sizeof q);
  CHECK(decode_error(nan) == FormatErrc::NonFinite);
}

TEST_CASE("missing files are I/O errors") {
  CHECK_THROWS_AS(read_trajectory("/nonexistent/dir/t.hyca"), IoError);
}

TEST_CASE("CSV round trip preserves values") {
  const TrajectoryTensor traj = small_trajectory();
  const std::string csv = trajectory_to_csv(traj);
  CHECK(csv.rfind("t,dim0,dim1\n", 0) == 0);
  CHECK(trajectory_from_csv(csv) == traj);
  CHECK_THROWS_AS(trajectory_from_csv("t,dim0\n0,1\n0.1,x\n"), FormatError);
  CHECK_THROWS_AS(trajectory_from_csv("t,dim0\n0,1\n0.1,2\n0.5,3\n"), FormatError);
}

TEST_CASE("scaled multiplies every entry") {
  const TrajectoryTensor traj = small_trajectory();
  CHECK(traj.scaled(2.0).values() == traj.values() * 2.0);
}
