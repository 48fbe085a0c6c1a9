#ifndef HYCA_IO_HPP
#define HYCA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hyca/trajectory.hpp"

namespace hyca {

// HYCA binary layout, all little-endian:
//   offset  0  char[4]  "HYCA"
//   offset  4  u16      version (1)
//   offset  6  u8       dtype tag (0 = f32, 1 = f64)
//   offset  7  u64      T
//   offset 15  u64      D
//   offset 23  f64      h
//   offset 31  payload  T*D values, row-major (time-major)
inline constexpr std::string_view kHycaMagic = "HYCA";
inline constexpr std::uint16_t kHycaVersion = 1;
inline constexpr std::size_t kHycaHeaderSize = 31;

enum class Dtype : std::uint8_t { F32 = 0, F64 = 1 };

/// CSV import/export is limited to T*D at or below this many entries.
inline constexpr std::size_t kMaxCsvEntries = 1'000'000;

std::string encode_trajectory(const TrajectoryTensor& traj, Dtype dtype = Dtype::F64);

/// Throws FormatError with a distinct code per failure mode.
TrajectoryTensor decode_trajectory(std::string_view bytes);

void write_trajectory(const TrajectoryTensor& traj, const std::filesystem::path& path,
                      Dtype dtype = Dtype::F64);
TrajectoryTensor read_trajectory(const std::filesystem::path& path);

/// Header row `t,dim0,...,dim{D-1}`, one row per timestep, t = k*h.
std::string trajectory_to_csv(const TrajectoryTensor& traj);
TrajectoryTensor trajectory_from_csv(std::string_view text);

void write_trajectory_csv(const TrajectoryTensor& traj, const std::filesystem::path& path);
TrajectoryTensor read_trajectory_csv(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

}  // namespace hyca

#endif  // HYCA_IO_HPP
