#include "hyca/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

#include "hyca/error.hpp"

namespace hyca {

namespace {

template <typename UInt>
void put_le(std::string& out, UInt value) {
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

template <typename UInt>
UInt get_le(std::string_view bytes, std::size_t offset) {
  UInt value = 0;
  for (std::size_t i = 0; i < sizeof(UInt); ++i) {
    value |= static_cast<UInt>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
  }
  return value;
}

std::size_t dtype_width(Dtype dtype) { return dtype == Dtype::F32 ? 4 : 8; }

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t begin = 0;
  while (true) {
    const std::size_t end = text.find(sep, begin);
    parts.push_back(text.substr(begin, end == std::string_view::npos ? end : end - begin));
    if (end == std::string_view::npos) break;
    begin = end + 1;
  }
  return parts;
}

double parse_double(std::string_view field, std::size_t line) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) {
    field.remove_suffix(1);
  }
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError(FormatErrc::BadCsv, "line " + std::to_string(line) +
                                              ": cannot parse '" + std::string(field) + "'");
  }
  if (!std::isfinite(value)) {
    throw FormatError(FormatErrc::NonFinite, "line " + std::to_string(line));
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

std::string encode_trajectory(const TrajectoryTensor& traj, Dtype dtype) {
  const auto steps = static_cast<std::uint64_t>(traj.num_steps());
  const auto dims = static_cast<std::uint64_t>(traj.num_dims());
  std::string out;
  out.reserve(kHycaHeaderSize + steps * dims * dtype_width(dtype));
  out.append(kHycaMagic);
  put_le<std::uint16_t>(out, kHycaVersion);
  out.push_back(static_cast<char>(dtype));
  put_le<std::uint64_t>(out, steps);
  put_le<std::uint64_t>(out, dims);
  put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(traj.step_size()));
  const Eigen::MatrixXd& v = traj.values();
  for (Index k = 0; k < traj.num_steps(); ++k) {
    for (Index d = 0; d < traj.num_dims(); ++d) {
      if (dtype == Dtype::F32) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v(k, d))));
      } else {
        put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v(k, d)));
      }
    }
  }
  return out;
}

TrajectoryTensor decode_trajectory(std::string_view bytes) {
  if (bytes.size() < kHycaMagic.size() || bytes.substr(0, kHycaMagic.size()) != kHycaMagic) {
    throw FormatError(FormatErrc::BadMagic, "expected \"HYCA\"");
  }
  if (bytes.size() < kHycaHeaderSize) {
    throw FormatError(FormatErrc::Truncated, "header is " + std::to_string(bytes.size()) +
                                                 " bytes, expected " +
                                                 std::to_string(kHycaHeaderSize));
  }
  const auto version = get_le<std::uint16_t>(bytes, 4);
  if (version != kHycaVersion) {
    throw FormatError(FormatErrc::VersionMismatch,
                      "file version " + std::to_string(version) + ", reader supports " +
                          std::to_string(kHycaVersion));
  }
  const auto tag = static_cast<std::uint8_t>(bytes[6]);
  if (tag > 1) throw FormatError(FormatErrc::BadDtype, "tag " + std::to_string(tag));
  const auto dtype = static_cast<Dtype>(tag);
  const auto steps = get_le<std::uint64_t>(bytes, 7);
  const auto dims = get_le<std::uint64_t>(bytes, 15);
  const double h = std::bit_cast<double>(get_le<std::uint64_t>(bytes, 23));
  if (steps < 2 || dims < 1) {
    throw FormatError(FormatErrc::BadHeader, "shape " + std::to_string(steps) + "x" +
                                                 std::to_string(dims));
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw FormatError(FormatErrc::BadHeader, "step size must be positive and finite");
  }
  const std::size_t width = dtype_width(dtype);
  const auto max_entries = std::numeric_limits<std::uint64_t>::max() / width;
  if (dims > max_entries / steps) {
    throw FormatError(FormatErrc::BadHeader, "shape overflows");
  }
  const std::uint64_t expected = steps * dims * width;
  const std::uint64_t available = bytes.size() - kHycaHeaderSize;
  if (available < expected) {
    throw FormatError(FormatErrc::Truncated, "payload has " + std::to_string(available) +
                                                 " bytes, header declares " +
                                                 std::to_string(expected));
  }
  if (available > expected) {
    throw FormatError(FormatErrc::TrailingBytes,
                      std::to_string(available - expected) + " bytes after payload");
  }

  Eigen::MatrixXd values(static_cast<Index>(steps), static_cast<Index>(dims));
  std::size_t offset = kHycaHeaderSize;
  for (Index k = 0; k < values.rows(); ++k) {
    for (Index d = 0; d < values.cols(); ++d) {
      double x;
      if (dtype == Dtype::F32) {
        x = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
      } else {
        x = std::bit_cast<double>(get_le<std::uint64_t>(bytes, offset));
      }
      if (!std::isfinite(x)) {
        throw FormatError(FormatErrc::NonFinite, "entry (" + std::to_string(k) + ", " +
                                                     std::to_string(d) + ")");
      }
      values(k, d) = x;
      offset += width;
    }
  }
  return TrajectoryTensor(std::move(values), h);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return std::move(os).str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

void write_trajectory(const TrajectoryTensor& traj, const std::filesystem::path& path,
                      Dtype dtype) {
  write_file(path, encode_trajectory(traj, dtype));
}

TrajectoryTensor read_trajectory(const std::filesystem::path& path) {
  return decode_trajectory(read_file(path));
}

std::string trajectory_to_csv(const TrajectoryTensor& traj) {
  const auto entries = static_cast<std::size_t>(traj.num_steps() * traj.num_dims());
  if (entries > kMaxCsvEntries) {
    throw ValidationError("CSV export limited to " + std::to_string(kMaxCsvEntries) +
                          " entries, trajectory has " + std::to_string(entries));
  }
  std::string out = "t";
  for (Index d = 0; d < traj.num_dims(); ++d) out += ",dim" + std::to_string(d);
  out += '\n';
  for (Index k = 0; k < traj.num_steps(); ++k) {
    out += format_double(static_cast<double>(k) * traj.step_size());
    for (Index d = 0; d < traj.num_dims(); ++d) {
      out += ',';
      out += format_double(traj.values()(k, d));
    }
    out += '\n';
  }
  return out;
}

TrajectoryTensor trajectory_from_csv(std::string_view text) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && (lines.back().empty() || lines.back() == "\r")) lines.pop_back();
  if (lines.size() < 3) throw FormatError(FormatErrc::BadCsv, "need a header and >= 2 rows");

  const auto header = split(lines[0], ',');
  if (header.empty() || (header[0] != "t" && header[0] != "t\r")) {
    throw FormatError(FormatErrc::BadCsv, "header must start with 't'");
  }
  const std::size_t dims = header.size() - 1;
  if (dims == 0) throw FormatError(FormatErrc::BadCsv, "no dimension columns");
  const std::size_t steps = lines.size() - 1;
  if (steps * dims > kMaxCsvEntries) {
    throw FormatError(FormatErrc::BadCsv, "CSV import limited to " +
                                              std::to_string(kMaxCsvEntries) + " entries");
  }

  Eigen::MatrixXd values(static_cast<Index>(steps), static_cast<Index>(dims));
  std::vector<double> times(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    const auto fields = split(lines[k + 1], ',');
    if (fields.size() != dims + 1) {
      throw FormatError(FormatErrc::BadCsv, "line " + std::to_string(k + 2) + ": expected " +
                                                std::to_string(dims + 1) + " fields");
    }
    times[k] = parse_double(fields[0], k + 2);
    for (std::size_t d = 0; d < dims; ++d) {
      values(static_cast<Index>(k), static_cast<Index>(d)) = parse_double(fields[d + 1], k + 2);
    }
  }
  const double h = times[1] - times[0];
  if (!(h > 0.0)) throw FormatError(FormatErrc::BadCsv, "time column must increase");
  for (std::size_t k = 1; k < steps; ++k) {
    const double expected = times[0] + static_cast<double>(k) * h;
    if (std::abs(times[k] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
      throw FormatError(FormatErrc::BadCsv, "non-uniform time grid at row " + std::to_string(k));
    }
  }
  return TrajectoryTensor(std::move(values), h);
}

void write_trajectory_csv(const TrajectoryTensor& traj, const std::filesystem::path& path) {
  write_file(path, trajectory_to_csv(traj));
}

TrajectoryTensor read_trajectory_csv(const std::filesystem::path& path) {
  return trajectory_from_csv(read_file(path));
}

}  // namespace hyca
