#ifndef HYCA_SERIALIZATION_HPP
#define HYCA_SERIALIZATION_HPP

#include <cstdint>
#include <filesystem>

#include "json.hpp"

#include "hyca/assignment.hpp"
#include "hyca/cachesim.hpp"
#include "hyca/clustering.hpp"
#include "hyca/trajectory.hpp"

namespace hyca {

using Json = nlohmann::ordered_json;

// {"seed": 42, "families": [{"family": "exp_decay", "size": 16, "rate": [3, 5]}, ...]}
Json to_json(const SystemConfig& config);
SystemConfig system_config_from_json(const Json& doc);

// {"num_clusters": C, "labels": [...]}. Also reads the richer cluster
// document, so ground-truth labels and k-means output are interchangeable.
Json labels_to_json(std::span<const int> labels, int num_clusters);
ClusterAssignment labels_from_json(const Json& doc);

Json to_json(const ClusterAssignment& clusters);
ClusterAssignment cluster_assignment_from_json(const Json& doc);

Json to_json(const ProbeErrorMatrix& matrix);
ProbeErrorMatrix probe_matrix_from_json(const Json& doc);

// {"clusters": [...], "solvers": ["TF2", ...], "interval", "warmup", "align", "provenance"}
Json to_json(const CachePlan& plan);
CachePlan plan_from_json(const Json& doc);

Json to_json(const CacheSimReport& report);

/// Parses a file; syntax errors become FormatError(BadJson).
Json read_json(const std::filesystem::path& path);
Json parse_json(std::string_view text);
/// Two-space indented, newline terminated.
std::string dump_json(const Json& doc);
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace hyca

#endif  // HYCA_SERIALIZATION_HPP
