#include "hyca/serialization.hpp"

#include <string>
#include <type_traits>

#include "hyca/error.hpp"
#include "hyca/io.hpp"

namespace hyca {

namespace {

[[noreturn]] void bad_json(const std::string& detail) {
  throw FormatError(FormatErrc::BadJson, detail);
}

const Json& field(const Json& doc, const char* key) {
  if (!doc.is_object()) bad_json(std::string("expected an object holding '") + key + "'");
  const auto it = doc.find(key);
  if (it == doc.end()) bad_json(std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& doc, const char* key) {
  const Json& value = field(doc, key);
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    bad_json(std::string("field '") + key + "' has the wrong type");
  }
}

template <typename T>
T get_or(const Json& doc, const char* key, T fallback) {
  if (!doc.is_object() || !doc.contains(key)) return fallback;
  return get<T>(doc, key);
}

Json range_to_json(const ParamRange& range) { return Json::array({range.min, range.max}); }

ParamRange range_from_json(const Json& doc, const char* key, ParamRange fallback) {
  if (!doc.contains(key)) return fallback;
  const auto values = get<std::vector<double>>(doc, key);
  if (values.size() != 2) bad_json(std::string("range '") + key + "' must have two entries");
  return {values[0], values[1]};
}

Json matrix_to_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& doc, const char* key) {
  const auto rows = get<std::vector<std::vector<double>>>(doc, key);
  const Index cols = rows.empty() ? 0 : static_cast<Index>(rows.front().size());
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), cols);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (static_cast<Index>(rows[r].size()) != cols) bad_json(std::string("ragged matrix '") + key + "'");
    for (Index c = 0; c < cols; ++c) out(static_cast<Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
  }
  return out;
}

Json vector_to_json(const Eigen::VectorXd& v) {
  return Json(std::vector<double>(v.data(), v.data() + v.size()));
}

std::vector<int> checked_labels(const Json& doc, int& num_clusters) {
  auto labels = get<std::vector<int>>(doc, "labels");
  if (labels.empty()) throw ValidationError("label list is empty");
  int max_label = -1;
  for (const int label : labels) {
    if (label < 0) throw ValidationError("labels must be non-negative");
    max_label = std::max(max_label, label);
  }
  num_clusters = get_or<int>(doc, "num_clusters", max_label + 1);
  if (max_label >= num_clusters) throw ValidationError("label exceeds num_clusters");
  return labels;
}

Json solvers_to_json(std::span<const SolverSpec> solvers) {
  Json out = Json::array();
  for (const auto& s : solvers) out.push_back(s.name());
  return out;
}

std::vector<SolverSpec> solvers_from_json(const Json& doc, const char* key) {
  std::vector<SolverSpec> out;
  for (const auto& name : get<std::vector<std::string>>(doc, key)) out.push_back(parse_solver(name));
  return out;
}

}  // namespace

Json to_json(const SystemConfig& config) {
  Json families = Json::array();
  for (const auto& spec : config.mixture.families) {
    Json entry;
    entry["family"] = to_string(family_kind(spec));
    entry["size"] = family_size(spec);
    std::visit(
        [&entry](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, ExpDecaySpec> || std::is_same_v<T, StiffDecaySpec>) {
            entry["rate"] = range_to_json(s.rate);
          } else if constexpr (std::is_same_v<T, DampedOscillatorSpec>) {
            entry["omega"] = range_to_json(s.omega);
            entry["zeta"] = range_to_json(s.zeta);
          } else if constexpr (std::is_same_v<T, LinearDriftSpec>) {
            entry["slope"] = range_to_json(s.slope);
          } else {
            entry["rate"] = range_to_json(s.rate);
            entry["capacity"] = range_to_json(s.capacity);
          }
        },
        spec);
    families.push_back(std::move(entry));
  }
  Json out;
  out["seed"] = config.seed;
  out["families"] = std::move(families);
  return out;
}

SystemConfig system_config_from_json(const Json& doc) {
  SystemConfig out;
  out.seed = get_or<std::uint64_t>(doc, "seed", 0);
  const Json& families = field(doc, "families");
  if (!families.is_array()) bad_json("'families' must be an array");
  for (const auto& entry : families) {
    const auto family = get<std::string>(entry, "family");
    const auto size = get<std::size_t>(entry, "size");
    if (family == "exp_decay") {
      ExpDecaySpec s{size};
      s.rate = range_from_json(entry, "rate", s.rate);
      out.mixture.families.emplace_back(s);
    } else if (family == "damped_oscillator") {
      DampedOscillatorSpec s{size};
      s.omega = range_from_json(entry, "omega", s.omega);
      s.zeta = range_from_json(entry, "zeta", s.zeta);
      out.mixture.families.emplace_back(s);
    } else if (family == "stiff_decay") {
      StiffDecaySpec s{size};
      s.rate = range_from_json(entry, "rate", s.rate);
      out.mixture.families.emplace_back(s);
    } else if (family == "linear_drift") {
      LinearDriftSpec s{size};
      s.slope = range_from_json(entry, "slope", s.slope);
      out.mixture.families.emplace_back(s);
    } else if (family == "logistic") {
      LogisticSpec s{size};
      s.rate = range_from_json(entry, "rate", s.rate);
      s.capacity = range_from_json(entry, "capacity", s.capacity);
      out.mixture.families.emplace_back(s);
    } else {
      throw ValidationError("unknown family '" + family + "'");
    }
  }
  return out;
}

Json labels_to_json(std::span<const int> labels, int num_clusters) {
  Json out;
  out["num_clusters"] = num_clusters;
  out["labels"] = std::vector<int>(labels.begin(), labels.end());
  return out;
}

ClusterAssignment labels_from_json(const Json& doc) {
  ClusterAssignment out;
  out.labels = checked_labels(doc, out.num_clusters);
  return out;
}

Json to_json(const ClusterAssignment& clusters) {
  Json out = labels_to_json(clusters.labels, clusters.num_clusters);
  out["seed"] = clusters.seed;
  out["max_iter"] = clusters.options.max_iter;
  out["tol"] = clusters.options.tol;
  out["iterations"] = clusters.iterations;
  out["inertia"] = clusters.inertia;
  out["inertia_history"] = clusters.inertia_history;
  out["centroids"] = matrix_to_json(clusters.centroids);
  return out;
}

ClusterAssignment cluster_assignment_from_json(const Json& doc) {
  ClusterAssignment out = labels_from_json(doc);
  out.seed = get<std::uint64_t>(doc, "seed");
  out.options.max_iter = get<int>(doc, "max_iter");
  out.options.tol = get<double>(doc, "tol");
  out.iterations = get<int>(doc, "iterations");
  out.inertia = get<double>(doc, "inertia");
  out.inertia_history = get<std::vector<double>>(doc, "inertia_history");
  out.centroids = matrix_from_json(doc, "centroids");
  if (out.centroids.rows() != out.num_clusters) {
    throw ValidationError("centroid count does not match num_clusters");
  }
  return out;
}

Json to_json(const ProbeErrorMatrix& matrix) {
  Json out;
  out["pool"] = solvers_to_json(matrix.pool);
  out["num_clusters"] = matrix.num_clusters();
  out["clusters"] = matrix.cluster_labels;
  out["probe_range"] = Json::array({matrix.range.start, matrix.range.end});
  out["probe_stride"] = matrix.stride;
  out["probe_steps_used"] = matrix.probe_steps_used;
  out["errors"] = matrix_to_json(matrix.errors);
  out["reference_power"] = vector_to_json(matrix.reference_power);
  return out;
}

ProbeErrorMatrix probe_matrix_from_json(const Json& doc) {
  ProbeErrorMatrix out;
  out.pool = solvers_from_json(doc, "pool");
  out.cluster_labels = get<std::vector<int>>(doc, "clusters");
  const auto range = get<std::vector<Index>>(doc, "probe_range");
  if (range.size() != 2) bad_json("'probe_range' must have two entries");
  out.range = {range[0], range[1]};
  out.stride = get<Index>(doc, "probe_stride");
  out.probe_steps_used = get<Index>(doc, "probe_steps_used");
  out.errors = matrix_from_json(doc, "errors");
  const auto power = get<std::vector<double>>(doc, "reference_power");
  out.reference_power = Eigen::Map<const Eigen::VectorXd>(power.data(), static_cast<Index>(power.size()));
  if (out.errors.cols() != static_cast<Index>(out.pool.size()) ||
      out.reference_power.size() != out.errors.rows() ||
      out.errors.rows() != get<int>(doc, "num_clusters")) {
    throw ValidationError("probe matrix dimensions are inconsistent");
  }
  for (const int label : out.cluster_labels) {
    if (label < 0 || label >= out.errors.rows()) throw ValidationError("probe label out of range");
  }
  return out;
}

Json to_json(const CachePlan& plan) {
  Json provenance;
  provenance["trajectory"] = plan.provenance.trajectory_id;
  provenance["window"] = plan.provenance.window;
  provenance["seed"] = plan.provenance.seed;
  provenance["probe_range"] = Json::array({plan.provenance.range.start, plan.provenance.range.end});
  provenance["probe_stride"] = plan.provenance.stride;

  Json out;
  out["clusters"] = plan.cluster_labels;
  out["solvers"] = solvers_to_json(plan.cluster_solvers);
  out["interval"] = plan.interval;
  out["warmup"] = plan.warmup;
  out["align"] = to_string(plan.align);
  out["provenance"] = std::move(provenance);
  return out;
}

CachePlan plan_from_json(const Json& doc) {
  CachePlan plan;
  plan.cluster_labels = get<std::vector<int>>(doc, "clusters");
  plan.cluster_solvers = solvers_from_json(doc, "solvers");
  plan.interval = get<Index>(doc, "interval");
  plan.warmup = get<Index>(doc, "warmup");
  plan.align = parse_align(get_or<std::string>(doc, "align", "zero"));
  if (doc.contains("provenance")) {
    const Json& p = doc["provenance"];
    plan.provenance.trajectory_id = get_or<std::string>(p, "trajectory", "");
    plan.provenance.window = get_or<Index>(p, "window", kDefaultProbeWindow);
    plan.provenance.seed = get_or<std::uint64_t>(p, "seed", 0);
    const auto range = get_or<std::vector<Index>>(p, "probe_range", {4, 16});
    if (range.size() != 2) bad_json("'probe_range' must have two entries");
    plan.provenance.range = {range[0], range[1]};
    plan.provenance.stride = get_or<Index>(p, "probe_stride", 1);
  }
  if (plan.interval < 1) throw ValidationError("plan interval must be >= 1");
  if (plan.warmup < 1) throw ValidationError("plan warmup must be >= 1");
  for (const int label : plan.cluster_labels) {
    if (label < 0 || label >= plan.num_clusters()) {
      throw ValidationError("plan label " + std::to_string(label) + " has no assigned solver");
    }
  }
  return plan;
}

Json to_json(const CacheSimReport& report) {
  Json out;
  out["mode"] = to_string(report.mode);
  out["solvers"] = report.cluster_solvers;
  out["aggregate_mse"] = report.aggregate_mse;
  out["final_state_rel_error"] = report.final_state_rel_error;
  out["computed_steps"] = report.computed_steps;
  out["predicted_steps"] = report.predicted_steps;
  out["startup_fallbacks"] = report.startup_fallbacks;
  out["flops_speedup"] = report.flops_speedup;
  out["per_cluster_mse"] = report.per_cluster_mse;
  out["per_step_mse"] = report.per_step_mse;
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    bad_json(e.what());
  }
}

Json read_json(const std::filesystem::path& path) {
  try {
    return parse_json(read_file(path));
  } catch (const FormatError& e) {
    throw FormatError(FormatErrc::BadJson, path.string() + ": " + e.what());
  }
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

void write_json(const std::filesystem::path& path, const Json& doc) {
  write_file(path, dump_json(doc));
}

}  // namespace hyca
