#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blochcav/capacitance.hpp"
#include "blochcav/config.hpp"
#include "blochcav/dispersion.hpp"
#include "blochcav/oracle.hpp"

namespace blochcav {

struct KSample {
  double path_coord = 0.0;  // cumulative Cartesian length along the path
  Vec3 k = Vec3::Zero();
};

/// samples_per_segment points per segment (start included), plus the final node.
std::vector<KSample> sample_kpath(const KPath& path, const Lattice& lattice);

struct CavityInfo {
  double q = 0.0;
  double diameter = 0.0;  // bounding-box diagonal of the unit-scale shape
  int triangles = 0;
  double residual = 0.0;
  std::optional<double> fitted_order;
  bool from_override = false;
};

/// Builds the cavity mesh(es) described by `spec` and returns the shape coefficient q.
CavityInfo resolve_cavity(const CavitySpec& spec);

struct BandRow {
  double path_coord = 0.0;
  Vec3 k = Vec3::Zero();
  int order = 1;
  ClusterBranch branch;
  bool near_exceptional = false;
};

struct BandTable {
  MediumParams params;
  CavityInfo cavity;
  std::vector<KSample> samples;
  std::vector<std::vector<BandRow>> rows;  // one group per k-sample, in path order
};

/// Classifies every k-sample and evaluates all branches. Samples run in parallel; groups are
/// stored by sample index so the output does not depend on scheduling.
BandTable run_bands(const RunConfig& config);
BandTable run_bands(const RunConfig& config, const CavityInfo& cavity);

std::string bands_csv(const BandTable& table);
nlohmann::json bands_summary(const BandTable& table);

/// Leading-order field of one branch on an n^3 grid over the period cell (x = 0 included).
std::string run_field(const RunConfig& config, const CavityInfo& cavity, int k_index, int branch,
                      int grid);

nlohmann::json capacitance_json(const std::string& mesh_path, int refinements, bool extrapolate);
nlohmann::json oracle_report_json(const OracleReport& report);

}  // namespace blochcav
