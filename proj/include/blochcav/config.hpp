#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blochcav/lattice.hpp"

namespace blochcav {

/// Band-diagram path. Node coordinates are fractional in the reciprocal basis.
struct KPath {
  struct Node {
    std::string label;
    Vec3 frac = Vec3::Zero();
  };
  std::vector<Node> nodes;
  int samples_per_segment = 10;
};

enum class CavityShape { Sphere, Ellipsoid, Box, Mesh };

struct CavitySpec {
  CavityShape shape = CavityShape::Sphere;
  double radius = 1.0;
  Vec3 semi_axes = Vec3::Ones();
  Vec3 box_size = Vec3::Ones();
  std::filesystem::path mesh_path;
  int refinement = 2;      // icosphere level, box subdivisions, or mesh subdivisions
  int levels = 3;          // refinement levels used when extrapolating
  bool extrapolate = false;
  std::optional<double> q_override;
};

struct RunConfig {
  std::array<Vec3, 3> ell;
  CavitySpec cavity;
  double a = 0.0;
  double c = 1.0;
  KPath kpath;
  double exceptional_tol = kDefaultExceptionalTol;
  std::vector<double> verify_a_values{1e-2, 5e-3, 2.5e-3};
  std::filesystem::path bands_output;    // empty: stdout
  std::filesystem::path summary_output;  // empty: not written
  std::filesystem::path field_output;    // empty: stdout
  std::filesystem::path verify_output;   // empty: stdout
};

/// Parses the sectioned key = value format documented in configs/README.md.
/// Relative paths resolve against `base_dir`. Errors carry line and column.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

}  // namespace blochcav
