#include "blochcav/runner.hpp"

#include <cmath>
#include <exception>
#include <numbers>
#include <sstream>

#include "blochcav/csv.hpp"
#include "blochcav/errors.hpp"

namespace blochcav {

std::vector<KSample> sample_kpath(const KPath& path, const Lattice& lattice) {
  if (path.nodes.size() < 2) throw ValidationError("k-path needs at least two nodes");
  if (path.samples_per_segment < 1) throw ValidationError("samples_per_segment must be >= 1");
  std::vector<KSample> out;
  double s = 0.0;
  for (std::size_t seg = 0; seg + 1 < path.nodes.size(); ++seg) {
    const Vec3 k0 = lattice.from_fractional(path.nodes[seg].frac);
    const Vec3 k1 = lattice.from_fractional(path.nodes[seg + 1].frac);
    const double len = (k1 - k0).norm();
    for (int i = 0; i < path.samples_per_segment; ++i) {
      const double t = double(i) / path.samples_per_segment;
      out.push_back({s + t * len, k0 + t * (k1 - k0)});
    }
    s += len;
  }
  out.push_back({s, lattice.from_fractional(path.nodes.back().frac)});
  return out;
}

namespace {

std::vector<SurfaceMesh> cavity_meshes(const CavitySpec& spec) {
  const int levels = spec.extrapolate ? spec.levels : 1;
  std::vector<SurfaceMesh> meshes;
  switch (spec.shape) {
    case CavityShape::Sphere:
    case CavityShape::Ellipsoid: {
      const int first = spec.refinement - levels + 1;
      if (first < 0) throw ValidationError("cavity.refinement too small for the requested levels");
      for (int r = first; r <= spec.refinement; ++r) {
        meshes.push_back(spec.shape == CavityShape::Sphere
                             ? make_sphere_mesh(spec.radius, r)
                             : make_ellipsoid_mesh(spec.semi_axes, r));
      }
      break;
    }
    case CavityShape::Box: {
      const int div = 1 << (levels - 1);
      if (spec.refinement < div || spec.refinement % div != 0) {
        throw ValidationError("cavity.refinement must be divisible by 2^(levels-1) for a box");
      }
      for (int j = levels - 1; j >= 0; --j) {
        meshes.push_back(make_box_mesh(spec.box_size, spec.refinement >> j));
      }
      break;
    }
    case CavityShape::Mesh: {
      const int first = spec.refinement - levels + 1;
      if (first < 0) throw ValidationError("cavity.refinement too small for the requested levels");
      SurfaceMesh m = load_off_file(spec.mesh_path.string());
      for (int r = 0; r < first; ++r) m = subdivide(m);
      meshes.push_back(m);
      for (int r = first + 1; r <= spec.refinement; ++r) meshes.push_back(subdivide(meshes.back()));
      break;
    }
  }
  return meshes;
}

double shape_diameter(const CavitySpec& spec) {
  switch (spec.shape) {
    case CavityShape::Sphere: return 2.0 * spec.radius;
    case CavityShape::Ellipsoid: return 2.0 * spec.semi_axes.maxCoeff();
    case CavityShape::Box: return spec.box_size.norm();
    case CavityShape::Mesh:
      return std::filesystem::exists(spec.mesh_path)
                 ? load_off_file(spec.mesh_path.string()).extent()
                 : 0.0;
  }
  return 0.0;
}

}  // namespace

CavityInfo resolve_cavity(const CavitySpec& spec) {
  CavityInfo info;
  info.diameter = shape_diameter(spec);
  if (spec.q_override) {
    info.q = *spec.q_override;
    info.from_override = true;
    return info;
  }
  const auto meshes = cavity_meshes(spec);
  const auto finest = solve_capacitance(meshes.back());
  info.triangles = static_cast<int>(meshes.back().size());
  info.residual = finest.residual;
  info.q = finest.q;
  if (spec.extrapolate) {
    std::vector<double> h, q;
    for (std::size_t i = 0; i + 1 < meshes.size(); ++i) {
      h.push_back(meshes[i].mesh_size());
      q.push_back(solve_capacitance(meshes[i]).q);
    }
    h.push_back(meshes.back().mesh_size());
    q.push_back(finest.q);
    const auto rich = richardson_extrapolate(h, q);
    info.q = rich.q;
    if (rich.extrapolated) info.fitted_order = rich.fitted_order;
  }
  return info;
}

BandTable run_bands(const RunConfig& config) { return run_bands(config, resolve_cavity(config.cavity)); }

BandTable run_bands(const RunConfig& config, const CavityInfo& cavity) {
  BandTable table;
  table.params.lattice = make_lattice(config.ell[0], config.ell[1], config.ell[2]);
  table.params.a = config.a;
  table.params.q = cavity.q;
  table.params.c = config.c;
  table.params.validate();
  table.cavity = cavity;
  table.samples = sample_kpath(config.kpath, table.params.lattice);
  table.rows.resize(table.samples.size());

  const auto n = static_cast<long>(table.samples.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    try {
      const auto& sample = table.samples[i];
      const auto exc = enumerate_exceptional(table.params.lattice, sample.k, config.exceptional_tol);
      const auto branches = dispersion_clusters(table.params, exc);
      const bool near = exc.order == 1 && near_exceptional(table.params, sample.k);
      std::vector<BandRow> group;
      for (const auto& br : branches) {
        group.push_back({sample.path_coord, sample.k, exc.order, br, near});
      }
      table.rows[i] = std::move(group);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return table;
}

std::string bands_csv(const BandTable& table) {
  std::string out = "# schema=1\n";
  out += csv_row({"path_coord", "kx", "ky", "kz", "order_n", "branch_s", "k_squared", "omega",
                  "shift_order", "amplitude_determined", "near_exceptional_warning"});
  for (const auto& group : table.rows) {
    for (const auto& r : group) {
      out += csv_row({format_number(r.path_coord), format_number(r.k[0]), format_number(r.k[1]),
                      format_number(r.k[2]), std::to_string(r.order),
                      std::to_string(r.branch.index), format_number(r.branch.k_squared),
                      format_number(r.branch.omega), to_string(r.branch.shift_order),
                      r.branch.amplitude_determined ? "1" : "0", r.near_exceptional ? "1" : "0"});
    }
  }
  return out;
}

nlohmann::json bands_summary(const BandTable& table) {
  nlohmann::json j;
  j["schema"] = 1;
  j["a"] = table.params.a;
  j["q"] = table.params.q;
  j["c"] = table.params.c;
  j["cell_volume"] = table.params.lattice.cell_volume;
  j["cavity"] = {{"diameter", table.cavity.diameter},
                 {"triangles", table.cavity.triangles},
                 {"from_override", table.cavity.from_override}};
  std::vector<int> orders;
  for (const auto& g : table.rows) {
    if (!g.empty() && std::find(orders.begin(), orders.end(), g.front().order) == orders.end()) {
      orders.push_back(g.front().order);
    }
  }
  std::sort(orders.begin(), orders.end());
  if (std::find(orders.begin(), orders.end(), 1) == orders.end()) orders.insert(orders.begin(), 1);
  j["cutoff"] = nlohmann::json::array();
  for (int n : orders) {
    const auto cd = cutoff(table.params, n);
    j["cutoff"].push_back({{"order_n", n},
                           {"branch_s", 1},
                           {"omega_c", cd.omega_c},
                           {"lambda_max", std::isfinite(cd.lambda_max)
                                              ? nlohmann::json(cd.lambda_max)
                                              : nlohmann::json(nullptr)}});
  }
  j["cutoff_other_clusters"] = "O(a), unresolved at leading order";
  j["units"] = {{"k", "1/length"},     {"k_squared", "1/length^2"}, {"omega", "1/time"},
                {"omega_c", "1/time"}, {"lambda_max", "length"},    {"a", "length"},
                {"c", "length/time"},  {"cell_volume", "length^3"}, {"q", "dimensionless"}};
  nlohmann::json warnings = nlohmann::json::array();
  if (table.params.cavity_too_large(table.cavity.diameter)) {
    warnings.push_back("cavity not small: a * diameter > 0.2 * min lattice period");
  }
  std::size_t near = 0;
  for (const auto& g : table.rows) {
    if (!g.empty() && g.front().near_exceptional) ++near;
  }
  if (near) warnings.push_back("unreliable: near exceptional plane at " + std::to_string(near) +
                               " k-samples");
  j["warnings"] = warnings;
  return j;
}

std::string run_field(const RunConfig& config, const CavityInfo& cavity, int k_index, int branch,
                      int grid) {
  MediumParams params;
  params.lattice = make_lattice(config.ell[0], config.ell[1], config.ell[2]);
  params.a = config.a;
  params.q = cavity.q;
  params.c = config.c;
  const auto samples = sample_kpath(config.kpath, params.lattice);
  if (k_index < 0 || k_index >= static_cast<int>(samples.size())) {
    throw ValidationError("k index " + std::to_string(k_index) + " out of range [0, " +
                          std::to_string(samples.size()) + ")");
  }
  if (grid < 1 || grid > 512) throw ValidationError("grid must lie in [1, 512]");
  const auto exc = enumerate_exceptional(params.lattice, samples[k_index].k, config.exceptional_tol);
  const auto branches = dispersion_clusters(params, exc);
  if (branch < 1 || branch > static_cast<int>(branches.size())) {
    throw ValidationError("branch " + std::to_string(branch) + " does not exist (order " +
                          std::to_string(exc.order) + ")");
  }
  const auto& br = branches[branch - 1];

  std::vector<Vec3> points;
  points.reserve(static_cast<std::size_t>(grid) * grid * grid);
  const auto& ell = params.lattice.ell;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < grid; ++j) {
      for (int l = 0; l < grid; ++l) {
        points.push_back((double(i) * ell[0] + double(j) * ell[1] + double(l) * ell[2]) / grid);
      }
    }
  }
  const auto u = bloch_field(br, exc, points);
  const std::string warn = br.amplitude_determined ? "0" : "1";
  std::string out = "# schema=1\n";
  out += csv_row({"x", "y", "z", "re_u", "im_u", "abs_u", "amplitude_undetermined"});
  for (std::size_t p = 0; p < points.size(); ++p) {
    out += csv_row({format_number(points[p][0]), format_number(points[p][1]),
                    format_number(points[p][2]), format_number(u[p].real()),
                    format_number(u[p].imag()), format_number(std::abs(u[p])), warn});
  }
  return out;
}

nlohmann::json capacitance_json(const std::string& mesh_path, int refinements, bool extrapolate) {
  if (refinements < 1) throw ValidationError("--refinements must be >= 1");
  if (extrapolate && refinements < 3) {
    throw ValidationError("--extrapolate needs --refinements >= 3");
  }
  std::vector<SurfaceMesh> meshes{load_off_file(mesh_path)};
  for (int r = 1; r < refinements; ++r) meshes.push_back(subdivide(meshes.back()));

  std::vector<double> h, q;
  CapacitanceSolution finest = solve_capacitance(meshes.back());
  for (std::size_t i = 0; i + 1 < meshes.size(); ++i) {
    h.push_back(meshes[i].mesh_size());
    q.push_back(solve_capacitance(meshes[i]).q);
  }
  h.push_back(meshes.back().mesh_size());
  q.push_back(finest.q);

  nlohmann::json j;
  j["q"] = finest.q;
  j["fitted_order"] = nullptr;
  if (extrapolate) {
    const auto rich = richardson_extrapolate(h, q);
    j["q"] = rich.q;
    j["extrapolated"] = rich.extrapolated;
    j["warning"] = rich.warning;
    if (rich.extrapolated) j["fitted_order"] = rich.fitted_order;
  }
  j["residual"] = finest.residual;
  j["triangles"] = finest.mesh.size();
  j["condition_estimate"] = finest.condition_estimate;
  j["level_q"] = q;
  j["level_h"] = h;
  j["units"] = {{"q", "dimensionless (charge at unit potential, unit-scale shape)"}};
  return j;
}

nlohmann::json oracle_report_json(const OracleReport& report) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["q"] = report.q;
  j["pass"] = report.pass;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : report.cases) {
    nlohmann::json cj;
    cj["label"] = c.label;
    cj["k"] = {c.k[0], c.k[1], c.k[2]};
    cj["order_n"] = c.order;
    cj["fitted_order"] = num(c.fitted_order);
    cj["fitted_slope"] = c.fitted_slope;
    cj["expected_slope"] = c.expected_slope;
    cj["pole_count"] = c.pole_count;
    cj["unshifted_branches"] = c.unshifted_branches;
    cj["pass"] = c.pass;
    cj["runs"] = nlohmann::json::array();
    for (std::size_t i = 0; i < c.a.size(); ++i) {
      cj["runs"].push_back({{"a", c.a[i]},
                            {"alpha", c.alpha[i]},
                            {"z_star", c.z_star[i]},
                            {"formula_value", c.z_formula[i]},
                            {"abs_error", c.abs_error[i]},
                            {"rel_error", c.rel_error[i]}});
    }
    j["cases"].push_back(cj);
  }
  return j;
}

}  // namespace blochcav
