// Command-line front end: bands, capacitance, verify, field.

#include <omp.h>

#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "blochcav/errors.hpp"
#include "blochcav/runner.hpp"

namespace {

void emit(const std::filesystem::path& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw blochcav::ValidationError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leading-order Bloch dispersion for periodic media with small Dirichlet cavities"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);

  std::string config_path, mesh_path, output, summary;
  int refinements = 1, k_index = 0, branch = 1, grid = 8;
  bool extrapolate = false;

  auto* bands = app.add_subcommand("bands", "Band table along the configured k-path (CSV)");
  bands->add_option("config", config_path, "Run configuration")->required();
  bands->add_option("-o,--output", output, "Override the CSV destination");
  bands->add_option("--summary", summary, "Override the JSON summary destination");

  auto* cap = app.add_subcommand("capacitance", "Shape coefficient q of an OFF surface (JSON)");
  cap->add_option("mesh", mesh_path, "Closed triangulated surface (OFF)")->required();
  cap->add_option("--refinements", refinements, "Midpoint-subdivision levels")->check(CLI::PositiveNumber);
  cap->add_flag("--extrapolate", extrapolate, "Richardson-extrapolate over the levels");

  auto* verify = app.add_subcommand("verify", "Point-scatterer cross-check of the asymptotics (JSON)");
  verify->add_option("config", config_path, "Run configuration")->required();
  verify->add_option("-o,--output", output, "Override the JSON destination");

  auto* field = app.add_subcommand("field", "Leading-order Bloch field on a grid (CSV)");
  field->add_option("config", config_path, "Run configuration")->required();
  field->add_option("--k", k_index, "k-sample index along the path")->required();
  field->add_option("--branch", branch, "Branch index s (1-based)")->required();
  field->add_option("--grid", grid, "Grid points per lattice direction")->required();
  field->add_option("-o,--output", output, "Override the CSV destination");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    if (bands->parsed()) {
      const auto cfg = blochcav::load_config(config_path);
      const auto table = blochcav::run_bands(cfg);
      emit(output.empty() ? cfg.bands_output : std::filesystem::path(output),
           blochcav::bands_csv(table));
      const auto info = blochcav::bands_summary(table);
      const std::filesystem::path summary_path = summary.empty() ? cfg.summary_output : std::filesystem::path(summary);
      if (!summary_path.empty()) emit(summary_path, info.dump(2) + "\n");
      for (const auto& w : info["warnings"]) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
      }
    } else if (cap->parsed()) {
      std::cout << blochcav::capacitance_json(mesh_path, refinements, extrapolate).dump(2) << "\n";
    } else if (verify->parsed()) {
      const auto cfg = blochcav::load_config(config_path);
      const auto cavity = blochcav::resolve_cavity(cfg.cavity);
      const auto lattice = blochcav::make_lattice(cfg.ell[0], cfg.ell[1], cfg.ell[2]);
      const auto report = blochcav::oracle_validation_suite(lattice, cavity.q, cfg.verify_a_values);
      emit(output.empty() ? cfg.verify_output : std::filesystem::path(output),
           blochcav::oracle_report_json(report).dump(2) + "\n");
      return report.pass ? 0 : 1;
    } else if (field->parsed()) {
      const auto cfg = blochcav::load_config(config_path);
      const auto cavity = blochcav::resolve_cavity(cfg.cavity);
      emit(output.empty() ? cfg.field_output : std::filesystem::path(output),
           blochcav::run_field(cfg, cavity, k_index, branch, grid));
    }
  } catch (const blochcav::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const blochcav::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
