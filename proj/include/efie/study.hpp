#ifndef EFIE_STUDY_HPP_
#define EFIE_STUDY_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "efie/field.hpp"
#include "efie/solver.hpp"

namespace efie {

/// Resolved configuration of a solve or convergence study.
struct StudyConfig {
  std::string geometry = "sphere";  // builtin name or file path
  std::string kind = "spline";      // spline | rt | both
  std::vector<int> degrees = {1};
  std::vector<int> levels = {0};
  double kappa = 1.0;
  Vec3 dipole_position = Vec3(0.1, 0.1, 0.0);
  Vec3 dipole_moment = Vec3(0.0, 0.1, 0.1);
  double eval_radius = 3.0;
  int eval_count = 100;
  std::vector<Vec3> eval_points;  // explicit point list overrides radius/count
  QuadConfig quad;
  double gmres_tol = 1e-10;
  int gmres_restart = 1500;
  long gmres_max_total = 200000;
  std::string output = "study.csv";
  int jobs = 1;  // parallel study cells (memory permitting)
  /// Dense A* memory budget in bytes before switching to the streaming
  /// assembly route.
  double memory_budget = 1.5e9;

  void validate() const;  // throws config_error
};

/// `key = value` per line, '#' comments; keys match the struct fields.
StudyConfig load_config(const std::string& path);
StudyConfig parse_config(std::istream& in, const std::string& origin);

/// FNV-1a hash of the canonical serialized configuration.
uint64_t config_hash(const StudyConfig& cfg);
std::string serialize_config(const StudyConfig& cfg);

/// One row of a convergence study.
struct ConvergenceRecord {
  std::string geometry, kind;
  int p = 0, level = 0;
  int dofs = 0, superspace_dim = 0;
  long iterations = 0;
  double max_pw_error = 0.0;
  double observed_order = std::numeric_limits<double>::quiet_NaN();
  double assembly_seconds = 0.0, solve_seconds = 0.0;
  uint64_t config_hash = 0;
  bool failed = false;
  std::string error;
};

extern const char* kCsvHeader;
std::string csv_row(const ConvergenceRecord& rec);

MultipatchGeometry make_geometry(const StudyConfig& cfg);

/// Full pipeline for one (kind, p, level) cell: geometry, spaces, assembly,
/// transform, GMRES, exterior evaluation against the dipole field.
ConvergenceRecord run_single(const StudyConfig& cfg, DiscreteSpace::Kind kind, int p,
                             int level);

/// Iterates the (kind, p, level) grid, appending rows to the CSV file
/// incrementally. A failing cell records an error row and continues.
std::vector<ConvergenceRecord> run_study(const StudyConfig& cfg);

/// Geometry and space statistics plus a dense-matrix memory estimate.
void print_info(const StudyConfig& cfg, std::ostream& out);

}  // namespace efie

#endif  // EFIE_STUDY_HPP_
