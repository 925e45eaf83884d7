#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hmcert/certifier.hpp"

namespace hmcert::cli {

enum ExitCode : int {
  kExitCertified = 0,
  kExitError = 1,
  kExitNotCertified = 2,
  kExitInconclusive = 3,
};

struct RunConfig {
  std::string command;
  std::string curve_path;
  std::string map_path;
  std::string sweep_path;
  int grid_n = 256;
  double tol = kDefaultTol;
  int fourier_n = 1024;
  std::string out_dir = ".";
  int rings = 8;
  int spokes = 16;
  /// SVG stroke width in image units; 0 picks 0.3% of the image extent.
  double stroke_width = 0.0;
  int jobs = 1;
  /// Adds a wall-clock column to sweep output (breaks byte determinism).
  bool timing = false;
};

/// Throws Error{invalid_params} naming the first bad field.
void validate(const RunConfig& cfg);

int exit_code_for(Verdict v);

/// Each command returns its exit status; diagnostics go to `log`.
int cmd_certify(const RunConfig& cfg, std::ostream& log);
int cmd_render(const RunConfig& cfg, std::ostream& log);
int cmd_sweep(const RunConfig& cfg, std::ostream& log);
int cmd_curve_info(const RunConfig& cfg, std::ostream& out, std::ostream& log);
int cmd_map_info(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Profile table with columns tau,T,err_est,f_prime,J_boundary.
std::string tprofile_csv(const BoundaryMap& map, const TProfile& profile);

// ---------------------------------------------------------------------------
// Sweeps over the polar cosine family
// ---------------------------------------------------------------------------

struct SweepSpec {
  double r0 = 1.0;
  std::vector<double> eps;
  std::vector<int> k;
  std::vector<MapSpec> maps{MapSpec::identity()};
};

/// {"r0": 1, "eps": [...], "k": [...], "map": {...}} or "maps": [{...}, ...].
SweepSpec parse_sweep_spec(const std::string& text);

struct SweepRow {
  double eps = 0.0;
  int k = 0;
  std::string map_id;
  std::optional<Certificate> certificate;
  std::string error;
  double seconds = 0.0;
};

/// Rows in (eps, k, map) lexicographic order whatever the completion order.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, int grid_n, double tol, int fourier_n, int jobs);
std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, bool timing);

/// printf("%.17g").
std::string num(double v);

}  // namespace hmcert::cli
