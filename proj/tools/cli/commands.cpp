#include "commands.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "hmcert/error.hpp"
#include "hmcert/spec_json.hpp"
#include "json.hpp"
#include "render.hpp"

namespace hmcert::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::string read_file(const std::string& path, const char* what) {
  if (path.empty()) throw Error(ErrorCode::invalid_params, std::string("--") + what + " is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::invalid_spec, std::string("cannot read ") + what + " file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::invalid_params, "cannot write '" + path.string() + "'");
  out << text;
}

fs::path out_dir(const RunConfig& cfg) {
  fs::path dir(cfg.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::invalid_params, "cannot create output directory '" + cfg.out_dir + "'");
  return dir;
}

// Runs `body` and maps library errors onto exit status 1.
template <class Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
  }
  return kExitError;
}

}  // namespace

void validate(const RunConfig& cfg) {
  auto bad = [](const std::string& msg) { throw Error(ErrorCode::invalid_params, msg); };
  if (!power_of_two(cfg.grid_n) || cfg.grid_n < 64 || cfg.grid_n > 16384) {
    bad("--grid-n must be a power of two in [64, 16384]");
  }
  if (!power_of_two(cfg.fourier_n) || cfg.fourier_n < 64 || cfg.fourier_n > 65536) {
    bad("--fourier-n must be a power of two in [64, 65536]");
  }
  if (!(cfg.tol >= 1e-10 && cfg.tol <= 1e-3)) bad("--tol must lie in [1e-10, 1e-3]");
  if (cfg.rings < 2) bad("--rings must be >= 2");
  if (cfg.spokes < 2) bad("--spokes must be >= 2");
  if (!(cfg.stroke_width >= 0.0)) bad("--stroke-width must be >= 0");
  if (cfg.jobs < 1) bad("--jobs must be >= 1");
}

int exit_code_for(Verdict v) {
  switch (v) {
    case Verdict::certified_diffeomorphism: return kExitCertified;
    case Verdict::not_certified: return kExitNotCertified;
    case Verdict::inconclusive: return kExitInconclusive;
  }
  return kExitError;
}

std::string tprofile_csv(const BoundaryMap& map, const TProfile& profile) {
  const std::vector<double> J = boundary_jacobian(map, profile);
  std::string out = "tau,T,err_est,f_prime,J_boundary\n";
  for (std::size_t i = 0; i < profile.taus.size(); ++i) {
    const double tau = profile.taus[i];
    out += num(tau) + ',' + num(profile.values[i]) + ',' + num(profile.errors_est[i]) + ',' +
           num(map.param().derivative(tau)) + ',' + num(J[i]) + '\n';
  }
  return out;
}

int cmd_certify(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    validate(cfg);
    const CurveSpec cs = parse_curve_spec(read_file(cfg.curve_path, "curve"));
    const MapSpec ms = parse_map_spec(read_file(cfg.map_path, "map"));
    const JordanCurve curve = build_curve(cs);
    const WeakHomeomorphism param = build_param(ms, curve.length());
    const Certificate cert = certify_with_oracle(curve, param, cfg.grid_n, cfg.tol, cfg.fourier_n);

    const fs::path dir = out_dir(cfg);
    write_file(dir / "certificate.json", to_json(cert) + "\n");
    write_file(dir / "tprofile.csv", tprofile_csv(BoundaryMap(curve, param), cert.profile));
    write_file(dir / "oracle.json", to_json(*cert.oracle) + "\n");
    log << cert.curve_id << " + " << cert.map_id << ": " << to_string(cert.verdict) << " (min T = " << num(cert.min_T)
        << ", margin = " << num(cert.margin) << "; oracle " << to_string(cert.oracle->verdict) << ")\n";
    return exit_code_for(cert.verdict);
  });
}

int cmd_render(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    validate(cfg);
    const CurveSpec cs = parse_curve_spec(read_file(cfg.curve_path, "curve"));
    const MapSpec ms = parse_map_spec(read_file(cfg.map_path, "map"));
    const JordanCurve curve = build_curve(cs);
    const BoundaryMap map(curve, build_param(ms, curve.length()));
    const HarmonicMap hm = harmonic_extension(map, cfg.fourier_n);
    const Rendering r = render_map(hm, cfg.rings, cfg.spokes, &curve);
    write_file(out_dir(cfg) / "render.svg", to_svg(r, cfg.stroke_width));
    return kExitCertified;
  });
}

// ---------------------------------------------------------------------------

SweepSpec parse_sweep_spec(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::invalid_spec, std::string("malformed sweep JSON: ") + e.what());
  }
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::invalid_spec, "field '" + field + "': " + why);
  };
  if (!doc.is_object()) bad("<root>", "expected an object");
  SweepSpec s;
  if (doc.contains("r0")) {
    if (!doc["r0"].is_number()) bad("r0", "expected a number");
    s.r0 = doc["r0"].get<double>();
  }
  if (!doc.contains("eps") || !doc["eps"].is_array()) bad("eps", "expected an array of numbers");
  for (const auto& v : doc["eps"]) {
    if (!v.is_number()) bad("eps", "expected an array of numbers");
    s.eps.push_back(v.get<double>());
  }
  if (!doc.contains("k") || !doc["k"].is_array()) bad("k", "expected an array of integers");
  for (const auto& v : doc["k"]) {
    if (!v.is_number_integer()) bad("k", "expected an array of integers");
    s.k.push_back(v.get<int>());
  }
  if (doc.contains("maps")) {
    if (!doc["maps"].is_array()) bad("maps", "expected an array of map specs");
    s.maps.clear();
    for (const auto& m : doc["maps"]) s.maps.push_back(parse_map_spec(m.dump()));
  } else if (doc.contains("map")) {
    s.maps = {parse_map_spec(doc["map"].dump())};
  }
  if (s.eps.empty() || s.k.empty() || s.maps.empty()) bad("eps/k/maps", "sweep is empty");
  return s;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, int grid_n, double tol, int fourier_n, int jobs) {
  std::vector<SweepRow> rows;
  for (double eps : spec.eps) {
    for (int k : spec.k) {
      for (const MapSpec& m : spec.maps) {
        SweepRow r;
        r.eps = eps;
        r.k = k;
        r.map_id = m.id();
        rows.push_back(std::move(r));
      }
    }
  }
  const std::size_t n_maps = spec.maps.size();
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < rows.size(); i = next++) {
      SweepRow& row = rows[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const JordanCurve curve = build_curve(CurveSpec::polar_cosine(row.eps, row.k, spec.r0));
        const WeakHomeomorphism param = build_param(spec.maps[i % n_maps], curve.length());
        row.certificate = certify_with_oracle(curve, param, grid_n, tol, fourier_n);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };
  const int n_threads = std::max(1, std::min<int>(jobs, static_cast<int>(rows.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

std::string sweep_csv(const SweepSpec& spec, const std::vector<SweepRow>& rows, bool timing) {
  std::string out = "eps,k,r0,map,min_T,margin,verdict,oracle_verdict,min_interior_J,boundary_winding,error";
  out += timing ? ",runtime_s\n" : "\n";
  for (const SweepRow& r : rows) {
    out += num(r.eps) + ',' + std::to_string(r.k) + ',' + num(spec.r0) + ",\"" + r.map_id + "\",";
    if (r.certificate) {
      const Certificate& c = *r.certificate;
      out += num(c.min_T) + ',' + num(c.margin) + ',' + std::string(to_string(c.verdict)) + ',' +
             std::string(to_string(c.oracle->verdict)) + ',' + num(c.oracle->min_interior_J) + ',' +
             std::to_string(c.oracle->boundary_winding) + ",";
    } else {
      std::string msg = r.error;
      for (char& ch : msg) {
        if (ch == '"') ch = '\'';
        if (ch == '\n') ch = ' ';
      }
      out += ",,,,,,\"" + msg + "\"";
    }
    if (timing) out += ',' + num(r.seconds);
    out += '\n';
  }
  return out;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& log) {
  return guarded(log, [&] {
    validate(cfg);
    const SweepSpec spec = parse_sweep_spec(read_file(cfg.sweep_path, "sweep"));
    const std::vector<SweepRow> rows = run_sweep(spec, cfg.grid_n, cfg.tol, cfg.fourier_n, cfg.jobs);
    write_file(out_dir(cfg) / "sweep.csv", sweep_csv(spec, rows, cfg.timing));
    int unsound = 0, failed = 0;
    for (const SweepRow& r : rows) {
      if (!r.certificate) {
        ++failed;
      } else if (r.certificate->verdict == Verdict::certified_diffeomorphism &&
                 r.certificate->oracle->verdict == OracleVerdict::folding_detected) {
        ++unsound;
      }
    }
    log << rows.size() << " rows, " << failed << " failed";
    if (unsound > 0) log << ", " << unsound << " certified rows contradicted by the oracle";
    log << '\n';
    return kExitCertified;
  });
}

int cmd_curve_info(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const CurveSpec cs = parse_curve_spec(read_file(cfg.curve_path, "curve"));
    const JordanCurve curve = build_curve(cs);
    const ModulusOfContinuity& omega = curve.tangent_modulus();
    const DiniResult dini = dini_integral(omega, 0.5 * curve.length());
    json j;
    j["id"] = cs.id();
    j["spec"] = json::parse(to_json(cs));
    j["length"] = curve.length();
    j["diameter"] = curve.diameter();
    j["speed_defect"] = curve.speed_defect();
    j["table_size"] = curve.table_size();
    j["total_turning"] = curve.turning().total_turning();
    j["convex"] = is_convex(curve, 128);
    j["omega_kind"] = omega.kind() == ModulusOfContinuity::Kind::closed_form ? "closed-form" : "grid-estimated";
    j["omega_safety"] = omega.safety_factor();
    j["dini_convergent"] = dini.convergent;
    j["dini_value"] = dini.value;
    out << j.dump(2) << '\n';
    return 0;
  });
}

int cmd_map_info(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
  return guarded(log, [&] {
    const MapSpec ms = parse_map_spec(read_file(cfg.map_path, "map"));
    // Knot maps carry absolute values, so the increment comes from the curve.
    double length = kTwoPi;
    if (!cfg.curve_path.empty()) length = build_curve(parse_curve_spec(read_file(cfg.curve_path, "curve"))).length();
    const WeakHomeomorphism f = build_param(ms, length);
    const LipschitzEstimate est = lipschitz_estimate(f, 4096);
    json j;
    j["id"] = f.id();
    j["spec"] = json::parse(to_json(ms));
    j["increment"] = f.increment();
    j["lipschitz"] = f.lipschitz();
    j["lipschitz_grid"] = est.L_lower;
    j["lower_quotient_grid"] = est.ell_lower;
    j["strict"] = f.strict();
    out << j.dump(2) << '\n';
    return 0;
  });
}

}  // namespace hmcert::cli
