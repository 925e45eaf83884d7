#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "doctest.h"
#include "expect_error.hpp"
#include "hmcert/spec_json.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "render.hpp"

using namespace hmcert;
using namespace hmcert::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Fresh scratch directory per test case, removed on exit.
struct Scratch {
  fs::path dir;
  explicit Scratch(const std::string& name) {
    dir = fs::temp_directory_path() / ("hmcert-test-" + std::to_string(::getpid()) + "-" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string write(const std::string& file, const std::string& text) const {
    std::ofstream(dir / file) << text;
    return (dir / file).string();
  }
  std::string sub(const std::string& name) const { return (dir / name).string(); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (char c : line) {
      if (c == '"') {
        quoted = !quoted;
      } else if (c == ',' && !quoted) {
        cells.push_back(cell);
        cell.clear();
      } else {
        cell += c;
      }
    }
    cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

RunConfig config(const Scratch& s, const std::string& curve, const std::string& map, const std::string& out) {
  RunConfig cfg;
  cfg.curve_path = s.write(out + "-curve.json", curve);
  cfg.map_path = s.write(out + "-map.json", map);
  cfg.out_dir = s.sub(out);
  cfg.grid_n = 64;
  return cfg;
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(HMCERT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* kCircle = R"({"type": "circle"})";
const char* kEllipse = R"({"type": "ellipse", "a": 2, "b": 1})";
const char* kLobed = R"({"type": "polar", "formula_id": "cosine", "params": {"eps": 0.3, "k": 3}})";
const char* kIdentity = R"({"type": "identity"})";

}  // namespace

TEST_CASE("certify on the circle exits 0 with T = 1 in the profile") {
  Scratch s("circle");
  RunConfig cfg = config(s, kCircle, kIdentity, "out");
  cfg.grid_n = 256;
  std::ostringstream log;
  CHECK(cmd_certify(cfg, log) == kExitCertified);
  const auto rows = read_csv(fs::path(cfg.out_dir) / "tprofile.csv");
  REQUIRE(rows.size() == 257);
  CHECK(rows[0] == std::vector<std::string>{"tau", "T", "err_est", "f_prime", "J_boundary"});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::abs(std::stod(rows[i][1]) - 1.0) <= 1e-8);

  const json cert = json::parse(slurp(fs::path(cfg.out_dir) / "certificate.json"));
  CHECK(cert["verdict"] == "certified-diffeomorphism");
  CHECK(cert["version"] == std::string(version()));
  CHECK(cert["curve"]["type"] == "circle");
  CHECK(cert["grid_n"] == 256);
  CHECK(cert["oracle"]["verdict"] == "univalent-evidence");
  const json oracle = json::parse(slurp(fs::path(cfg.out_dir) / "oracle.json"));
  CHECK(oracle["boundary_winding"] == 1);
}

TEST_CASE("certify exit codes follow the verdict") {
  Scratch s("codes");
  std::ostringstream log;
  CHECK(cmd_certify(config(s, kEllipse, kIdentity, "ellipse"), log) == kExitCertified);
  CHECK(cmd_certify(config(s, kLobed, kIdentity, "lobed"), log) == kExitNotCertified);
  CHECK(exit_code_for(Verdict::inconclusive) == kExitInconclusive);
}

TEST_CASE("malformed specs exit 1 and name the field") {
  Scratch s("malformed");
  std::ostringstream log;
  CHECK(cmd_certify(config(s, R"({"radius": 1})", kIdentity, "a"), log) == kExitError);
  CHECK(log.str().find("'type'") != std::string::npos);

  std::ostringstream log2;
  CHECK(cmd_certify(config(s, R"({"type": "ellipse", "a": 2})", kIdentity, "b"), log2) == kExitError);
  CHECK(log2.str().find("'b'") != std::string::npos);

  std::ostringstream log3;
  CHECK(cmd_certify(config(s, kCircle, R"({"type": "sin-perturbed", "params": {"a": 0.5, "k": 1.5}})", "c"), log3) ==
        kExitError);
  CHECK(log3.str().find("'k'") != std::string::npos);

  std::ostringstream log4;
  CHECK(cmd_certify(config(s, "{not json", kIdentity, "d"), log4) == kExitError);

  std::ostringstream log5;
  RunConfig missing = config(s, kCircle, kIdentity, "e");
  missing.map_path = s.sub("nope.json");
  CHECK(cmd_certify(missing, log5) == kExitError);
}

TEST_CASE("run configuration ranges") {
  RunConfig cfg;
  CHECK_NOTHROW(validate(cfg));
  for (int g : {32, 100, 32768}) {
    RunConfig c;
    c.grid_n = g;
    CHECK(HMCERT_THROWN_CODE(validate(c)) == ErrorCode::invalid_params);
  }
  RunConfig t;
  t.tol = 1e-2;
  CHECK(HMCERT_THROWN_CODE(validate(t)) == ErrorCode::invalid_params);
  t.tol = 1e-11;
  CHECK(HMCERT_THROWN_CODE(validate(t)) == ErrorCode::invalid_params);
  RunConfig n;
  n.fourier_n = 48;
  CHECK(HMCERT_THROWN_CODE(validate(n)) == ErrorCode::invalid_params);
  RunConfig r;
  r.rings = 1;
  CHECK(HMCERT_THROWN_CODE(validate(r)) == ErrorCode::invalid_params);
  RunConfig j;
  j.jobs = 0;
  CHECK(HMCERT_THROWN_CODE(validate(j)) == ErrorCode::invalid_params);
}

TEST_CASE("repeated certify runs are byte-identical") {
  Scratch s("determinism");
  const RunConfig a = config(s, kEllipse, R"({"type": "sin-perturbed", "params": {"a": 0.3, "k": 2}})", "a");
  RunConfig b = a;
  b.out_dir = s.sub("b");
  std::ostringstream log;
  REQUIRE(cmd_certify(a, log) == kExitCertified);
  REQUIRE(cmd_certify(b, log) == kExitCertified);
  for (const char* f : {"certificate.json", "tprofile.csv", "oracle.json"}) {
    CAPTURE(f);
    CHECK(slurp(fs::path(a.out_dir) / f) == slurp(fs::path(b.out_dir) / f));
  }
}

TEST_CASE("render draws concentric circles for the identity") {
  const auto r = render_map(HarmonicMap::from_terms({{1, 1.0}}), 4, 6);
  REQUIRE(r.rings.size() == 4);
  CHECK(r.spokes.size() == 6);
  CHECK(r.boundary.empty());
  for (std::size_t i = 0; i < r.rings.size(); ++i) {
    const double rad = (i + 1.0) / 5.0;
    REQUIRE(r.rings[i].points.size() == static_cast<std::size_t>(kPolylinePoints));
    for (const Point& p : r.rings[i].points) CHECK(std::abs(std::abs(p) - rad) < 1e-6 * rad);
  }
}

TEST_CASE("render maps rings to ellipses of axis ratio 3 for z + 0.5 conj z") {
  const auto r = render_map(HarmonicMap::from_terms({{1, 1.0}, {-1, 0.5}}), 3, 4);
  for (std::size_t i = 0; i < r.rings.size(); ++i) {
    const double rad = (i + 1.0) / 4.0;
    double xmax = 0.0, ymax = 0.0;
    for (const Point& p : r.rings[i].points) {
      xmax = std::max(xmax, std::abs(p.real()));
      ymax = std::max(ymax, std::abs(p.imag()));
      const double e = std::pow(p.real() / (1.5 * rad), 2) + std::pow(p.imag() / (0.5 * rad), 2);
      CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(xmax / ymax == doctest::Approx(3.0).epsilon(1e-9));
  }
}

TEST_CASE("render writes a fitted, deterministic SVG") {
  Scratch s("render");
  RunConfig cfg = config(s, kEllipse, kIdentity, "r1");
  cfg.rings = 3;
  cfg.spokes = 5;
  cfg.fourier_n = 256;
  std::ostringstream log;
  REQUIRE(cmd_render(cfg, log) == 0);
  RunConfig again = cfg;
  again.out_dir = s.sub("r2");
  REQUIRE(cmd_render(again, log) == 0);
  const std::string svg = slurp(fs::path(cfg.out_dir) / "render.svg");
  CHECK(svg == slurp(fs::path(again.out_dir) / "render.svg"));

  auto count = [&](const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = svg.find(needle); pos != std::string::npos; pos = svg.find(needle, pos + 1)) ++n;
    return n;
  };
  CHECK(count("<polygon ") == 3 + 1);
  CHECK(count("<polyline ") == 5);

  // The ellipse fills x in [-2, 2], y in [-1, 1]; the margin is 5% of 4.
  const auto vb = svg.find("viewBox=\"");
  REQUIRE(vb != std::string::npos);
  std::istringstream in(svg.substr(vb + 9));
  double x, y, w, h;
  in >> x >> y >> w >> h;
  CHECK(x == doctest::Approx(-2.2).epsilon(1e-6));
  CHECK(y == doctest::Approx(-1.2).epsilon(1e-6));
  CHECK(w == doctest::Approx(4.4).epsilon(1e-6));
  CHECK(h == doctest::Approx(2.4).epsilon(1e-6));
}

TEST_CASE("sweep rows are ordered, deterministic and keep going after failures") {
  Scratch s("sweep");
  RunConfig cfg;
  cfg.sweep_path = s.write("sweep.json", R"({"eps": [0, 0.3, 1.5], "k": [3], "maps": [{"type": "identity"}]})");
  cfg.grid_n = 64;
  cfg.fourier_n = 256;
  cfg.out_dir = s.sub("one");
  std::ostringstream log;
  REQUIRE(cmd_sweep(cfg, log) == 0);
  RunConfig par = cfg;
  par.jobs = 3;
  par.out_dir = s.sub("three");
  REQUIRE(cmd_sweep(par, log) == 0);
  const std::string a = slurp(fs::path(cfg.out_dir) / "sweep.csv");
  CHECK(a == slurp(fs::path(par.out_dir) / "sweep.csv"));

  const auto rows = read_csv(fs::path(cfg.out_dir) / "sweep.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].size() == 11);
  CHECK(rows[0][4] == "min_T");
  CHECK(std::stod(rows[1][0]) == 0.0);
  CHECK(std::abs(std::stod(rows[1][4]) - 1.0) < 1e-8);
  CHECK(rows[1][6] == "certified-diffeomorphism");
  CHECK(rows[2][6] == "not-certified");
  CHECK(rows[2][7] == "folding-detected");
  CHECK(rows[3][4].empty());
  CHECK_FALSE(rows[3][10].empty());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK_FALSE((rows[i][6] == "certified-diffeomorphism" && rows[i][7] == "folding-detected"));
  }

  RunConfig timed = cfg;
  timed.timing = true;
  timed.out_dir = s.sub("timed");
  REQUIRE(cmd_sweep(timed, log) == 0);
  CHECK(read_csv(fs::path(timed.out_dir) / "sweep.csv")[0].back() == "runtime_s");
}

TEST_CASE("sweep spec parsing") {
  const auto s = parse_sweep_spec(R"({"r0": 2, "eps": [0.1], "k": [2, 3], "map": {"type": "sin-perturbed", "a": 0.2, "k": 1}})");
  CHECK(s.r0 == 2.0);
  CHECK(s.k == std::vector<int>{2, 3});
  REQUIRE(s.maps.size() == 1);
  CHECK(s.maps[0].family == MapFamily::sin_perturbed);
  CHECK(HMCERT_THROWN_CODE(parse_sweep_spec(R"({"eps": [0.1]})")) == ErrorCode::invalid_spec);
  CHECK(HMCERT_THROWN_CODE(parse_sweep_spec(R"({"eps": [], "k": [3]})")) == ErrorCode::invalid_spec);
  CHECK(HMCERT_THROWN_CODE(parse_sweep_spec("[")) == ErrorCode::invalid_spec);
}

TEST_CASE("curve-info and map-info print JSON") {
  Scratch s("info");
  RunConfig cfg = config(s, kEllipse, R"({"type": "sin-perturbed", "params": {"a": 0.5, "k": 1}})", "x");
  std::ostringstream out, log;
  REQUIRE(cmd_curve_info(cfg, out, log) == 0);
  const json c = json::parse(out.str());
  CHECK(c["length"].get<double>() == doctest::Approx(oracle::ellipse_perimeter(2, 1)).epsilon(1e-10));
  CHECK(c["convex"] == true);
  CHECK(c["dini_convergent"] == true);

  std::ostringstream out2;
  REQUIRE(cmd_map_info(cfg, out2, log) == 0);
  const json m = json::parse(out2.str());
  CHECK(m["increment"].get<double>() == doctest::Approx(oracle::ellipse_perimeter(2, 1)).epsilon(1e-10));
  CHECK(m["strict"] == true);
}

TEST_CASE("spec documents round-trip through JSON") {
  const std::vector<CurveSpec> curves = {CurveSpec::circle(2.0), CurveSpec::ellipse(3, 1),
                                         CurveSpec::polar_cosine(0.2, 5, 1.5)};
  for (const auto& c : curves) CHECK(parse_curve_spec(to_json(c)).id() == c.id());
  const std::vector<MapSpec> maps = {MapSpec::identity(), MapSpec::sin_perturbed(0.25, 2),
                                     MapSpec::knots({0.0, 1.0, oracle::two_pi}, {0.0, 2.0, 7.0})};
  for (const auto& m : maps) {
    const MapSpec back = parse_map_spec(to_json(m));
    CHECK(back.id() == m.id());
    CHECK(back.t == m.t);
    CHECK(back.f == m.f);
  }
  const CurveSpec pts = parse_curve_spec(R"({"type": "points", "xy": [[1, 0], [0, 1], [-1, 0], [0, -1]]})");
  CHECK(pts.xy.size() == 4);
  CHECK(HMCERT_THROWN_CODE(parse_curve_spec(R"({"type": "polar", "formula_id": "star"})")) == ErrorCode::invalid_spec);
  CHECK(HMCERT_THROWN_CODE(parse_map_spec(R"({"type": "spline"})")) == ErrorCode::invalid_spec);
}

TEST_CASE("the executable reports exit codes") {
  Scratch s("binary");
  const std::string curve = s.write("c.json", kCircle);
  const std::string map = s.write("m.json", kIdentity);
  const std::string bad = s.write("bad.json", R"({"a": 1})");
  CHECK(run_binary("--version") == 0);
  CHECK(run_binary("") == 1);
  CHECK(run_binary("certify --grid-n nope") == 1);
  CHECK(run_binary("certify --curve " + bad + " --map " + map + " --out " + s.sub("x")) == 1);
  CHECK(run_binary("certify --grid-n 64 --curve " + curve + " --map " + map + " --out " + s.sub("y")) == 0);
  CHECK(fs::exists(s.dir / "y" / "certificate.json"));
}
