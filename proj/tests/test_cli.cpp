#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "fracq/oscillator.hpp"
#include "fracq/params.hpp"
#include "fracq/well_audit.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace fracq;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

class Scratch {
 public:
  explicit Scratch(const std::string& name) : dir_(fs::temp_directory_path() / ("fracq_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  std::string str() const { return dir_.string(); }
  fs::path operator/(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream l(line);
    std::string cell;
    while (std::getline(l, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("f-alpha over a three-point grid") {
  Scratch dir("falpha");
  const Run r = run({"f-alpha", "--alpha-grid", "-0.5,0,0.5", "--out", dir.str()});
  CHECK(r.code == cli::kExitOk);
  const auto rows = read_csv(dir / "f_alpha.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[0][0] == "alpha");
  CHECK(std::abs(std::stod(rows[2][1])) <= 1e-6);
  CHECK(std::stod(rows[1][1]) < 0.0);
  CHECK(std::stod(rows[3][1]) > 0.0);
  CHECK(rows[1][1].size() == std::string("-1.12150493122e+00").size());
  CHECK(fs::exists(dir / "f_alpha.gp"));
}

TEST_CASE("spectrum commands") {
  Scratch dir("spectrum");
  SUBCASE("airy") {
    REQUIRE(run({"airy-spectrum", "--levels", "3", "--out", dir.str()}).code == cli::kExitOk);
    const auto rows = read_csv(dir / "spectrum.csv");
    REQUIRE(rows.size() == 4);
    const Spectrum exact = airy_spectrum(3, {});
    for (std::size_t n = 0; n < 3; ++n) {
      CHECK(rows[n + 1][0] == "airy_exact");
      CHECK(std::stod(rows[n + 1][2]) == doctest::Approx(exact.levels[n].energy).epsilon(1e-11));
    }
  }
  SUBCASE("wkb for the ordinary oscillator") {
    REQUIRE(run({"wkb", "--alpha", "2", "--levels", "2", "--d-alpha", "0.5", "--out", dir.str()}).code ==
            cli::kExitOk);
    CHECK(slurp(dir / "spectrum.csv") == "method,n,E\nwkb,0,5.00000000000e-01\nwkb,1,1.50000000000e+00\n");
  }
  SUBCASE("shoot") {
    REQUIRE(run({"shoot", "--alpha", "1", "--levels", "2", "--out", dir.str()}).code == cli::kExitOk);
    const auto rows = read_csv(dir / "spectrum.csv");
    CHECK(std::stod(rows[1][2]) == doctest::Approx(airy_spectrum(1, {}).levels[0].energy).epsilon(1e-6));
  }
}

TEST_CASE("exit codes") {
  Scratch dir("exit");
  const Run unknown = run({"frobnicate"});
  CHECK(unknown.code == cli::kExitUsage);
  CHECK(unknown.err.find("usage: fracq") != std::string::npos);
  CHECK(run({}).code == cli::kExitUsage);
  CHECK(run({"--help"}).code == cli::kExitOk);
  CHECK(run({"shoot", "--help"}).code == cli::kExitOk);
  CHECK(run({"f-alpha", "--alpha", "1.5", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"f-alpha", "--alpha", "abc", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"airy-spectrum", "--alpha", "1.5", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"solve-grid", "--alpha", "3", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"solve-grid", "--n-interior", "8", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"wkb", "--levels", "0", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"shoot", "--cutoff", "2", "--out", dir.str()}).code == cli::kExitDomain);
  CHECK(run({"f-alpha", "--format", "xml", "--out", dir.str()}).code == cli::kExitDomain);
  // An absolute tolerance of 1e-10 on a derivative of order 1e6 is below roundoff.
  const Run unconverged = run({"f-alpha", "--alpha", "-0.999", "--out", dir.str()});
  CHECK(unconverged.code == cli::kExitNoConvergence);
  CHECK(fs::exists(dir / "f_alpha.csv"));
}

TEST_CASE("identical runs give byte-identical files") {
  Scratch a("det_a"), b("det_b");
  for (const auto* d : {&a, &b}) {
    REQUIRE(run({"audit-well", "--alpha-grid", "-0.5,0.25,0.5", "--out", d->str()}).code == cli::kExitOk);
    REQUIRE(run({"solve-grid", "--alpha", "1.5", "--n-interior", "48", "--padding", "4", "--levels", "3", "--out",
                 d->str()})
                .code == cli::kExitOk);
  }
  for (const char* name : {"audit.csv", "audit.gp", "energies.csv", "states.csv", "ground_state.csv", "ground_state.gp"}) {
    CAPTURE(name);
    CHECK(slurp(a / name) == slurp(b / name));
    CHECK_FALSE(slurp(a / name).empty());
  }
}

TEST_CASE("thread count does not change results") {
  Scratch a("threads_1"), b("threads_4");
  setenv("FRACQ_THREADS", "1", 1);
  REQUIRE(run({"shoot", "--alpha", "0.7", "--levels", "4", "--out", a.str()}).code == cli::kExitOk);
  setenv("FRACQ_THREADS", "4", 1);
  REQUIRE(run({"shoot", "--alpha", "0.7", "--levels", "4", "--out", b.str()}).code == cli::kExitOk);
  unsetenv("FRACQ_THREADS");
  CHECK(slurp(a / "spectrum.csv") == slurp(b / "spectrum.csv"));
}

TEST_CASE("JSON output round-trips") {
  Scratch dir("json");
  SUBCASE("audit report") {
    REQUIRE(run({"audit-well", "--alpha-grid", "-0.5,0,0.5,1.5", "--format", "json", "--out", dir.str()}).code ==
            cli::kExitOk);
    CHECK_FALSE(fs::exists(dir / "audit.csv"));
    CHECK_FALSE(fs::exists(dir / "audit.gp"));
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "audit.json"));
    const AuditReport r = audit_report_from_json(j);
    CHECK(r.points.size() == 4);
    CHECK(r.points[3].verdict == Verdict::out_of_validity);
    CHECK(to_json(r) == j);
  }
  SUBCASE("spectrum") {
    REQUIRE(run({"airy-spectrum", "--levels", "4", "--format", "json", "--out", dir.str()}).code == cli::kExitOk);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "spectrum.json"));
    const Spectrum s = spectrum_from_json(j);
    CHECK(s.energies() == airy_spectrum(4, {}).energies());
    CHECK(to_json(s) == j);
  }
  SUBCASE("grid and convergence") {
    REQUIRE(run({"solve-grid", "--n-interior", "32", "--padding", "4", "--levels", "2", "--format", "json", "--out",
                 dir.str()})
                .code == cli::kExitOk);
    const nlohmann::json g = nlohmann::json::parse(slurp(dir / "solve_grid.json"));
    CHECK(g["energies"].size() == 2);
    CHECK(g["potential"] == "well");
    REQUIRE(run({"converge", "--n-interior", "16,32,64", "--padding", "4", "--format", "json", "--out", dir.str()})
                .code == cli::kExitOk);
    const nlohmann::json c = nlohmann::json::parse(slurp(dir / "convergence.json"));
    CHECK(c["rows"].size() == 3);
    CHECK(c["observed_order"].is_number());
  }
}

TEST_CASE("solve-grid outputs and matrix dump") {
  Scratch dir("grid");
  const std::string matrix = (dir / "H.csv").string();
  const Run r = run({"solve-grid", "--alpha", "1", "--n-interior", "40", "--padding", "4", "--levels", "3",
                     "--dump-matrix", matrix, "--out", dir.str()});
  REQUIRE(r.code == cli::kExitOk);
  const auto h = read_csv(matrix);
  CHECK(h.size() == 40);
  CHECK(h[0].size() == 40);
  CHECK(read_csv(dir / "energies.csv").size() == 4);
  CHECK(read_csv(dir / "states.csv")[0] == std::vector<std::string>{"x", "v0", "v1", "v2"});
  CHECK(read_csv(dir / "ground_state.csv")[0] == std::vector<std::string>{"x", "v0", "cosine"});
  CHECK(slurp(dir / "ground_state.gp").find("using 1:3") != std::string::npos);

  REQUIRE(run({"solve-grid", "--potential", "oscillator", "--n-interior", "40", "--padding", "4", "--out", dir.str()})
              .code == cli::kExitOk);
  CHECK(read_csv(dir / "ground_state.csv")[0] == std::vector<std::string>{"x", "v0"});
  CHECK(slurp(dir / "ground_state.gp").find("using 1:3") == std::string::npos);
}

TEST_CASE("riesz-apply and converge tables") {
  Scratch dir("tables");
  REQUIRE(run({"riesz-apply", "--alpha", "0.5", "--points", "256", "--out", dir.str()}).code == cli::kExitOk);
  const auto rows = read_csv(dir / "riesz.csv");
  CHECK(rows.size() == 257);
  CHECK(rows[0] == std::vector<std::string>{"coordinate", "re", "im"});
  REQUIRE(run({"converge", "--alpha", "2", "--n-interior", "32,64,128", "--padding", "4", "--out", dir.str()}).code ==
          cli::kExitOk);
  CHECK(read_csv(dir / "convergence.csv").size() == 4);
  CHECK(slurp(dir / "convergence.gp").find("using 3:4") != std::string::npos);
}

TEST_CASE("plot scripts") {
  Scratch dir("plots");
  const fs::path table = dir / "curve.csv";
  cli::write_atomic(table, "alpha,f\n0,1\n");
  const fs::path script = cli::emit_plot_script(table, cli::PlotKind::f_alpha);
  CHECK(script == dir / "curve.gp");
  const std::string text = slurp(script);
  CHECK(text.find("'curve.csv' using 1:2") != std::string::npos);
  CHECK(text.find("set datafile separator ','") != std::string::npos);
  CHECK(cli::emit_plot_script(table, cli::PlotKind::f_alpha) == script);
  CHECK(slurp(script) == text);
  CHECK(slurp(cli::emit_plot_script(table, cli::PlotKind::spectrum)).find("using 2:3") != std::string::npos);
  CHECK_THROWS_AS(cli::emit_plot_script(dir / "missing.csv", cli::PlotKind::spectrum), DomainError);
}

TEST_CASE("atomic writes replace files and leave no temporaries") {
  Scratch dir("atomic");
  const fs::path target = dir / "table.csv";
  cli::write_atomic(target, "first\n");
  cli::write_atomic(target, "second\n");
  CHECK(slurp(target) == "second\n");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "")) ++entries;
  CHECK(entries == 1);
}
