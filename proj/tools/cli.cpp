#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "fracq/grid_solver.hpp"
#include "fracq/io.hpp"
#include "fracq/oscillator.hpp"
#include "fracq/parallel.hpp"
#include "fracq/params.hpp"
#include "fracq/riesz.hpp"
#include "fracq/well_audit.hpp"

namespace fracq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::vector<std::string> kCommands = {"audit-well", "f-alpha", "riesz-apply", "airy-spectrum",
                                            "wkb",        "shoot",   "solve-grid",  "converge"};

struct Options {
  PhysParams params;
  std::vector<double> alpha_grid;
  int levels = 5;
  std::string method;
  std::string potential = "well";
  Eigen::Index n_interior = 256;
  double padding = 16.0;
  std::vector<Eigen::Index> resolutions = {64, 128, 256};
  std::vector<double> paddings = {16.0};
  double tol = 1e-10;
  double audit_tol = kAuditTolerance;
  Eigen::Index points = 4096;
  double domain = 0.0;
  int steps = 40000;
  double cutoff = 0.0;
  std::string out = ".";
  std::string format = "csv";
  std::string dump_matrix;
  int threads = 1;
};

// Collects written files so the summary lists them in order.
class Output {
 public:
  Output(const Options& o, std::ostream& log) : dir_(o.out), json_(o.format == "json"), log_(log) {
    fs::create_directories(dir_);
  }

  bool is_json() const { return json_; }

  fs::path write(const std::string& stem, const std::string& contents) {
    const fs::path path = dir_ / (stem + (json_ ? ".json" : ".csv"));
    write_atomic(path, contents);
    log_ << "wrote " << path.string() << '\n';
    return path;
  }

  void write_json(const std::string& stem, const json& j) { write(stem, j.dump(2) + "\n"); }

  void plot(const fs::path& table, PlotKind kind) {
    if (json_) return;
    log_ << "wrote " << emit_plot_script(table, kind).string() << '\n';
  }

 private:
  fs::path dir_;
  bool json_;
  std::ostream& log_;
};

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream s;
  fn(s);
  return s.str();
}

std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 0; i < 17; ++i) grid.push_back(-0.95 + 1.9 * i / 16.0);
  return grid;
}

void add_params(CLI::App* sub, Options& o, bool alpha) {
  if (alpha) sub->add_option("--alpha", o.params.alpha, "fractional exponent")->capture_default_str();
  sub->add_option("--hbar", o.params.hbar, "reduced Planck constant")->capture_default_str();
  sub->add_option("--d-alpha", o.params.d_alpha, "kinetic coefficient D_alpha")->capture_default_str();
  sub->add_option("--halfwidth", o.params.halfwidth, "well half-width a")->capture_default_str();
  sub->add_option("--spring-k", o.params.spring_k, "oscillator stiffness k")->capture_default_str();
  sub->add_option("--amplitude", o.params.amplitude, "cosine ansatz amplitude A")->capture_default_str();
  sub->add_option("--out", o.out, "output directory")->capture_default_str();
  sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
}

void add_tol(CLI::App* sub, Options& o, const std::string& what) {
  sub->add_option("--tol", o.tol, what)->check(CLI::PositiveNumber)->capture_default_str();
}

void add_levels(CLI::App* sub, Options& o) {
  sub->add_option("--levels", o.levels, "number of levels")->check(CLI::PositiveNumber)->capture_default_str();
}

void add_grid(CLI::App* sub, Options& o) {
  sub->add_option("--potential", o.potential, "well or oscillator")
      ->check(CLI::IsMember({"well", "oscillator"}))
      ->capture_default_str();
  sub->add_option("--method", o.method, "discrete symbol: lattice or spectral")
      ->check(CLI::IsMember({"lattice", "spectral"}));
}

Symbol parse_symbol(const std::string& name, Symbol fallback) {
  if (name.empty()) return fallback;
  return name == "spectral" ? Symbol::spectral : Symbol::lattice;
}

GridOptions grid_options(const Options& o) {
  GridOptions g;
  g.symbol = parse_symbol(o.method, Symbol::lattice);
  g.threads = o.threads;
  return g;
}

int run_f_alpha(const Options& o, Output& out, std::ostream& log) {
  const std::vector<double> grid = o.alpha_grid.empty() ? std::vector<double>{o.params.alpha} : o.alpha_grid;
  std::vector<quad::QuadResult> f(grid.size()), df(grid.size());
  parallel_for(grid.size(), o.threads, [&](std::size_t i) {
    f[i] = f_of_alpha(grid[i], o.tol);
    df[i] = df_dalpha(grid[i], o.tol);
  });
  bool converged = true;
  for (std::size_t i = 0; i < grid.size(); ++i) converged = converged && f[i].converged && df[i].converged;
  if (out.is_json()) {
    json rows = json::array();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows.push_back({{"alpha", grid[i]},
                      {"f", f[i].value},
                      {"f_error", f[i].abs_err_estimate},
                      {"df", df[i].value},
                      {"df_error", df[i].abs_err_estimate}});
    }
    out.write_json("f_alpha", {{"tolerance", o.tol}, {"converged", converged}, {"rows", rows}});
  } else {
    const fs::path table = out.write("f_alpha", render([&](std::ostream& s) {
      s << "alpha,f,f_error,df,df_error\n";
      for (std::size_t i = 0; i < grid.size(); ++i) {
        s << format_number(grid[i]) << ',' << format_number(f[i].value) << ',' << format_number(f[i].abs_err_estimate)
          << ',' << format_number(df[i].value) << ',' << format_number(df[i].abs_err_estimate) << '\n';
      }
    }));
    out.plot(table, PlotKind::f_alpha);
  }
  if (!converged) {
    log << "warning: quadrature did not reach tolerance " << o.tol << " for every alpha\n";
    return kExitNoConvergence;
  }
  return kExitOk;
}

int run_audit_well(const Options& o, Output& out, std::ostream& log) {
  AuditOptions a;
  a.tolerance = o.audit_tol;
  a.quad_tolerance = o.tol;
  a.threads = o.threads;
  const AuditReport r = run_audit(o.alpha_grid.empty() ? default_alpha_grid() : o.alpha_grid, o.params, a);
  if (out.is_json()) {
    out.write_json("audit", to_json(r));
  } else {
    out.plot(out.write("audit", render([&](std::ostream& s) { write_csv(s, r); })), PlotKind::f_alpha);
  }
  log << "verdict: " << to_string(r.verdict) << "\nf monotone: " << (r.f_monotone ? "yes" : "no")
      << "\nf zero crossing: " << format_number(r.f_zero_crossing) << '\n';
  for (const auto& pt : r.points) {
    if (!pt.f.converged || !pt.df.converged) {
      log << "warning: quadrature did not converge at alpha=" << format_number(pt.alpha) << '\n';
      return kExitNoConvergence;
    }
  }
  return kExitOk;
}

int run_riesz_apply(const Options& o, Output& out, std::ostream& log) {
  const double domain = o.domain > 0.0 ? o.domain : 4.0 * o.params.halfwidth;
  const SampledFunction psi = sample(Space::position, domain, o.points,
                                     [&](double x) -> std::complex<double> { return psi0(x, o.params); });
  RieszOptions r;
  r.symbol = parse_symbol(o.method, Symbol::spectral);
  const SampledFunction result = riesz_apply(psi, o.params, r);
  if (result.boundary_warning) log << "warning: spectrum of the input reaches the grid edge (aliasing)\n";
  if (out.is_json()) {
    std::vector<double> x, re, im;
    for (Eigen::Index j = 0; j < result.size(); ++j) {
      x.push_back(result.coordinate(j));
      re.push_back(result.samples(j).real());
      im.push_back(result.samples(j).imag());
    }
    out.write_json("riesz", {{"alpha", o.params.alpha},
                             {"reliable_halfwidth", result.reliable_halfwidth},
                             {"boundary_warning", result.boundary_warning},
                             {"coordinate", x},
                             {"re", re},
                             {"im", im}});
  } else {
    out.plot(out.write("riesz", render([&](std::ostream& s) { write_csv(s, result); })), PlotKind::riesz);
  }
  return kExitOk;
}

int emit_spectrum(const Spectrum& s, Output& out, std::ostream& log) {
  if (out.is_json()) {
    out.write_json("spectrum", to_json(s));
  } else {
    out.plot(out.write("spectrum", render([&](std::ostream& os) { write_csv(os, s); })), PlotKind::spectrum);
  }
  for (const auto& l : s.levels) log << "E_" << l.n << " = " << format_number(l.energy) << '\n';
  return kExitOk;
}

int run_solve_grid(const Options& o, Output& out, std::ostream& log) {
  const PotentialTag tag = parse_potential(o.potential);
  const DiscreteHamiltonian h = build_hamiltonian(tag, o.params, o.n_interior, o.padding, grid_options(o));
  if (!o.dump_matrix.empty()) {
    write_atomic(o.dump_matrix, render([&](std::ostream& s) { write_matrix_csv(s, h); }));
    log << "wrote " << o.dump_matrix << '\n';
  }
  const EigenResult r = solve_eigen(h, std::min<Eigen::Index>(o.levels, h.n_interior()));
  if (out.is_json()) {
    json j = to_json(r);
    j["potential"] = to_string(tag);
    j["alpha"] = o.params.alpha;
    j["n_interior"] = h.n_interior();
    j["padding"] = o.padding;
    out.write_json("solve_grid", j);
  } else {
    out.write("energies", render([&](std::ostream& s) { write_energies_csv(s, r); }));
    out.write("states", render([&](std::ostream& s) { write_states_csv(s, r); }));
    const Eigen::VectorXd v0 = r.states.col(0);
    const fs::path table = out.write("ground_state", render([&](std::ostream& s) {
      const bool well = tag == PotentialTag::well;
      Eigen::VectorXd cosine = (0.5 * std::numbers::pi / o.params.halfwidth * r.grid.array()).cos().matrix();
      cosine *= cosine.dot(v0) / cosine.squaredNorm();
      s << (well ? "x,v0,cosine\n" : "x,v0\n");
      for (Eigen::Index i = 0; i < r.grid.size(); ++i) {
        s << format_number(r.grid(i)) << ',' << format_number(v0(i));
        if (well) s << ',' << format_number(cosine(i));
        s << '\n';
      }
    }));
    out.plot(table, PlotKind::ground_state);
  }
  for (Eigen::Index k = 0; k < r.energies.size(); ++k) log << "E_" << k << " = " << format_number(r.energies(k)) << '\n';
  return kExitOk;
}

int run_converge(const Options& o, Output& out, std::ostream& log) {
  const ConvergenceTable t =
      convergence_study(parse_potential(o.potential), o.params, o.resolutions, o.paddings, grid_options(o));
  if (out.is_json()) {
    out.write_json("convergence", to_json(t));
  } else {
    out.plot(out.write("convergence", render([&](std::ostream& s) { write_csv(s, t); })), PlotKind::convergence);
  }
  log << "observed order: " << format_number(t.observed_order) << "\nextrapolated E_0: " << format_number(t.extrapolated)
      << '\n';
  return kExitOk;
}

}  // namespace

void write_atomic(const fs::path& path, const std::string& contents) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw DomainError("cannot open " + tmp.string() + " for writing");
    f << contents;
    f.close();
    if (!f) throw DomainError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

fs::path emit_plot_script(const fs::path& table, PlotKind kind) {
  std::ifstream in(table);
  if (!in) throw DomainError("plot table " + table.string() + " does not exist");
  std::string header;
  std::getline(in, header);

  const std::string data = "'" + table.filename().string() + "'";
  std::ostringstream s;
  s << "set datafile separator ','\n"
    << "set terminal pngcairo size 800,600\n"
    << "set output '" << table.stem().string() << ".png'\n"
    << "set key autotitle columnhead\n"
    << "set grid\n";
  switch (kind) {
    case PlotKind::f_alpha:
      s << "set xlabel 'alpha'\nset ylabel 'f(alpha)'\n"
        << "plot " << data << " using 1:2 with linespoints title 'f(alpha)'\n";
      break;
    case PlotKind::spectrum:
      s << "set xlabel 'n'\nset ylabel 'E_n'\n"
        << "plot " << data << " using 2:3 with points pointtype 7 title 'E_n'\n";
      break;
    case PlotKind::ground_state:
      s << "set xlabel 'x'\nset ylabel 'v_0'\n"
        << "plot " << data << " using 1:2 with lines title 'grid ground state'";
      if (header.find("cosine") != std::string::npos) {
        s << ", \\\n     " << data << " using 1:3 with lines dashtype 2 title 'cosine ansatz'";
      }
      s << '\n';
      break;
    case PlotKind::convergence:
      s << "set xlabel 'h'\nset ylabel 'E_0'\nset logscale x\n"
        << "plot " << data << " using 3:4 with linespoints title 'E_0'\n";
      break;
    case PlotKind::riesz:
      s << "set xlabel 'x'\nset ylabel 'Riesz derivative'\n"
        << "plot " << data << " using 1:2 with lines title 'Re', \\\n     " << data
        << " using 1:3 with lines title 'Im'\n";
      break;
  }
  fs::path script = table;
  script.replace_extension(".gp");
  write_atomic(script, s.str());
  return script;
}

std::string usage() {
  std::string text = "usage: fracq <command> [options]\n\ncommands:\n";
  text +=
      "  audit-well     audit the cosine ansatz of the fractional infinite well over an alpha grid\n"
      "  f-alpha        boundary integral f(alpha) and its derivative\n"
      "  riesz-apply    Riesz derivative of the cosine ansatz on a periodic grid\n"
      "  airy-spectrum  exact alpha = 1 oscillator levels from Airy zeros\n"
      "  wkb            WKB oscillator levels (--method wkb or wkb_numeric)\n"
      "  shoot          oscillator levels by momentum-space shooting\n"
      "  solve-grid     eigenpairs of the discretized fractional Hamiltonian\n"
      "  converge       ground-energy convergence study of the grid solver\n"
      "\nrun 'fracq <command> --help' for the options of a command\n";
  return text;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty() || std::find(kCommands.begin(), kCommands.end(), args.front()) == kCommands.end()) {
    const bool help = !args.empty() && (args.front() == "--help" || args.front() == "-h");
    if (!help) {
      if (!args.empty()) err << "unknown command '" << args.front() << "'\n\n";
      err << usage();
      return kExitUsage;
    }
    out << usage();
    return kExitOk;
  }

  Options o;
  o.threads = default_threads();
  CLI::App app{"Fractional quantum mechanics toolkit", "fracq"};
  app.require_subcommand(1);

  auto* audit = app.add_subcommand("audit-well", "audit the cosine ansatz of the fractional infinite well");
  add_params(audit, o, false);
  add_tol(audit, o, "quadrature tolerance");
  audit->add_option("--alpha-grid", o.alpha_grid, "comma-separated alpha values")->delimiter(',');
  audit->add_option("--audit-tol", o.audit_tol, "pass/fail threshold on |f|")->check(CLI::PositiveNumber);

  auto* falpha = app.add_subcommand("f-alpha", "boundary integral f(alpha) and df/dalpha");
  add_params(falpha, o, true);
  add_tol(falpha, o, "quadrature tolerance");
  falpha->add_option("--alpha-grid", o.alpha_grid, "comma-separated alpha values")->delimiter(',');

  auto* riesz = app.add_subcommand("riesz-apply", "Riesz derivative of the cosine ansatz");
  add_params(riesz, o, true);
  riesz->add_option("--points", o.points, "grid points (even)")->check(CLI::PositiveNumber)->capture_default_str();
  riesz->add_option("--domain", o.domain, "grid half-width (default 4a)")->check(CLI::PositiveNumber);
  riesz->add_option("--method", o.method, "symbol: spectral or lattice")->check(CLI::IsMember({"spectral", "lattice"}));

  auto* airy = app.add_subcommand("airy-spectrum", "exact alpha = 1 oscillator levels");
  add_params(airy, o, true);
  add_levels(airy, o);

  auto* wkb = app.add_subcommand("wkb", "WKB oscillator levels");
  add_params(wkb, o, true);
  add_levels(wkb, o);
  wkb->add_option("--method", o.method, "wkb (closed form) or wkb_numeric")
      ->check(CLI::IsMember({"wkb", "wkb_numeric", "wkb-numeric"}));

  auto* shoot = app.add_subcommand("shoot", "oscillator levels by shooting");
  add_params(shoot, o, true);
  add_levels(shoot, o);
  add_tol(shoot, o, "relative energy tolerance");
  shoot->add_option("--steps", o.steps, "integration steps")->check(CLI::Range(100, 100000000))->capture_default_str();
  shoot->add_option("--cutoff", o.cutoff, "momentum cutoff (default automatic)")->check(CLI::PositiveNumber);

  auto* solve = app.add_subcommand("solve-grid", "eigenpairs of the discretized Hamiltonian");
  add_params(solve, o, true);
  add_levels(solve, o);
  add_grid(solve, o);
  solve->add_option("--n-interior", o.n_interior, "interior grid points")->capture_default_str();
  solve->add_option("--padding", o.padding, "padded domain factor")->capture_default_str();
  solve->add_option("--dump-matrix", o.dump_matrix, "write the Hamiltonian as CSV to this path");

  auto* converge = app.add_subcommand("converge", "grid-solver convergence study");
  add_params(converge, o, true);
  add_grid(converge, o);
  converge->add_option("--n-interior", o.resolutions, "comma-separated resolutions")->delimiter(',');
  converge->add_option("--padding", o.paddings, "comma-separated padding factors")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.get_subcommands().front()->help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }

  // Spectrum tolerance defaults to the shooting default rather than the quadrature one.
  const bool tol_given = (shoot->count("--tol") > 0);
  try {
    Output output(o, out);
    const std::string& cmd = args.front();
    if (cmd == "f-alpha") return run_f_alpha(o, output, out);
    if (cmd == "audit-well") return run_audit_well(o, output, out);
    if (cmd == "riesz-apply") return run_riesz_apply(o, output, out);
    if (cmd == "airy-spectrum") return emit_spectrum(airy_spectrum(o.levels, o.params), output, out);
    if (cmd == "wkb") {
      const bool numeric = o.method == "wkb_numeric" || o.method == "wkb-numeric";
      return emit_spectrum(wkb_spectrum(o.levels, o.params, numeric), output, out);
    }
    if (cmd == "shoot") {
      ShootingOptions s;
      s.steps = o.steps;
      s.cutoff = o.cutoff;
      if (tol_given) s.rel_tol = o.tol;
      s.threads = o.threads;
      return emit_spectrum(shoot_spectrum(o.levels, o.params, o.params.alpha, s), output, out);
    }
    if (cmd == "solve-grid") return run_solve_grid(o, output, out);
    return run_converge(o, output, out);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNoConvergence;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
}

}  // namespace fracq::cli
