// ============================================================================
// latenergy_cli.cpp -- command-line front end for the lattice-energy toolkit
//
// Subcommands:
//   energy theta zeta shells eutaxy critical hessian threshold
//   sweep2d sweep3d transitions global-opt classify
//
// Exit codes: 0 success, 1 invalid input, 2 numerical/resource failure.
// Structured output (--out) is CSV or JSON with fixed column order and
// "%.15g" numerics; reruns with identical arguments are byte-identical.
// ============================================================================

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "latenergy/common.hpp"
#include "latenergy/emit.hpp"
#include "latenergy/family.hpp"
#include "latenergy/lattice.hpp"
#include "latenergy/potential.hpp"
#include "latenergy/structure.hpp"
#include "latenergy/sweep.hpp"
#include "latenergy/threshold.hpp"

namespace {

using namespace laten;

constexpr double kPi = 3.14159265358979323846;

std::string lowercase(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse number '" + tok + "'");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

CanonicalLattice parse_lattice_name(const std::string& name) {
  const std::string s = lowercase(name);
  if (s == "z1" || s == "sc1") return CanonicalLattice::SC1;
  if (s == "z2" || s == "sc2" || s == "square") return CanonicalLattice::SC2;
  if (s == "a2" || s == "tri" || s == "triangular" || s == "hex" ||
      s == "hexagonal") {
    return CanonicalLattice::A2;
  }
  if (s == "z3" || s == "sc3" || s == "sc" || s == "cubic") return CanonicalLattice::SC3;
  if (s == "d3" || s == "fcc") return CanonicalLattice::D3;
  if (s == "d3star" || s == "d3*" || s == "bcc") return CanonicalLattice::D3star;
  throw std::invalid_argument(
      "unknown lattice '" + name +
      "' (use Z1, Z2, A2, Z3, D3 or D3star; aliases square/tri/sc/fcc/bcc)");
}

int lattice_dim(CanonicalLattice which) {
  switch (which) {
    case CanonicalLattice::SC1:
      return 1;
    case CanonicalLattice::SC2:
    case CanonicalLattice::A2:
      return 2;
    default:
      return 3;
  }
}

PotentialSpec parse_potential(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string head = lowercase(text.substr(0, colon));
  std::vector<double> args;
  if (colon != std::string::npos) args = parse_doubles(text.substr(colon + 1));
  if (head == "lj") {
    if (args.empty()) return LennardJones{};
    if (args.size() != 4) {
      throw std::invalid_argument("lj potential takes lj:p,q,a,b");
    }
    return LennardJones{args[0], args[1], args[2], args[3]};
  }
  if (head == "gauss" || head == "gaussian") {
    if (args.size() != 1) {
      throw std::invalid_argument("gauss potential takes gauss:alpha");
    }
    return Gaussian{args[0]};
  }
  if (head == "power") {
    if (args.size() != 1) {
      throw std::invalid_argument("power potential takes power:s");
    }
    return InversePower{args[0]};
  }
  throw std::invalid_argument("unknown potential '" + text +
                              "' (use lj:p,q,a,b | gauss:alpha | power:s)");
}

LambdaGrid parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const std::size_t colon = text.find(':', pos);
    parts.push_back(text.substr(
        pos, colon == std::string::npos ? std::string::npos : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() == 1) {
    const double v = parse_doubles(parts[0]).at(0);
    return LambdaGrid{v, v, 1.0};
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("lambda grid takes start:end:step");
  }
  return LambdaGrid{parse_doubles(parts[0]).at(0), parse_doubles(parts[1]).at(0),
                    parse_doubles(parts[2]).at(0)};
}

// ---------------------------------------------------------------------------
// Target selection: a canonical lattice by name, a planar family angle t, or
// 3D off-diagonal Gram coordinates.
// ---------------------------------------------------------------------------
struct TargetOpts {
  std::string lattice_name;
  double lambda = 1.0;
  double t = std::numeric_limits<double>::quiet_NaN();
  std::string x_text;
};

struct Target {
  Lattice L;
  int dim = 0;
  std::optional<CanonicalLattice> canonical_id;
  std::optional<double> t;
  std::optional<Eigen::Vector3d> x;
  std::string description;
};

void add_target_options(CLI::App* cmd, TargetOpts& o, bool with_lambda = true) {
  cmd->add_option("--lattice", o.lattice_name,
                  "Canonical lattice: Z1, Z2, A2, Z3, D3, D3star "
                  "(aliases square/tri/sc/fcc/bcc)");
  cmd->add_option("--t", o.t,
                  "Planar family angle t in [pi/3, pi/2] between the two unit "
                  "generators");
  cmd->add_option("--x", o.x_text,
                  "3D family point as off-diagonal Gram coordinates x1,x2,x3");
  if (with_lambda) {
    cmd->add_option("--lambda", o.lambda, "Uniform scale (minimal distance)")
        ->capture_default_str();
  }
}

Target resolve_target(const TargetOpts& o) {
  if (!(o.lambda > 0.0)) {
    throw std::invalid_argument("--lambda must be positive");
  }
  if (!o.x_text.empty()) {
    const std::vector<double> v = parse_doubles(o.x_text);
    if (v.size() != 3) {
      throw std::invalid_argument("--x takes three comma-separated coordinates");
    }
    const Eigen::Vector3d x(v[0], v[1], v[2]);
    return Target{lattice_3d_coords(x, o.lambda), 3, std::nullopt, std::nullopt,
                  x,
                  "family point x = (" + format_double(x[0]) + ", " +
                      format_double(x[1]) + ", " + format_double(x[2]) + ")"};
  }
  if (!std::isnan(o.t)) {
    return Target{lattice_2d(FamilyPoint2D{o.t}, o.lambda), 2, std::nullopt,
                  o.t, std::nullopt,
                  "family point t = " + format_double(o.t)};
  }
  if (!o.lattice_name.empty()) {
    const CanonicalLattice which = parse_lattice_name(o.lattice_name);
    return Target{canonical(which, o.lambda), lattice_dim(which), which,
                  std::nullopt, std::nullopt, o.lattice_name};
  }
  throw std::invalid_argument("select a target with --lattice, --t or --x");
}

// Bond constraint for criticality / Hessian checks: the canonical bond set
// when the target is canonical, otherwise the minimal shell of the lattice.
BondConstraint target_bonds(const Target& tgt, const SumOptions& opts) {
  if (tgt.canonical_id) {
    double lambda = std::sqrt(minimal_vectors(tgt.L, opts).r2);
    return canonical_bonds(*tgt.canonical_id, lambda);
  }
  const Shell shell = minimal_vectors(tgt.L, opts);
  return BondConstraint{shell.vectors, std::sqrt(shell.r2)};
}

// ---------------------------------------------------------------------------
// Output plumbing.
// ---------------------------------------------------------------------------
struct CommonOpts {
  std::string format = "csv";
  std::string out_path;
  std::string svg_path;
  std::uint64_t seed = 0;
  double tol = 1e-10;
  long long budget = 10'000'000;
  int threads = 0;
};

void add_output_options(CLI::App* cmd, CommonOpts& c, bool with_svg = false) {
  cmd->add_option("--format", c.format, "Structured output format: csv or json")
      ->capture_default_str();
  cmd->add_option("--out", c.out_path, "Write the structured result here");
  if (with_svg) {
    cmd->add_option("--svg", c.svg_path, "Write a minimal static line chart here");
  }
}

void add_sum_options(CLI::App* cmd, CommonOpts& c, double default_tol,
                     const std::string& tol_help) {
  c.tol = default_tol;
  cmd->add_option("--tol", c.tol, tol_help)->capture_default_str();
  cmd->add_option("--budget", c.budget,
                  "Maximum number of lattice vectors per enumeration")
      ->capture_default_str();
}

std::string normalize_format(const std::string& f) {
  const std::string s = lowercase(f);
  if (s.empty()) return "csv";
  if (s != "csv" && s != "json") {
    throw std::invalid_argument("--format must be 'csv' or 'json'");
  }
  return s;
}

void write_output(const CommonOpts& c, const Table& table,
                  const std::string& command,
                  std::map<std::string, double> tolerances) {
  if (c.out_path.empty()) return;
  const std::string fmt = normalize_format(c.format);
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw IoError("cannot open output path '" + c.out_path + "'");
  if (fmt == "csv") {
    emit_csv(table, f);
  } else {
    emit_json(table, RunMeta{command, c.seed, std::move(tolerances)}, f);
  }
  f.flush();
  if (!f) throw IoError("failed writing output path '" + c.out_path + "'");
  std::cout << "wrote " << c.out_path << "\n";
}

void write_svg_file(const std::string& path, const std::vector<SvgSeries>& series,
                    const std::string& xl, const std::string& yl) {
  if (path.empty()) return;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open output path '" + path + "'");
  emit_svg(series, xl, yl, f);
  f.flush();
  if (!f) throw IoError("failed writing output path '" + path + "'");
  std::cout << "wrote " << path << "\n";
}

std::string join_argv(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

long long bool_cell(bool b) { return b ? 1 : 0; }

std::string phase_runs_summary(const std::vector<PhasePoint>& sweep) {
  std::string s;
  std::size_t i = 0;
  while (i < sweep.size()) {
    std::size_t j = i;
    while (j + 1 < sweep.size() && sweep[j + 1].label == sweep[i].label) ++j;
    s += "  [" + format_double(sweep[i].lambda) + ", " +
         format_double(sweep[j].lambda) + "]  " + phase_name(sweep[i].label) +
         "\n";
    i = j + 1;
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lattice-energy analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  const std::string command = join_argv(argc, argv);

  // --- energy ---------------------------------------------------------------
  auto* c_energy = app.add_subcommand(
      "energy", "Interaction energy per point of a lattice");
  TargetOpts energy_target;
  CommonOpts energy_common;
  std::string energy_pot;
  int energy_scan = 0;
  add_target_options(c_energy, energy_target);
  c_energy->add_option("--potential", energy_pot,
                       "Potential: lj:p,q,a,b | gauss:alpha | power:s")
      ->required();
  c_energy->add_option("--scan", energy_scan,
                       "Tabulate the planar family energy over t with this "
                       "many points instead of a single target")
      ->capture_default_str();
  add_sum_options(c_energy, energy_common, 1e-10,
                  "Bound on the truncation error of every lattice sum");
  add_output_options(c_energy, energy_common, /*with_svg=*/true);
  c_energy->callback([&] {
    const std::string fmt = normalize_format(energy_common.format);
    (void)fmt;
    const PotentialSpec pot = parse_potential(energy_pot);
    const SumOptions opts{energy_common.tol, energy_common.budget};
    Table table;
    if (energy_scan > 0) {
      if (!energy_target.x_text.empty() || !energy_target.lattice_name.empty()) {
        throw std::invalid_argument(
            "--scan sweeps the planar family; it takes only --lambda");
      }
      validate_potential(pot, 2);
      table.columns = {"t", "energy"};
      SvgSeries series{"energy", {}, {}};
      double best_e = std::numeric_limits<double>::infinity();
      double best_t = 0.0;
      for (int i = 0; i < energy_scan; ++i) {
        const double t =
            kPi / 3.0 + (kPi / 2.0 - kPi / 3.0) *
                            (energy_scan == 1 ? 0.0
                                              : static_cast<double>(i) /
                                                    (energy_scan - 1));
        const double e =
            family_energy_2d(FamilyPoint2D{t}, energy_target.lambda, pot, opts);
        table.add_row({t, e});
        series.x.push_back(t);
        series.y.push_back(e);
        if (e < best_e) {
          best_e = e;
          best_t = t;
        }
      }
      std::cout << "planar family scan at lambda = "
                << format_double(energy_target.lambda) << ": " << energy_scan
                << " points, minimum E = " << format_double(best_e)
                << " at t = " << format_double(best_t) << "\n";
      write_svg_file(energy_common.svg_path, {series}, "t", "energy");
    } else {
      const Target tgt = resolve_target(energy_target);
      validate_potential(pot, tgt.dim);
      const EnergyResult r = energy(tgt.L, pot, opts);
      table.columns = {"lambda", "value", "tail_bound", "r2_cutoff"};
      table.add_row({energy_target.lambda, r.value, r.tail_bound, r.r2_cutoff});
      std::cout << "E[" << tgt.description << "] = " << format_double(r.value)
                << "   (truncation <= " << format_double(r.tail_bound)
                << ", cutoff Q <= " << format_double(r.r2_cutoff) << ")\n";
    }
    write_output(energy_common, table, command, {{"tol", energy_common.tol}});
  });

  // --- theta ------------------------------------------------------------------
  auto* c_theta = app.add_subcommand(
      "theta", "Gaussian (theta) lattice sum, origin term included");
  TargetOpts theta_target;
  CommonOpts theta_common;
  double theta_alpha = 1.0;
  add_target_options(c_theta, theta_target);
  c_theta->add_option("--alpha", theta_alpha, "Gaussian width parameter (> 0)")
      ->capture_default_str();
  add_sum_options(c_theta, theta_common, 1e-10,
                  "Bound on the truncation error of the sum");
  add_output_options(c_theta, theta_common);
  c_theta->callback([&] {
    (void)normalize_format(theta_common.format);
    const Target tgt = resolve_target(theta_target);
    const SumOptions opts{theta_common.tol, theta_common.budget};
    const EnergyResult r = theta(tgt.L, theta_alpha, opts);
    Table table;
    table.columns = {"alpha", "value", "tail_bound", "r2_cutoff"};
    table.add_row({theta_alpha, r.value, r.tail_bound, r.r2_cutoff});
    std::cout << "theta[" << tgt.description << "](" << format_double(theta_alpha)
              << ") = " << format_double(r.value) << "   (truncation <= "
              << format_double(r.tail_bound) << ")\n";
    write_output(theta_common, table, command, {{"tol", theta_common.tol}});
  });

  // --- zeta -------------------------------------------------------------------
  auto* c_zeta = app.add_subcommand(
      "zeta", "Epstein zeta function of a lattice at s > dim");
  TargetOpts zeta_target;
  CommonOpts zeta_common;
  double zeta_s = 4.0;
  std::string zeta_method = "split";
  add_target_options(c_zeta, zeta_target);
  c_zeta->add_option("--s", zeta_s, "Exponent s (must exceed the dimension)")
      ->capture_default_str();
  c_zeta
      ->add_option("--method", zeta_method,
                   "Evaluation path: split (incomplete-gamma modular split) or "
                   "direct (serial shell sum)")
      ->capture_default_str();
  add_sum_options(c_zeta, zeta_common, 1e-10,
                  "Bound on the truncation error of the sum");
  add_output_options(c_zeta, zeta_common);
  c_zeta->callback([&] {
    (void)normalize_format(zeta_common.format);
    const std::string method = lowercase(zeta_method);
    if (method != "split" && method != "direct") {
      throw std::invalid_argument("--method must be 'split' or 'direct'");
    }
    const Target tgt = resolve_target(zeta_target);
    const SumOptions opts{zeta_common.tol, zeta_common.budget};
    const EnergyResult r = method == "split" ? epstein_zeta(tgt.L, zeta_s, opts)
                                             : epstein_zeta_direct(tgt.L, zeta_s, opts);
    Table table;
    table.columns = {"s", "value", "tail_bound", "r2_cutoff"};
    table.add_row({zeta_s, r.value, r.tail_bound, r.r2_cutoff});
    std::cout << "zeta[" << tgt.description << "](" << format_double(zeta_s)
              << ") = " << format_double(r.value) << "   (truncation <= "
              << format_double(r.tail_bound) << ", method " << method << ")\n";
    write_output(zeta_common, table, command, {{"tol", zeta_common.tol}});
  });

  // --- shells -----------------------------------------------------------------
  auto* c_shells = app.add_subcommand(
      "shells", "Shell decomposition up to a squared-length cutoff");
  TargetOpts shells_target;
  CommonOpts shells_common;
  double shells_r2 = 4.0;
  add_target_options(c_shells, shells_target);
  c_shells->add_option("--r2", shells_r2, "Squared-length cutoff")
      ->capture_default_str();
  add_sum_options(c_shells, shells_common, 1e-10, "(unused; kept for symmetry)");
  add_output_options(c_shells, shells_common);
  c_shells->callback([&] {
    (void)normalize_format(shells_common.format);
    const Target tgt = resolve_target(shells_target);
    const SumOptions opts{shells_common.tol, shells_common.budget};
    const ShellDecomposition dec = shells(tgt.L, shells_r2, opts);
    Table table;
    table.columns = {"shell", "r2", "count"};
    std::cout << "shells of " << tgt.description << " with Q <= "
              << format_double(shells_r2) << ": " << dec.shells.size() << "\n";
    for (std::size_t i = 0; i < dec.shells.size(); ++i) {
      const Shell& s = dec.shells[i];
      table.add_row({static_cast<long long>(i + 1), s.r2,
                     static_cast<long long>(s.count())});
      std::cout << "  shell " << (i + 1) << ": r2 = " << format_double(s.r2)
                << ", count " << s.count() << "\n";
    }
    write_output(shells_common, table, command, {{"tol", shells_common.tol}});
  });

  // --- eutaxy -----------------------------------------------------------------
  auto* c_eutaxy = app.add_subcommand(
      "eutaxy",
      "Strong eutaxy check: every shell's second moment proportional to the "
      "inverse Gram matrix");
  TargetOpts eutaxy_target;
  CommonOpts eutaxy_common;
  int eutaxy_shells = 6;
  double eutaxy_tol = 1e-8;
  add_target_options(c_eutaxy, eutaxy_target);
  c_eutaxy->add_option("--shells", eutaxy_shells, "Number of shells to check")
      ->capture_default_str();
  c_eutaxy
      ->add_option("--tol", eutaxy_tol,
                   "Relative tolerance of the proportionality fit")
      ->capture_default_str();
  c_eutaxy->add_option("--budget", eutaxy_common.budget,
                       "Maximum number of lattice vectors per enumeration")
      ->capture_default_str();
  add_output_options(c_eutaxy, eutaxy_common);
  c_eutaxy->callback([&] {
    (void)normalize_format(eutaxy_common.format);
    const Target tgt = resolve_target(eutaxy_target);
    const SumOptions opts{1e-10, eutaxy_common.budget};
    const EutaxyReport rep =
        check_strong_eutaxy(tgt.L, eutaxy_shells, eutaxy_tol, opts);
    Table table;
    table.columns = {"shell", "r2", "count", "rho", "deviation"};
    for (const ShellMoment& m : rep.moments) {
      table.add_row({static_cast<long long>(m.shell_index), m.r2,
                     static_cast<long long>(m.count),
                     m.rho ? Cell{*m.rho} : Cell{std::string{}}, m.deviation});
    }
    std::cout << tgt.description << " strongly eutactic over "
              << rep.shells_checked
              << " shells: " << (rep.is_strongly_eutactic ? "yes" : "no")
              << "   (max deviation " << format_double(rep.max_deviation)
              << ")\n";
    write_output(eutaxy_common, table, command, {{"tol", eutaxy_tol}});
  });

  // --- critical ---------------------------------------------------------------
  auto* c_critical = app.add_subcommand(
      "critical",
      "Criticality of the Gaussian energy among lattices sharing the bond set");
  TargetOpts critical_target;
  CommonOpts critical_common;
  double critical_alpha = 1.0;
  double critical_tol = 1e-8;
  add_target_options(c_critical, critical_target);
  c_critical->add_option("--alpha", critical_alpha, "Gaussian width parameter")
      ->capture_default_str();
  c_critical->add_option("--tol", critical_tol, "Residual threshold")
      ->capture_default_str();
  c_critical->add_option("--budget", critical_common.budget,
                         "Maximum number of lattice vectors per enumeration")
      ->capture_default_str();
  add_output_options(c_critical, critical_common);
  c_critical->callback([&] {
    (void)normalize_format(critical_common.format);
    const Target tgt = resolve_target(critical_target);
    const SumOptions opts{1e-10, critical_common.budget};
    const BondConstraint bonds = target_bonds(tgt, opts);
    const CriticalityReport rep =
        check_critical_point(tgt.L, bonds, critical_alpha, critical_tol, opts);
    Table table;
    table.columns = {"alpha", "residual", "critical"};
    table.add_row({critical_alpha, rep.residual, bool_cell(rep.critical)});
    std::cout << tgt.description << " critical at alpha = "
              << format_double(critical_alpha) << ": "
              << (rep.critical ? "yes" : "no") << "   (residual "
              << format_double(rep.residual) << ")\n";
    write_output(critical_common, table, command, {{"tol", critical_tol}});
  });

  // --- hessian ----------------------------------------------------------------
  auto* c_hessian = app.add_subcommand(
      "hessian",
      "Positive definiteness of the Gaussian-energy Hessian on the "
      "bond-constrained tangent space");
  TargetOpts hessian_target;
  CommonOpts hessian_common;
  double hessian_alpha = 1.0;
  double hessian_tol = 1e-10;
  int hessian_probes = 50;
  add_target_options(c_hessian, hessian_target);
  c_hessian->add_option("--alpha", hessian_alpha, "Gaussian width parameter")
      ->capture_default_str();
  c_hessian->add_option("--probes", hessian_probes,
                        "Random tangent directions probed in addition to the "
                        "exact spectrum")
      ->capture_default_str();
  c_hessian->add_option("--seed", hessian_common.seed, "Probe RNG seed")
      ->capture_default_str();
  c_hessian->add_option("--tol", hessian_tol, "Eigenvalue positivity margin")
      ->capture_default_str();
  c_hessian->add_option("--budget", hessian_common.budget,
                        "Maximum number of lattice vectors per enumeration")
      ->capture_default_str();
  add_output_options(c_hessian, hessian_common);
  c_hessian->callback([&] {
    (void)normalize_format(hessian_common.format);
    const Target tgt = resolve_target(hessian_target);
    const SumOptions opts{1e-10, hessian_common.budget};
    const BondConstraint bonds = target_bonds(tgt, opts);
    const HessianReport rep = constrained_theta_hessian_pd(
        tgt.L, bonds, hessian_alpha, hessian_probes, hessian_common.seed,
        hessian_tol, opts);
    Table table;
    table.columns = {"alpha", "min_eigenvalue", "min_probe_value", "tangent_dim",
                     "positive_definite"};
    table.add_row({hessian_alpha, rep.min_eigenvalue, rep.min_probe_value,
                   static_cast<long long>(rep.tangent_dim),
                   bool_cell(rep.positive_definite)});
    std::cout << tgt.description << " constrained Hessian at alpha = "
              << format_double(hessian_alpha) << ": min eigenvalue "
              << format_double(rep.min_eigenvalue) << " over tangent dimension "
              << rep.tangent_dim << " -> "
              << (rep.positive_definite ? "positive definite" : "NOT positive definite")
              << "\n";
    write_output(hessian_common, table, command, {{"tol", hessian_tol}});
  });

  // --- threshold ----------------------------------------------------------------
  auto* c_threshold = app.add_subcommand(
      "threshold",
      "Optimality threshold in the scale parameter for a reference lattice "
      "under a Lennard-Jones-type potential");
  CommonOpts threshold_common;
  std::string threshold_lattice;
  std::string threshold_mode = "auto";
  std::string threshold_pot;
  double th_p = 6.0, th_q = 3.0, th_a = 1.0, th_b = 2.0;
  double threshold_tol = 1e-6;
  c_threshold->add_option("--lattice", threshold_lattice,
                          "Reference lattice: Z2, A2, Z3, D3 or D3star")
      ->required();
  c_threshold
      ->add_option("--mode", threshold_mode,
                   "lambda0 (optimal below), lambda1 (optimal above) or auto "
                   "(by reference: Z2/Z3/D3star -> lambda0, A2/D3 -> lambda1)")
      ->capture_default_str();
  c_threshold->add_option("--p", th_p, "Repulsive exponent")->capture_default_str();
  c_threshold->add_option("--q", th_q, "Attractive exponent")->capture_default_str();
  c_threshold->add_option("--a", th_a, "Repulsive coefficient")->capture_default_str();
  c_threshold->add_option("--b", th_b, "Attractive coefficient")->capture_default_str();
  c_threshold->add_option("--potential", threshold_pot,
                          "Alternative to --p/--q/--a/--b: lj:p,q,a,b");
  c_threshold->add_option("--tol", threshold_tol,
                          "Target half-width of the threshold bracket")
      ->capture_default_str();
  c_threshold->add_option("--budget", threshold_common.budget,
                          "Maximum number of lattice vectors per enumeration")
      ->capture_default_str();
  add_output_options(c_threshold, threshold_common);
  c_threshold->callback([&] {
    (void)normalize_format(threshold_common.format);
    ThresholdQuery query;
    query.reference = parse_lattice_name(threshold_lattice);
    if (!threshold_pot.empty()) {
      const PotentialSpec p = parse_potential(threshold_pot);
      if (!std::holds_alternative<LennardJones>(p)) {
        throw std::invalid_argument("threshold requires an lj potential");
      }
      query.pot = std::get<LennardJones>(p);
    } else {
      query.pot = LennardJones{th_p, th_q, th_a, th_b};
    }
    const std::string mode = lowercase(threshold_mode);
    if (mode == "lambda0") {
      query.mode = ThresholdMode::Lambda0;
    } else if (mode == "lambda1") {
      query.mode = ThresholdMode::Lambda1;
    } else if (mode == "auto") {
      query.mode = (query.reference == CanonicalLattice::A2 ||
                    query.reference == CanonicalLattice::D3)
                       ? ThresholdMode::Lambda1
                       : ThresholdMode::Lambda0;
    } else {
      throw std::invalid_argument("--mode must be lambda0, lambda1 or auto");
    }
    query.tol = threshold_tol;
    const SumOptions opts{1e-10, threshold_common.budget};
    const ThresholdResult r = solve_threshold(query, opts);
    const char* mode_name =
        query.mode == ThresholdMode::Lambda0 ? "lambda0" : "lambda1";
    std::string argmin;
    for (int i = 0; i < r.argmin.size(); ++i) {
      if (i) argmin += ';';
      argmin += format_double(r.argmin[i]);
    }
    Table table;
    table.columns = {"mode",       "reference", "lambda_star",
                     "bracket_lo", "bracket_hi", "attained_at_reference",
                     "argmin"};
    table.add_row({std::string(mode_name), threshold_lattice, r.lambda_star,
                   r.bracket[0], r.bracket[1],
                   bool_cell(r.attained_at_reference), argmin});
    std::cout << mode_name << "(" << threshold_lattice
              << ") = " << format_double(r.lambda_star) << "   (bracket ["
              << format_double(r.bracket[0]) << ", "
              << format_double(r.bracket[1]) << "])\n"
              << "tight family competitor at "
              << (r.argmin.size() == 1 ? "t = " : "x = ") << argmin
              << (r.attained_at_reference
                      ? " (limit toward the reference point)"
                      : "")
              << "\n";
    write_output(threshold_common, table, command, {{"tol", threshold_tol}});
  });

  // --- sweep2d / sweep3d --------------------------------------------------------
  auto* c_sweep2d = app.add_subcommand(
      "sweep2d", "Minimize over the planar family on a grid of scales");
  auto* c_sweep3d = app.add_subcommand(
      "sweep3d", "Minimize over the 3D family on a grid of scales");
  CommonOpts sweep2d_common, sweep3d_common;
  std::string sweep2d_pot, sweep3d_pot;
  std::string sweep2d_grid = "0.6:1.2:0.005", sweep3d_grid = "0.6:1.2:0.005";
  MinimizeOptions sweep2d_mopts, sweep3d_mopts;
  for (auto [cmd, common, pot, grid, mopts] :
       {std::tuple{c_sweep2d, &sweep2d_common, &sweep2d_pot, &sweep2d_grid,
                   &sweep2d_mopts},
        std::tuple{c_sweep3d, &sweep3d_common, &sweep3d_pot, &sweep3d_grid,
                   &sweep3d_mopts}}) {
    cmd->add_option("--potential", *pot,
                    "Potential: lj:p,q,a,b | gauss:alpha | power:s")
        ->required();
    cmd->add_option("--lambda", *grid, "Scale grid start:end:step")
        ->capture_default_str();
    cmd->add_option("--threads", common->threads,
                    "Worker threads (0 = available parallelism; the "
                    "LATTICE_THREADS environment variable overrides)")
        ->capture_default_str();
    cmd->add_option("--seed", common->seed, "Master seed for the random starts")
        ->capture_default_str();
    cmd->add_option("--grad-tol", mopts->grad_tol,
                    "Stationarity threshold of the descent")
        ->capture_default_str();
    add_sum_options(cmd, *common, 1e-10,
                    "Bound on the truncation error of every lattice sum");
    add_output_options(cmd, *common, /*with_svg=*/true);
  }
  c_sweep2d->add_option("--grid-points", sweep2d_mopts.grid_points,
                        "Pre-scan resolution over the family angle")
      ->capture_default_str();
  c_sweep2d->add_option("--multistart", sweep2d_mopts.multistart,
                        "Refined starts kept from the pre-scan")
      ->capture_default_str();
  c_sweep3d->add_option("--random-seeds", sweep3d_mopts.random_seeds_3d,
                        "Random admissible starting points per scale")
      ->capture_default_str();

  const auto run_sweep_cmd = [&command](int dim, const CommonOpts& common,
                                        const std::string& pot_text,
                                        const std::string& grid_text,
                                        MinimizeOptions mopts) {
    (void)normalize_format(common.format);
    const PotentialSpec pot = parse_potential(pot_text);
    validate_potential(pot, dim);
    const LambdaGrid grid = parse_grid(grid_text);
    mopts.seed = common.seed;
    const SumOptions opts{common.tol, common.budget};
    const std::vector<PhasePoint> sweep =
        dim == 2 ? sweep_2d(grid, pot, common.threads, mopts, opts)
                 : sweep_3d(grid, pot, common.threads, mopts, opts);
    Table table;
    if (dim == 2) {
      table.columns = {"lambda", "t", "label", "energy"};
      for (const PhasePoint& p : sweep) {
        table.add_row({p.lambda, p.parameter[0], std::string(phase_name(p.label)),
                       p.energy});
      }
    } else {
      table.columns = {"lambda", "x1", "x2", "x3", "label", "energy"};
      for (const PhasePoint& p : sweep) {
        table.add_row({p.lambda, p.parameter[0], p.parameter[1], p.parameter[2],
                       std::string(phase_name(p.label)), p.energy});
      }
    }
    std::cout << sweep.size() << " scales, minimizing phase by range:\n"
              << phase_runs_summary(sweep);
    SvgSeries energy_series{"energy", {}, {}};
    SvgSeries label_series{"phase index", {}, {}};
    for (const PhasePoint& p : sweep) {
      energy_series.x.push_back(p.lambda);
      energy_series.y.push_back(p.energy);
      label_series.x.push_back(p.lambda);
      label_series.y.push_back(static_cast<double>(p.label));
    }
    write_svg_file(common.svg_path, {energy_series, label_series}, "lambda",
                   "energy / phase index");
    write_output(common, table, command, {{"tol", common.tol}});
  };
  c_sweep2d->callback([&] {
    run_sweep_cmd(2, sweep2d_common, sweep2d_pot, sweep2d_grid, sweep2d_mopts);
  });
  c_sweep3d->callback([&] {
    run_sweep_cmd(3, sweep3d_common, sweep3d_pot, sweep3d_grid, sweep3d_mopts);
  });

  // --- transitions ----------------------------------------------------------------
  auto* c_transitions = app.add_subcommand(
      "transitions", "Locate the phase boundaries of a scale sweep");
  CommonOpts transitions_common;
  std::string transitions_pot;
  std::string transitions_grid = "0.6:1.2:0.005";
  MinimizeOptions transitions_mopts;
  int transitions_dim = 2;
  double transitions_bracket_tol = 1e-4;
  c_transitions->add_option("--dim", transitions_dim, "Family dimension: 2 or 3")
      ->required();
  c_transitions->add_option("--potential", transitions_pot,
                            "Potential: lj:p,q,a,b | gauss:alpha | power:s")
      ->required();
  c_transitions->add_option("--lambda", transitions_grid,
                            "Scale grid start:end:step")
      ->capture_default_str();
  c_transitions->add_option("--bracket-tol", transitions_bracket_tol,
                            "Target width of each boundary bracket")
      ->capture_default_str();
  c_transitions->add_option("--threads", transitions_common.threads,
                            "Worker threads (0 = available parallelism)")
      ->capture_default_str();
  c_transitions->add_option("--seed", transitions_common.seed,
                            "Master seed for the random starts")
      ->capture_default_str();
  c_transitions->add_option("--random-seeds", transitions_mopts.random_seeds_3d,
                            "Random admissible starting points per scale (3D)")
      ->capture_default_str();
  add_sum_options(c_transitions, transitions_common, 1e-10,
                  "Bound on the truncation error of every lattice sum");
  add_output_options(c_transitions, transitions_common);
  c_transitions->callback([&] {
    (void)normalize_format(transitions_common.format);
    if (transitions_dim != 2 && transitions_dim != 3) {
      throw std::invalid_argument("--dim must be 2 or 3");
    }
    const PotentialSpec pot = parse_potential(transitions_pot);
    validate_potential(pot, transitions_dim);
    const LambdaGrid grid = parse_grid(transitions_grid);
    transitions_mopts.seed = transitions_common.seed;
    const SumOptions opts{transitions_common.tol, transitions_common.budget};
    const std::vector<PhasePoint> sweep =
        transitions_dim == 2
            ? sweep_2d(grid, pot, transitions_common.threads, transitions_mopts,
                       opts)
            : sweep_3d(grid, pot, transitions_common.threads, transitions_mopts,
                       opts);
    const TransitionReport rep =
        find_transitions(sweep, transitions_dim, pot, transitions_bracket_tol,
                         transitions_mopts, opts);
    Table table;
    table.columns = {"from", "to", "lambda_star", "bracket_lo", "bracket_hi"};
    std::cout << rep.transitions.size() << " phase boundaries"
              << (rep.monotone_phases ? "" : " (a phase recurs!)") << ":\n";
    for (const Transition& t : rep.transitions) {
      table.add_row({std::string(phase_name(t.from)), std::string(phase_name(t.to)),
                     t.lambda_star, t.bracket[0], t.bracket[1]});
      std::cout << "  " << phase_name(t.from) << " -> " << phase_name(t.to)
                << " at lambda = " << format_double(t.lambda_star) << "  ["
                << format_double(t.bracket[0]) << ", "
                << format_double(t.bracket[1]) << "]\n";
    }
    write_output(transitions_common, table, command,
                 {{"tol", transitions_common.tol},
                  {"bracket_tol", transitions_bracket_tol}});
  });

  // --- global-opt -----------------------------------------------------------------
  auto* c_global = app.add_subcommand(
      "global-opt", "Joint minimum over scale and family");
  CommonOpts global_common;
  std::string global_pot;
  MinimizeOptions global_mopts;
  int global_dim = 2;
  double global_lo = 0.6, global_hi = 1.2;
  c_global->add_option("--dim", global_dim, "Family dimension: 2 or 3")
      ->required();
  c_global->add_option("--potential", global_pot,
                       "Potential: lj:p,q,a,b | gauss:alpha | power:s")
      ->required();
  c_global->add_option("--lo", global_lo, "Lower end of the scale window")
      ->capture_default_str();
  c_global->add_option("--hi", global_hi, "Upper end of the scale window")
      ->capture_default_str();
  c_global->add_option("--seed", global_common.seed,
                       "Master seed for the random starts")
      ->capture_default_str();
  c_global->add_option("--random-seeds", global_mopts.random_seeds_3d,
                       "Random admissible starting points per scale (3D)")
      ->capture_default_str();
  add_sum_options(c_global, global_common, 1e-10,
                  "Bound on the truncation error of every lattice sum");
  add_output_options(c_global, global_common);
  c_global->callback([&] {
    (void)normalize_format(global_common.format);
    if (global_dim != 2 && global_dim != 3) {
      throw std::invalid_argument("--dim must be 2 or 3");
    }
    const PotentialSpec pot = parse_potential(global_pot);
    validate_potential(pot, global_dim);
    global_mopts.seed = global_common.seed;
    const SumOptions opts{global_common.tol, global_common.budget};
    const GlobalOptimum g =
        global_optimum(global_dim, global_lo, global_hi, pot, global_mopts, opts);
    std::string param;
    for (int i = 0; i < g.at.parameter.size(); ++i) {
      if (i) param += ';';
      param += format_double(g.at.parameter[i]);
    }
    Table table;
    table.columns = {"lambda_opt", "label", "parameter", "energy"};
    table.add_row({g.lambda_opt, std::string(phase_name(g.at.label)), param,
                   g.at.energy});
    std::cout << "global minimum at lambda = " << format_double(g.lambda_opt)
              << ": " << phase_name(g.at.label) << " ("
              << (global_dim == 2 ? "t = " : "x = ") << param
              << "), E = " << format_double(g.at.energy) << "\n";
    write_output(global_common, table, command, {{"tol", global_common.tol}});
  });

  // --- classify -------------------------------------------------------------------
  auto* c_classify = app.add_subcommand(
      "classify", "Phase label of a family point by its shell signature");
  TargetOpts classify_target;
  CommonOpts classify_common;
  double classify_tol = 1e-6;
  add_target_options(c_classify, classify_target, /*with_lambda=*/false);
  c_classify->add_option("--tol", classify_tol, "Signature matching tolerance")
      ->capture_default_str();
  add_output_options(c_classify, classify_common);
  c_classify->callback([&] {
    (void)normalize_format(classify_common.format);
    PhaseLabel label;
    std::string param;
    if (!classify_target.x_text.empty()) {
      const std::vector<double> v = parse_doubles(classify_target.x_text);
      if (v.size() != 3) {
        throw std::invalid_argument("--x takes three comma-separated coordinates");
      }
      const Eigen::Vector3d x(v[0], v[1], v[2]);
      label = classify_3d(x, classify_tol);
      param = format_double(x[0]) + ";" + format_double(x[1]) + ";" +
              format_double(x[2]);
    } else if (!std::isnan(classify_target.t)) {
      label = classify_2d(FamilyPoint2D{classify_target.t}, classify_tol);
      param = format_double(classify_target.t);
    } else if (!classify_target.lattice_name.empty()) {
      switch (parse_lattice_name(classify_target.lattice_name)) {
        case CanonicalLattice::SC2:
          label = classify_2d(square_point(), classify_tol);
          param = format_double(square_point().t);
          break;
        case CanonicalLattice::A2:
          label = classify_2d(triangular_point(), classify_tol);
          param = format_double(triangular_point().t);
          break;
        case CanonicalLattice::SC3:
          label = classify_3d(sc_coords(), classify_tol);
          param = "0;0;0";
          break;
        case CanonicalLattice::D3:
          label = classify_3d(fcc_coords(), classify_tol);
          param = "0.5;0.5;0.5";
          break;
        case CanonicalLattice::D3star:
          label = classify_3d(bcc_coords(), classify_tol);
          param = "-1/3;-1/3;-1/3";
          break;
        default:
          throw std::invalid_argument(
              "classification needs a 2D or 3D family point");
      }
    } else {
      throw std::invalid_argument("select a target with --lattice, --t or --x");
    }
    Table table;
    table.columns = {"parameter", "label"};
    table.add_row({param, std::string(phase_name(label))});
    std::cout << phase_name(label) << "\n";
    write_output(classify_common, table, command, {{"tol", classify_tol}});
  });

  // --- dispatch -------------------------------------------------------------------
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
