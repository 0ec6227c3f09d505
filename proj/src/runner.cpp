#include "micromorph/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "micromorph/error.hpp"

namespace micromorph {
namespace {

constexpr std::pair<Command, const char*> kCommands[] = {{Command::kCheckEl, "check-el"},
                                                         {Command::kCheckBalance, "check-balance"},
                                                         {Command::kIntegrals, "integrals"},
                                                         {Command::kConvergence, "convergence"}};
constexpr std::pair<Format, const char*> kFormats[] = {
    {Format::kTable, "table"}, {Format::kCsv, "csv"}, {Format::kJson, "json"}};

bool wants(const RunConfig& c, Command cmd) {
  return std::find(c.commands.begin(), c.commands.end(), cmd) != c.commands.end();
}

ReportRow at_most(std::string q, std::string c, double value, double tol) {
  return ReportRow{std::move(q), std::move(c), std::nullopt, std::nullopt, value, tol, ReportRow::Kind::kAtMost};
}

ReportRow at_least(std::string q, std::string c, double value, double tol) {
  return ReportRow{std::move(q), std::move(c), std::nullopt, std::nullopt, value, tol, ReportRow::Kind::kAtLeast};
}

ReportRow info(std::string q, std::string c, double value) {
  return ReportRow{std::move(q), std::move(c), std::nullopt, std::nullopt, value, 0.0, ReportRow::Kind::kInfo};
}

void integral_rows(std::vector<ReportRow>& rows, const char* name, const IntegralPair& p, double tol) {
  const double scale = std::max({1.0, max_abs(p.surface), max_abs(p.volume)});
  for (std::size_t k = 0; k < p.surface.size(); ++k) {
    ReportRow r = at_most(name, p.surface.rank() == 0 ? "-" : std::to_string(k),
                          std::abs(p.surface[k] - p.volume[k]) / scale, tol);
    r.surface = p.surface[k];
    r.volume = p.volume[k];
    rows.push_back(std::move(r));
  }
}

void conservation_rows(std::vector<ReportRow>& rows, const char* name, const IntegralPair& p, double tol) {
  for (std::size_t k = 0; k < p.surface.size(); ++k) {
    ReportRow r = at_most(name, p.surface.rank() == 0 ? "-" : std::to_string(k),
                          std::max(std::abs(p.surface[k]), std::abs(p.volume[k])), tol);
    r.surface = p.surface[k];
    r.volume = p.volume[k];
    rows.push_back(std::move(r));
  }
}

void refinement_rows(std::vector<ReportRow>& rows, const char* name, const Tensor& coarse, const Tensor& fine,
                     double tol) {
  const double scale = std::max({1.0, max_abs(coarse), max_abs(fine)});
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    ReportRow r = at_most(name, coarse.rank() == 0 ? "-" : std::to_string(k),
                          std::abs(fine[k] - coarse[k]) / scale, tol);
    r.surface = coarse[k];
    r.volume = fine[k];
    rows.push_back(std::move(r));
  }
}

std::string json_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string json_number(double v) { return std::isfinite(v) ? format_number(v) : "null"; }

const char* status(const ReportRow& r) {
  if (r.kind == ReportRow::Kind::kInfo) return "info";
  return r.pass() ? "pass" : "FAIL";
}

std::string short_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", v);
  return buf;
}

}  // namespace

const char* name_of(Command c) {
  for (const auto& [cmd, name] : kCommands) {
    if (cmd == c) return name;
  }
  return "?";
}

const char* name_of(Format f) {
  for (const auto& [fmt, name] : kFormats) {
    if (fmt == f) return name;
  }
  return "?";
}

std::optional<Command> parse_command(std::string_view text) {
  for (const auto& [cmd, name] : kCommands) {
    if (text == name) return cmd;
  }
  return std::nullopt;
}

std::optional<Format> parse_format(std::string_view text) {
  for (const auto& [fmt, name] : kFormats) {
    if (text == name) return fmt;
  }
  return std::nullopt;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool ReportRow::pass() const {
  switch (kind) {
    case Kind::kAtMost: return value <= tolerance;
    case Kind::kAtLeast: return value >= tolerance;
    case Kind::kInfo: return true;
  }
  return true;
}

bool Report::passed() const { return failures().empty(); }

std::vector<const ReportRow*> Report::failures() const {
  std::vector<const ReportRow*> out;
  for (const auto& r : rows) {
    if (!r.pass()) out.push_back(&r);
  }
  return out;
}

Report run_scenario(const Scenario& sc, const RunConfig& config) {
  QuadratureRule rule = sc.rule;
  if (config.surface_order) rule.surface_order = *config.surface_order;
  if (config.volume_order) rule.volume_order = *config.volume_order;
  EvalOptions opts = sc.options;
  opts.energy_without_sources = opts.energy_without_sources || config.energy_without_sources;
  const Tolerances& tol = sc.tolerances;

  Report rep;
  rep.scenario = sc.name;
  rep.description = sc.description;
  rep.seed = config.seed;
  rep.points = config.points;
  rep.surface_order = rule.surface_order;
  rep.volume_order = rule.volume_order;
  rep.geometry = describe(rule.geometry);
  rep.energy_without_sources = opts.energy_without_sources;
  if (sc.material.symmetrization_warning()) {
    rep.warnings.push_back("constitutive input was symmetrized; largest entry change " +
                           format_number(sc.material.symmetrization_change()));
  }

  const std::vector<Point> pts = sample_points(sc.fields.domain(), config.points, config.seed, 0.9);

  if (wants(config, Command::kCheckEl)) {
    std::vector<ElResidual> res(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) { res[k] = euler_lagrange_residual(sc.fields, sc.material, pts[k]); });
    double mom = 0.0, micro = 0.0;
    for (const auto& r : res) {
      mom = std::max(mom, max_abs(r.momentum));
      micro = std::max(micro, max_abs(r.micro));
    }
    rep.rows.push_back(at_most("el_residual", "momentum", mom, tol.el_residual));
    rep.rows.push_back(at_most("el_residual", "micro", micro, tol.el_residual));
  }

  if (wants(config, Command::kCheckBalance)) {
    std::vector<BalanceResiduals> exact(pts.size()), fd(pts.size());
    std::vector<double> bracket(pts.size());
    parallel_for(pts.size(), [&](std::size_t k) {
      exact[k] = balance_residuals(sc.fields, sc.material, pts[k], sc.dims, opts);
      fd[k] = balance_residuals_fd(sc.fields, sc.material, pts[k], sc.dims, opts);
      bracket[k] = max_abs(isotropy_bracket(sample_point(sc.fields, sc.material, pts[k], opts).state));
    });
    auto add = [&](const char* q, const std::vector<BalanceResiduals>& r, double t) {
      double mom = 0.0, ang = 0.0, scal = 0.0;
      for (const auto& b : r) {
        mom = std::max(mom, max_abs(b.momentum));
        ang = std::max(ang, max_abs(b.angular));
        scal = std::max(scal, std::abs(b.scaling));
      }
      rep.rows.push_back(at_most(q, "momentum", mom, t));
      rep.rows.push_back(at_most(q, "angular", ang, t));
      rep.rows.push_back(at_most(q, "scaling", scal, t));
    };
    add("balance_exact", exact, tol.balance_exact);
    add("balance_fd", fd, tol.balance_fd);
    std::size_t off = 0;
    for (const auto& b : exact) off += b.not_a_solution ? 1 : 0;
    if (off > 0) {
      rep.warnings.push_back(std::to_string(off) +
                             " sample points are not solutions of the field equations; balance laws need not hold");
    }
    double bmax = 0.0;
    for (double b : bracket) bmax = std::max(bmax, b);
    if (sc.expect.bracket_zero) {
      rep.rows.push_back(at_most("isotropy_bracket", "max", bmax, tol.isotropy_bracket));
    } else if (sc.expect.bracket_at_least) {
      rep.rows.push_back(at_least("isotropy_bracket", "max", bmax, *sc.expect.bracket_at_least));
    } else {
      rep.rows.push_back(info("isotropy_bracket", "max", bmax));
    }
  }

  std::optional<IntegralReport> coarse;
  if (wants(config, Command::kIntegrals) || wants(config, Command::kConvergence)) {
    coarse = compute_integrals(sc.fields, sc.material, rule, sc.dims, opts);
  }
  if (wants(config, Command::kIntegrals)) {
    const IntegralReport& ir = *coarse;
    integral_rows(rep.rows, "J", ir.J, tol.integral_discrepancy);
    integral_rows(rep.rows, "L", ir.L, tol.integral_discrepancy);
    integral_rows(rep.rows, "M", ir.M, tol.integral_discrepancy);
    if (sc.expect.j_zero) conservation_rows(rep.rows, "J_zero", ir.J, tol.conservation);
    if (sc.expect.l_zero) conservation_rows(rep.rows, "L_zero", ir.L, tol.conservation);
    if (sc.expect.m_zero) conservation_rows(rep.rows, "M_zero", ir.M, tol.conservation);
    if (sc.expect.m_at_least) {
      ReportRow r = at_least("M_nonzero", "-", std::abs(ir.M.surface[0]), *sc.expect.m_at_least);
      r.surface = ir.M.surface[0];
      r.volume = ir.M.volume[0];
      rep.rows.push_back(std::move(r));
    }
    if (sc.expect.m_equals_kappa_m) {
      IntegralPair p = make_pair_report(ir.M.surface, Tensor(0, {ir.kappa_m_volume}));
      integral_rows(rep.rows, "M_kappa_m", p, tol.integral_discrepancy);
    }
  }
  if (wants(config, Command::kConvergence)) {
    QuadratureRule fine_rule = rule;
    fine_rule.surface_order *= 2;
    fine_rule.volume_order *= 2;
    const IntegralReport fine = compute_integrals(sc.fields, sc.material, fine_rule, sc.dims, opts);
    refinement_rows(rep.rows, "J_refine_surface", coarse->J.surface, fine.J.surface, tol.convergence);
    refinement_rows(rep.rows, "L_refine_surface", coarse->L.surface, fine.L.surface, tol.convergence);
    refinement_rows(rep.rows, "M_refine_surface", coarse->M.surface, fine.M.surface, tol.convergence);
    refinement_rows(rep.rows, "J_refine_volume", coarse->J.volume, fine.J.volume, tol.convergence);
    refinement_rows(rep.rows, "L_refine_volume", coarse->L.volume, fine.L.volume, tol.convergence);
    refinement_rows(rep.rows, "M_refine_volume", coarse->M.volume, fine.M.volume, tol.convergence);
  }
  return rep;
}

std::string format_report(const Report& rep, Format format) {
  std::ostringstream os;
  switch (format) {
    case Format::kCsv: {
      os << "quantity,component,surface_value,volume_value,discrepancy,tolerance,pass\n";
      for (const auto& r : rep.rows) {
        os << r.quantity << ',' << r.component << ',' << (r.surface ? format_number(*r.surface) : "") << ','
           << (r.volume ? format_number(*r.volume) : "") << ',' << format_number(r.value) << ','
           << (r.kind == ReportRow::Kind::kInfo ? "" : format_number(r.tolerance)) << ',' << status(r) << '\n';
      }
      break;
    }
    case Format::kJson: {
      os << "{\n";
      os << "  \"scenario\": " << json_string(rep.scenario) << ",\n";
      os << "  \"description\": " << json_string(rep.description) << ",\n";
      os << "  \"seed\": " << rep.seed << ",\n";
      os << "  \"points\": " << rep.points << ",\n";
      os << "  \"surface_order\": " << rep.surface_order << ",\n";
      os << "  \"volume_order\": " << rep.volume_order << ",\n";
      os << "  \"geometry\": " << json_string(rep.geometry) << ",\n";
      os << "  \"energy_without_sources\": " << (rep.energy_without_sources ? "true" : "false") << ",\n";
      os << "  \"passed\": " << (rep.passed() ? "true" : "false") << ",\n";
      os << "  \"warnings\": [";
      for (std::size_t k = 0; k < rep.warnings.size(); ++k) {
        os << (k ? ", " : "") << json_string(rep.warnings[k]);
      }
      os << "],\n  \"rows\": [";
      for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        os << (k ? "," : "") << "\n    {\"quantity\": " << json_string(r.quantity)
           << ", \"component\": " << json_string(r.component)
           << ", \"surface_value\": " << (r.surface ? json_number(*r.surface) : "null")
           << ", \"volume_value\": " << (r.volume ? json_number(*r.volume) : "null")
           << ", \"discrepancy\": " << json_number(r.value)
           << ", \"tolerance\": " << (r.kind == ReportRow::Kind::kInfo ? "null" : json_number(r.tolerance))
           << ", \"pass\": " << json_string(status(r)) << "}";
      }
      os << "\n  ]\n}\n";
      break;
    }
    case Format::kTable: {
      os << "scenario " << rep.scenario << ": " << rep.description << "\n";
      os << "seed " << rep.seed << ", " << rep.points << " points, surface order " << rep.surface_order
         << ", volume order " << rep.volume_order << ", " << rep.geometry << "\n\n";
      char line[256];
      std::snprintf(line, sizeof line, "%-18s %-9s %14s %14s %14s %10s  %s\n", "quantity", "component", "surface",
                    "volume", "value", "tolerance", "status");
      os << line;
      for (const auto& r : rep.rows) {
        std::snprintf(line, sizeof line, "%-18s %-9s %14s %14s %14s %10s  %s\n", r.quantity.c_str(),
                      r.component.c_str(), r.surface ? short_number(*r.surface).c_str() : "",
                      r.volume ? short_number(*r.volume).c_str() : "", short_number(r.value).c_str(),
                      r.kind == ReportRow::Kind::kInfo ? ""
                      : r.kind == ReportRow::Kind::kAtLeast ? (">=" + short_number(r.tolerance)).c_str()
                                                            : short_number(r.tolerance).c_str(),
                      status(r));
        os << line;
      }
      for (const auto& w : rep.warnings) os << "warning: " << w << "\n";
      os << (rep.passed() ? "\nall checks passed\n" : "\nSOME CHECKS FAILED\n");
      break;
    }
  }
  return os.str();
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.threads > 0) set_evaluation_threads(config.threads);
  std::optional<Scenario> sc;
  try {
    sc.emplace(resolve_scenario(config.scenario));
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  Report rep;
  try {
    rep = run_scenario(*sc, config);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string text = format_report(rep, config.format);
  if (config.out.empty()) {
    out << text;
  } else {
    std::ofstream file(config.out, std::ios::binary);
    if (!file) {
      err << "error: cannot write " << config.out << "\n";
      return 2;
    }
    file << text;
  }
  for (const ReportRow* r : rep.failures()) {
    err << "tolerance failure: " << r->quantity << "[" << r->component << "] = " << format_number(r->value)
        << (r->kind == ReportRow::Kind::kAtLeast ? " < " : " > ") << format_number(r->tolerance) << "\n";
  }
  return rep.passed() ? 0 : 1;
}

int validate(const std::string& scenario, std::ostream& out, std::ostream& err) {
  std::optional<Scenario> sc;
  try {
    sc.emplace(resolve_scenario(scenario));
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  const auto pts = sample_points(sc->fields.domain(), 20, 7, 0.9);
  for (const Point& x : pts) {
    for (int w = 0; w < 6; ++w) {
      const auto which = static_cast<ConstitutiveTensor>(w);
      const Tensor t = sc->material.field(which).value(x);
      if (!check_symmetry(t, symmetry_of(which), 1e-12 * std::max(1.0, max_abs(t)))) {
        err << "error: " << name_of(which) << " violates its index symmetries\n";
        return 2;
      }
    }
  }
  out << "scenario " << sc->name << ": " << sc->description << "\n";
  out << "provenance: " << (sc->provenance == Provenance::kManufactured ? "manufactured" : "prescribed") << "\n";
  out << "material: " << (sc->material.isotropic() ? "isotropic" : "anisotropic") << ", "
      << (sc->material.homogeneous() ? "homogeneous" : "inhomogeneous") << "\n";
  out << "domain: " << describe(sc->fields.domain()) << "\n";
  out << "integration: " << describe(sc->rule.geometry) << ", surface order " << sc->rule.surface_order
      << ", volume order " << sc->rule.volume_order << "\n";
  out << "smallest energy eigenvalue at first sample point: "
      << format_number(sc->material.smallest_energy_eigenvalue(pts.front())) << "\n";
  if (sc->material.symmetrization_warning()) {
    out << "warning: constitutive input was symmetrized; largest entry change "
        << format_number(sc->material.symmetrization_change()) << "\n";
  }
  out << "ok\n";
  return 0;
}

}  // namespace micromorph
