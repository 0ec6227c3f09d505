#pragma once

// Scenarios: material + fields + integration geometry + tolerances.
//
// Manufactured scenarios back-compute the body force and couple from the
// Euler-Lagrange equations in closed form:
//   F_a  = -D_i t_ai
//   L_ab = -D_i m_abi - (t_ab - s_ab)

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "micromorph/integrals.hpp"
#include "micromorph/material.hpp"

namespace micromorph {

struct Tolerances {
  double el_residual = 1e-10;
  double balance_exact = 1e-8;
  double balance_fd = 1e-5;
  double integral_discrepancy = 1e-6;
  double conservation = 1e-8;
  double isotropy_bracket = 1e-10;
  double convergence = 1e-8;
};

enum class Provenance { kManufactured, kPrescribed };

/// Claims a scenario makes beyond the generic checks.
struct Expectations {
  bool j_zero = false;
  bool l_zero = false;
  bool m_zero = false;
  std::optional<double> m_at_least;  // |M| >= value
  bool m_equals_kappa_m = false;     // M(surface) = -volume of kappa:m
  bool bracket_zero = false;         // isotropy bracket vanishes pointwise
  std::optional<double> bracket_at_least;
};

/// Symbolic stresses for given fields. Entries are row-major like Tensor.
struct SymbolicStress {
  std::array<Expression, 9> t;
  std::array<Expression, 9> s;
  std::array<Expression, 27> m;
};

SymbolicStress symbolic_stress(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi);

struct Sources {
  FieldSet::Vector force;
  FieldSet::Matrix couple;
};

/// Closed-form F and L that make (u, phi) an exact solution.
Sources manufacture_sources(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi);

struct Scenario {
  std::string name;
  std::string description;
  MaterialModel material;
  FieldSet fields;
  QuadratureRule rule;
  ScalingDims dims;
  Tolerances tolerances;
  Provenance provenance = Provenance::kManufactured;
  EvalOptions options;
  Expectations expect;
};

/// Manufactured scenario with the default rule: a ball at the domain centre
/// with half the domain's inner radius.
Scenario manufacture(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi,
                     const Region& domain);

QuadratureRule default_rule(const Region& domain);

/// Parses a scenario document (JSON, // comments allowed). Throws ParseError
/// carrying a byte offset for syntax errors and a JSON pointer for schema
/// errors.
Scenario parse_scenario(std::string_view text, std::string_view origin = "<string>");
Scenario load_scenario_file(const std::string& path);

struct BuiltinInfo {
  std::string name;
  std::string description;
};

std::vector<BuiltinInfo> builtin_list();
Scenario builtin_scenario(std::string_view name);
std::vector<Scenario> builtin_scenarios();

/// Source text of a builtin scenario document.
std::string_view builtin_source(std::string_view name);

/// A builtin name or a path to a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

/// Uniform random points in `region` shrunk by `shrink` about its centre.
std::vector<Point> sample_points(const Region& region, std::size_t count, std::uint64_t seed, double shrink = 0.95);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit engine draw.
double unit_uniform(std::uint64_t bits);

}  // namespace micromorph
