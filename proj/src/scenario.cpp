#include "micromorph/scenario.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "micromorph/error.hpp"

namespace micromorph {

namespace embedded {
struct File {
  const char* name;
  const char* text;
};
// Generated from scenarios/*.json at build time.
extern const File kScenarioFiles[];
extern const std::size_t kScenarioFileCount;
}  // namespace embedded

namespace {

using json = nlohmann::json;

Expression dot(const double* coeffs, std::size_t stride, const Expression* xs, std::size_t n) {
  Expression sum;
  for (std::size_t k = 0; k < n; ++k) {
    const double c = coeffs[k * stride];
    if (c == 0.0 || xs[k].is_zero()) continue;
    sum += c == 1.0 ? xs[k] : Expression(c) * xs[k];
  }
  return sum;
}

// Sum over the field's terms of profile * (coefficient contracted with xs).
// Row `a` of the coefficient is read at offset a*row_stride + k*stride.
Expression contract_field(const TensorField& field, std::size_t a, std::size_t row_stride, std::size_t stride,
                          const Expression* xs, std::size_t n) {
  Expression sum;
  for (const TensorTerm& term : field.terms()) {
    if (term.profile.is_zero()) continue;
    const Expression lin = dot(term.coefficient.entries().data() + a * row_stride, stride, xs, n);
    if (lin.is_zero()) continue;
    sum += term.profile * lin;
  }
  return sum;
}

}  // namespace

SymbolicStress symbolic_stress(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi) {
  std::array<Expression, 9> gamma, e;
  std::array<Expression, 27> kappa;
  for (int k = 0; k < kDim; ++k) {
    for (int l = 0; l < kDim; ++l) {
      gamma[k * 3 + l] = u[k].derivative(l) - phi[k * 3 + l];
      e[k * 3 + l] = 0.5 * (phi[k * 3 + l] + phi[l * 3 + k]);
      for (int m = 0; m < kDim; ++m) kappa[(k * 3 + l) * 3 + m] = phi[k * 3 + l].derivative(m);
    }
  }

  SymbolicStress out;
  for (std::size_t a = 0; a < 9; ++a) {
    out.t[a] = contract_field(material.A(), a, 9, 1, gamma.data(), 9) +
               contract_field(material.E(), a, 9, 1, e.data(), 9) +
               contract_field(material.F(), a, 27, 1, kappa.data(), 27);
    out.s[a] = contract_field(material.E(), a, 1, 9, gamma.data(), 9) +
               contract_field(material.B(), a, 9, 1, e.data(), 9) +
               contract_field(material.G(), a, 27, 1, kappa.data(), 27);
  }
  for (int i = 0; i < kDim; ++i) {
    for (int j = i + 1; j < kDim; ++j) {
      const Expression avg = 0.5 * (out.s[i * 3 + j] + out.s[j * 3 + i]);
      out.s[i * 3 + j] = avg;
      out.s[j * 3 + i] = avg;
    }
  }
  for (std::size_t c = 0; c < 27; ++c) {
    out.m[c] = contract_field(material.F(), c, 1, 27, gamma.data(), 9) +
               contract_field(material.G(), c, 1, 27, e.data(), 9) +
               contract_field(material.C(), c, 27, 1, kappa.data(), 27);
  }
  return out;
}

Sources manufacture_sources(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi) {
  const SymbolicStress st = symbolic_stress(material, u, phi);
  Differentiator d;
  Sources src;
  for (int a = 0; a < kDim; ++a) {
    Expression div;
    for (int i = 0; i < kDim; ++i) div += d(st.t[a * 3 + i], i);
    src.force[a] = -div;
    for (int b = 0; b < kDim; ++b) {
      Expression mdiv;
      for (int i = 0; i < kDim; ++i) mdiv += d(st.m[(a * 3 + b) * 3 + i], i);
      src.couple[a * 3 + b] = -mdiv - (st.t[a * 3 + b] - st.s[a * 3 + b]);
    }
  }
  return src;
}

QuadratureRule default_rule(const Region& domain) {
  QuadratureRule rule;
  if (const auto* box = std::get_if<Box>(&domain)) {
    Ball ball;
    double half = INFINITY;
    for (int i = 0; i < kDim; ++i) {
      ball.center[i] = 0.5 * (box->lo[i] + box->hi[i]);
      half = std::min(half, 0.5 * (box->hi[i] - box->lo[i]));
    }
    ball.radius = 0.5 * half;
    rule.geometry = ball;
  } else {
    Ball ball = std::get<Ball>(domain);
    ball.radius *= 0.5;
    rule.geometry = ball;
  }
  return rule;
}

Scenario manufacture(const MaterialModel& material, const FieldSet::Vector& u, const FieldSet::Matrix& phi,
                     const Region& domain) {
  Sources src = manufacture_sources(material, u, phi);
  return Scenario{"manufactured",
                  "",
                  material,
                  FieldSet(u, phi, std::move(src.force), std::move(src.couple), domain),
                  default_rule(domain),
                  ScalingDims{},
                  Tolerances{},
                  Provenance::kManufactured,
                  EvalOptions{},
                  Expectations{}};
}

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<Point> sample_points(const Region& region, std::size_t count, std::uint64_t seed, double shrink) {
  std::mt19937_64 engine(seed);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit_uniform(engine()); };
  std::vector<Point> pts;
  pts.reserve(count);
  if (const auto* box = std::get_if<Box>(&region)) {
    while (pts.size() < count) {
      Point x;
      for (int i = 0; i < kDim; ++i) {
        const double c = 0.5 * (box->lo[i] + box->hi[i]);
        const double h = 0.5 * shrink * (box->hi[i] - box->lo[i]);
        x[i] = uniform(c - h, c + h);
      }
      pts.push_back(x);
    }
  } else {
    const auto& ball = std::get<Ball>(region);
    const double r = shrink * ball.radius;
    while (pts.size() < count) {
      Point d{uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)};
      if (d[0] * d[0] + d[1] * d[1] + d[2] * d[2] > 1.0) continue;
      pts.push_back({ball.center[0] + r * d[0], ball.center[1] + r * d[1], ball.center[2] + r * d[2]});
    }
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Scenario documents

namespace {

std::string line_col(std::string_view text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t k = 0; k < offset && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class Reader {
 public:
  Reader(std::string_view text, std::string_view origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(const std::string& path, const std::string& message) const {
    const std::size_t pos = locate(path);
    throw ParseError(std::string(origin_) + ": " + line_col(text_, pos) + ": " + path + ": " + message, pos);
  }

  // Heuristic source offset of a JSON pointer: successive key occurrences.
  std::size_t locate(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t start = 1;
    while (start <= path.size()) {
      std::size_t end = path.find('/', start);
      if (end == std::string::npos) end = path.size();
      const std::string token = path.substr(start, end - start);
      start = end + 1;
      if (token.empty() || std::isdigit(static_cast<unsigned char>(token[0]))) continue;
      const std::size_t found = text_.find("\"" + token + "\"", pos);
      if (found == std::string_view::npos) break;
      pos = found;
    }
    return pos;
  }

  const json& member(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing key \"") + key + "\"");
    return *it;
  }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      bool known = false;
      for (const char* k : keys) known = known || it.key() == k;
      if (!known) fail(path + "/" + it.key(), "unknown key");
    }
  }

  double number(const json& j, const std::string& path) const {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "number is not finite");
    return v;
  }

  int integer(const json& j, const std::string& path) const {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
  }

  bool boolean(const json& j, const std::string& path) const {
    if (!j.is_boolean()) fail(path, "expected true or false");
    return j.get<bool>();
  }

  std::string string(const json& j, const std::string& path) const {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
  }

  std::vector<double> numbers(const json& j, const std::string& path, std::size_t count) const {
    if (!j.is_array()) fail(path, "expected an array");
    if (j.size() != count) {
      fail(path, "expected " + std::to_string(count) + " entries, got " + std::to_string(j.size()));
    }
    std::vector<double> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(number(j[k], path + "/" + std::to_string(k)));
    return out;
  }

  Point point(const json& j, const std::string& path) const {
    const auto v = numbers(j, path, 3);
    return {v[0], v[1], v[2]};
  }

  Expression expression(const json& j, const std::string& path) const {
    if (j.is_number()) return Expression(number(j, path));
    const std::string s = string(j, path);
    try {
      return Expression::parse(s);
    } catch (const ParseError& e) {
      fail(path, std::string("bad expression: ") + e.what());
    }
  }

  template <std::size_t N>
  std::array<Expression, N> expressions(const json& j, const std::string& path) const {
    if (!j.is_array() || j.size() != N) fail(path, "expected an array of " + std::to_string(N) + " expressions");
    std::array<Expression, N> out;
    for (std::size_t k = 0; k < N; ++k) out[k] = expression(j[k], path + "/" + std::to_string(k));
    return out;
  }

  Region region(const json& j, const std::string& path) const {
    only_keys(j, path, {"box", "ball"});
    if (j.size() != 1) fail(path, "expected exactly one of \"box\" or \"ball\"");
    if (j.contains("box")) {
      const std::string p = path + "/box";
      only_keys(j["box"], p, {"lo", "hi"});
      Box b{point(member(j["box"], p, "lo"), p + "/lo"), point(member(j["box"], p, "hi"), p + "/hi")};
      for (int i = 0; i < kDim; ++i) {
        if (!(b.lo[i] < b.hi[i])) fail(p, "box needs lo < hi in every direction");
      }
      return b;
    }
    const std::string p = path + "/ball";
    only_keys(j["ball"], p, {"center", "radius"});
    Ball b{point(member(j["ball"], p, "center"), p + "/center"), number(member(j["ball"], p, "radius"), p + "/radius")};
    if (!(b.radius > 0.0)) fail(p + "/radius", "radius must be positive");
    return b;
  }

 private:
  std::string_view text_;
  std::string_view origin_;
};

const char* const kTensorKeys[] = {"A", "B", "C", "E", "F", "G"};

Tensor random_tensor(int rank, std::uint64_t seed, double amplitude, const SymmetrySpec& spec) {
  std::mt19937_64 engine(seed);
  Tensor t(rank);
  for (double& v : t.entries()) v = amplitude * (2.0 * unit_uniform(engine()) - 1.0);
  return symmetrize(t, spec);
}

MaterialModel read_material(const Reader& r, const json& j, const std::string& path) {
  r.only_keys(j, path, {"isotropic", "anisotropic"});
  if (j.empty()) r.fail(path, "expected \"isotropic\" and/or \"anisotropic\"");

  std::optional<MaterialModel> iso;
  if (j.contains("isotropic")) {
    const std::string p = path + "/isotropic";
    const json& ji = j["isotropic"];
    r.only_keys(ji, p, {"A", "B", "C", "E", "profiles"});
    IsotropicSpec spec;
    auto fill = [&](auto& dst, const char* key) {
      if (!ji.contains(key)) return;
      const auto v = r.numbers(ji[key], p + "/" + key, dst.size());
      std::copy(v.begin(), v.end(), dst.begin());
    };
    fill(spec.A, "A");
    fill(spec.B, "B");
    fill(spec.C, "C");
    fill(spec.E, "E");
    if (ji.contains("profiles")) {
      const std::string pp = p + "/profiles";
      const json& jp = ji["profiles"];
      r.only_keys(jp, pp, {"A", "B", "C", "E"});
      if (jp.contains("A")) spec.profile_A = r.expression(jp["A"], pp + "/A");
      if (jp.contains("B")) spec.profile_B = r.expression(jp["B"], pp + "/B");
      if (jp.contains("C")) spec.profile_C = r.expression(jp["C"], pp + "/C");
      if (jp.contains("E")) spec.profile_E = r.expression(jp["E"], pp + "/E");
    }
    iso = make_isotropic(spec);
  }
  if (!j.contains("anisotropic")) return *iso;

  const std::string p = path + "/anisotropic";
  const json& ja = j["anisotropic"];
  r.only_keys(ja, p, {"A", "B", "C", "E", "F", "G"});
  std::vector<TensorField> fields;
  for (int w = 0; w < 6; ++w) {
    const auto which = static_cast<ConstitutiveTensor>(w);
    const int rank = rank_of(which);
    std::vector<TensorTerm> terms;
    if (iso) terms = iso->field(which).terms();
    if (ja.contains(kTensorKeys[w])) {
      const std::string pt = p + "/" + kTensorKeys[w];
      const json& list = ja[kTensorKeys[w]];
      if (!list.is_array()) r.fail(pt, "expected an array of terms");
      for (std::size_t k = 0; k < list.size(); ++k) {
        const std::string pk = pt + "/" + std::to_string(k);
        const json& term = list[k];
        r.only_keys(term, pk, {"profile", "entries", "random"});
        Expression profile = term.contains("profile") ? r.expression(term["profile"], pk + "/profile") : Expression(1.0);
        if (term.contains("entries") == term.contains("random")) {
          r.fail(pk, "expected exactly one of \"entries\" or \"random\"");
        }
        Tensor coeff(rank);
        if (term.contains("entries")) {
          coeff = Tensor(rank, r.numbers(term["entries"], pk + "/entries", tensor_size(rank)));
        } else {
          const std::string pr = pk + "/random";
          const json& jr = term["random"];
          r.only_keys(jr, pr, {"seed", "amplitude"});
          const int seed = r.integer(r.member(jr, pr, "seed"), pr + "/seed");
          const double amp = r.number(r.member(jr, pr, "amplitude"), pr + "/amplitude");
          coeff = random_tensor(rank, static_cast<std::uint64_t>(seed), amp, symmetry_of(which));
        }
        terms.push_back({std::move(profile), std::move(coeff)});
      }
    }
    fields.emplace_back(rank, std::move(terms));
  }
  return make_anisotropic(fields[0], fields[1], fields[2], fields[3], fields[4], fields[5]);
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end(), nullptr, true, true);
  } catch (const json::parse_error& e) {
    const std::size_t pos = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(std::string(origin) + ": " + line_col(text, pos) + ": malformed JSON: " + e.what(), pos);
  }
  const Reader r(text, origin);
  r.only_keys(doc, "", {"name", "description", "dims", "material", "fields", "domain", "quadrature", "tolerances",
                        "expect", "options"});

  const std::string name = r.string(r.member(doc, "", "name"), "/name");
  const std::string description = doc.contains("description") ? r.string(doc["description"], "/description") : "";
  const Region domain = r.region(r.member(doc, "", "domain"), "/domain");
  MaterialModel material = read_material(r, r.member(doc, "", "material"), "/material");

  const json& jf = r.member(doc, "", "fields");
  r.only_keys(jf, "/fields", {"u", "phi", "sources"});
  const auto u = r.expressions<3>(r.member(jf, "/fields", "u"), "/fields/u");
  const auto phi = r.expressions<9>(r.member(jf, "/fields", "phi"), "/fields/phi");

  Provenance provenance = Provenance::kManufactured;
  FieldSet::Vector force;
  FieldSet::Matrix couple;
  const json sources = jf.contains("sources") ? jf["sources"] : json("manufactured");
  if (sources.is_string()) {
    const std::string s = sources.get<std::string>();
    if (s == "manufactured") {
      Sources src = manufacture_sources(material, u, phi);
      force = std::move(src.force);
      couple = std::move(src.couple);
    } else if (s == "none") {
      provenance = Provenance::kPrescribed;
    } else {
      r.fail("/fields/sources", "expected \"manufactured\", \"none\", or an object with F and L");
    }
  } else {
    r.only_keys(sources, "/fields/sources", {"F", "L"});
    provenance = Provenance::kPrescribed;
    if (sources.contains("F")) force = r.expressions<3>(sources["F"], "/fields/sources/F");
    if (sources.contains("L")) couple = r.expressions<9>(sources["L"], "/fields/sources/L");
  }

  std::optional<FieldSet> fields;
  try {
    fields.emplace(u, phi, force, couple, domain);
  } catch (const Error& e) {
    r.fail("/fields", e.what());
  }

  QuadratureRule rule = default_rule(domain);
  if (doc.contains("quadrature")) {
    const json& jq = doc["quadrature"];
    r.only_keys(jq, "/quadrature", {"geometry", "surface_order", "volume_order"});
    if (jq.contains("geometry")) rule.geometry = r.region(jq["geometry"], "/quadrature/geometry");
    if (jq.contains("surface_order")) rule.surface_order = r.integer(jq["surface_order"], "/quadrature/surface_order");
    if (jq.contains("volume_order")) rule.volume_order = r.integer(jq["volume_order"], "/quadrature/volume_order");
    if (rule.surface_order < 2 || rule.volume_order < 2) r.fail("/quadrature", "orders must be at least 2");
  }
  if (!region_inside(rule.geometry, domain)) {
    r.fail("/quadrature/geometry", "integration geometry " + describe(rule.geometry) + " is not inside the domain " +
                                       describe(domain));
  }

  ScalingDims dims;
  if (doc.contains("dims")) {
    r.only_keys(doc["dims"], "/dims", {"n"});
    const int n = r.integer(r.member(doc["dims"], "/dims", "n"), "/dims/n");
    if (n < 1) r.fail("/dims/n", "dimension must be positive");
    dims = ScalingDims::for_dimension(n);
  }

  Tolerances tol;
  if (doc.contains("tolerances")) {
    const json& jt = doc["tolerances"];
    r.only_keys(jt, "/tolerances", {"el_residual", "balance_exact", "balance_fd", "integral_discrepancy",
                                    "conservation", "isotropy_bracket", "convergence"});
    auto set = [&](double& dst, const char* key) {
      if (!jt.contains(key)) return;
      dst = r.number(jt[key], std::string("/tolerances/") + key);
      if (dst < 0.0) r.fail(std::string("/tolerances/") + key, "tolerance must be nonnegative");
    };
    set(tol.el_residual, "el_residual");
    set(tol.balance_exact, "balance_exact");
    set(tol.balance_fd, "balance_fd");
    set(tol.integral_discrepancy, "integral_discrepancy");
    set(tol.conservation, "conservation");
    set(tol.isotropy_bracket, "isotropy_bracket");
    set(tol.convergence, "convergence");
  }

  Expectations expect;
  if (doc.contains("expect")) {
    const json& je = doc["expect"];
    r.only_keys(je, "/expect", {"J_zero", "L_zero", "M_zero", "M_at_least", "M_equals_kappa_m", "bracket_zero",
                                "bracket_at_least"});
    if (je.contains("J_zero")) expect.j_zero = r.boolean(je["J_zero"], "/expect/J_zero");
    if (je.contains("L_zero")) expect.l_zero = r.boolean(je["L_zero"], "/expect/L_zero");
    if (je.contains("M_zero")) expect.m_zero = r.boolean(je["M_zero"], "/expect/M_zero");
    if (je.contains("M_at_least")) expect.m_at_least = r.number(je["M_at_least"], "/expect/M_at_least");
    if (je.contains("M_equals_kappa_m")) {
      expect.m_equals_kappa_m = r.boolean(je["M_equals_kappa_m"], "/expect/M_equals_kappa_m");
    }
    if (je.contains("bracket_zero")) expect.bracket_zero = r.boolean(je["bracket_zero"], "/expect/bracket_zero");
    if (je.contains("bracket_at_least")) {
      expect.bracket_at_least = r.number(je["bracket_at_least"], "/expect/bracket_at_least");
    }
  }

  EvalOptions opts;
  if (doc.contains("options")) {
    r.only_keys(doc["options"], "/options", {"energy_without_sources"});
    if (doc["options"].contains("energy_without_sources")) {
      opts.energy_without_sources =
          r.boolean(doc["options"]["energy_without_sources"], "/options/energy_without_sources");
    }
  }

  return Scenario{name, description, std::move(material), std::move(*fields), rule, dims, tol, provenance, opts,
                  expect};
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path + ": cannot open scenario file", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string_view builtin_source(std::string_view name) {
  for (std::size_t k = 0; k < embedded::kScenarioFileCount; ++k) {
    if (name == embedded::kScenarioFiles[k].name) return embedded::kScenarioFiles[k].text;
  }
  throw ParseError("unknown builtin scenario \"" + std::string(name) + "\"", 0);
}

std::vector<BuiltinInfo> builtin_list() {
  std::vector<BuiltinInfo> out;
  for (std::size_t k = 0; k < embedded::kScenarioFileCount; ++k) {
    const json doc = json::parse(embedded::kScenarioFiles[k].text, nullptr, true, true);
    out.push_back({embedded::kScenarioFiles[k].name, doc.value("description", "")});
  }
  return out;
}

Scenario builtin_scenario(std::string_view name) {
  return parse_scenario(builtin_source(name), "builtin:" + std::string(name));
}

std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& info : builtin_list()) out.push_back(builtin_scenario(info.name));
  return out;
}

Scenario resolve_scenario(const std::string& name_or_path) {
  for (std::size_t k = 0; k < embedded::kScenarioFileCount; ++k) {
    if (name_or_path == embedded::kScenarioFiles[k].name) return builtin_scenario(name_or_path);
  }
  return load_scenario_file(name_or_path);
}

}  // namespace micromorph
