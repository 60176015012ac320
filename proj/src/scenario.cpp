#include "sacbf/scenario.hpp"

#include "sacbf/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace sacbf {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string tok; in >> tok;) out.push_back(tok);
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

struct Section {
  std::string kind;
  std::string id;
  int line = 0;
  std::map<std::string, Entry> entries;

  std::string label() const { return id.empty() ? kind : kind + " " + id; }
};

// Key access that remembers what was consumed so leftovers can be rejected.
class Reader {
 public:
  explicit Reader(Section& section) : s_(section) {}

  bool has(const std::string& key) const { return s_.entries.count(key) > 0; }

  std::string text(const std::string& key) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) throw ParseError(field(key) + ": missing required field");
    std::string v = it->second.value;
    s_.entries.erase(it);
    return v;
  }

  std::string text_or(const std::string& key, const std::string& fallback) { return has(key) ? text(key) : fallback; }

  double number(const std::string& key) { return to_number(key, text(key)); }
  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  std::vector<double> numbers(const std::string& key) {
    const std::string raw = text(key);
    std::vector<double> out;
    for (const auto& tok : split_ws(raw)) out.push_back(to_number(key, tok));
    if (out.empty()) throw ParseError(field(key) + ": empty list");
    return out;
  }

  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const std::string raw = trim(text(key));
    long long v = 0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
      throw ParseError(field(key) + ": expected an integer, got '" + raw + "'");
    return v;
  }

  unsigned long long unsigned_integer(const std::string& key, unsigned long long fallback) {
    if (!has(key)) return fallback;
    const std::string raw = trim(text(key));
    unsigned long long v = 0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
      throw ParseError(field(key) + ": expected a non-negative integer, got '" + raw + "'");
    return v;
  }

  void finish() const {
    if (!s_.entries.empty()) {
      const auto& [key, entry] = *s_.entries.begin();
      throw ParseError("line " + std::to_string(entry.line) + ": unknown key '" + key + "' in [" + s_.label() + "]");
    }
  }

  std::string field(const std::string& key) const { return "[" + s_.label() + "] " + key; }

 private:
  double to_number(const std::string& key, const std::string& raw_in) const {
    const std::string raw = trim(raw_in);
    double v = 0.0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc() || res.ptr != raw.data() + raw.size())
      throw ParseError(field(key) + ": expected a number, got '" + raw + "'");
    return v;
  }

  Section& s_;
};

std::vector<Section> split_sections(const std::string& text) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError("line " + std::to_string(lineno) + ": malformed section header");
      const auto parts = split_ws(t.substr(1, t.size() - 2));
      if (parts.empty() || parts.size() > 2)
        throw ParseError("line " + std::to_string(lineno) + ": malformed section header");
      Section s;
      s.kind = parts[0];
      s.id = parts.size() == 2 ? parts[1] : "";
      s.line = lineno;
      sections.push_back(std::move(s));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError("line " + std::to_string(lineno) + ": expected 'key = value'");
    if (sections.empty()) throw ParseError("line " + std::to_string(lineno) + ": key outside of any section");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError("line " + std::to_string(lineno) + ": empty key");
    auto& entries = sections.back().entries;
    if (entries.count(key) > 0)
      throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + key + "' in [" +
                       sections.back().label() + "]");
    entries[key] = {value, lineno};
  }
  return sections;
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

NormForm parse_form(Reader& r) {
  const std::string v = r.text_or("form", "powered");
  if (v == "powered") return NormForm::kPowered;
  if (v == "literal") return NormForm::kLiteral;
  throw ParseError(r.field("form") + ": expected 'powered' or 'literal', got '" + v + "'");
}

std::string form_name(NormForm f) { return f == NormForm::kPowered ? "powered" : "literal"; }

std::string schedule_name(ReachSchedule s) {
  return s == ReachSchedule::kPoweredRadius ? "powered-radius" : "linear-radius";
}

std::string variation_name(InputVariation v) {
  return v == InputVariation::kCandidateSpread ? "candidate-spread" : "held-input";
}

std::string candidates_name(CandidateInputs c) {
  return c == CandidateInputs::kBoxVertices ? "box-vertices" : "applied-input";
}

std::vector<ClassKappaPower> parse_alphas(Reader& r) {
  const long long degree = r.integer("relative_degree", 2);
  if (degree < 1 || degree > 2) throw ParseError(r.field("relative_degree") + ": must be 1 or 2");
  const auto n = static_cast<std::size_t>(degree);
  std::vector<double> lambdas = r.numbers("lambda");
  std::vector<double> etas = r.has("eta") ? r.numbers("eta") : std::vector<double>{1.0};
  auto expand = [&](std::vector<double>& v, const char* key) {
    if (v.size() == 1) v.assign(n, v[0]);
    if (v.size() != n)
      throw ParseError(r.field(key) + ": expected 1 or " + std::to_string(n) + " values");
  };
  expand(lambdas, "lambda");
  expand(etas, "eta");
  std::vector<ClassKappaPower> alphas;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lambdas[i] > 0.0)) throw ParseError(r.field("lambda") + ": values must be > 0");
    if (!(etas[i] > 0.0)) throw ParseError(r.field("eta") + ": values must be > 0");
    // Exponents within 1e-12 of one are stored as exactly one.
    const double eta = std::abs(etas[i] - 1.0) <= 1e-12 ? 1.0 : etas[i];
    alphas.emplace_back(lambdas[i], eta);
  }
  return alphas;
}

void write_list(std::ostream& out, const char* key, const Eigen::VectorXd& v) {
  out << key << " =";
  for (Eigen::Index i = 0; i < v.size(); ++i) out << ' ' << format_number(v(i));
  out << '\n';
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  std::vector<Section> sections = split_sections(text);
  if (sections.empty()) throw ParseError("empty scenario document");

  ScenarioConfig cfg;
  bool have_scenario = false;
  bool have_bound = false;
  for (auto& section : sections) {
    Reader r(section);
    const std::string where = "line " + std::to_string(section.line) + ": ";
    if (section.kind == "scenario") {
      if (have_scenario) throw ParseError(where + "duplicate [scenario] section");
      if (!section.id.empty()) throw ParseError(where + "[scenario] takes no identifier");
      have_scenario = true;
      cfg.name = r.text_or("name", cfg.name);
      cfg.model = r.text_or("model", cfg.model);
      cfg.initial_state = to_vector(r.numbers("initial_state"));
      cfg.t0 = r.number_or("t0", 0.0);
      cfg.dt = r.number("dt");
      cfg.horizon = r.number("horizon");
      if (r.has("controller")) {
        const std::string v = r.text("controller");
        try {
          cfg.controller = parse_controller(v);
        } catch (const ContractViolation&) {
          throw ParseError(r.field("controller") + ": unknown controller '" + v + "'");
        }
      }
      const auto lo = r.numbers("input_lower");
      const auto hi = r.numbers("input_upper");
      if (lo.size() != hi.size()) throw ParseError(r.field("input_upper") + ": length differs from input_lower");
      try {
        cfg.input_box = InputBox(to_vector(lo), to_vector(hi));
      } catch (const ContractViolation& e) {
        throw ParseError(r.field("input_upper") + ": " + e.what());
      }
      if (r.has("policy")) {
        const std::string v = r.text("policy");
        try {
          cfg.policy = parse_policy(v);
        } catch (const ContractViolation&) {
          throw ParseError(r.field("policy") + ": expected 'hold-previous' or 'zero-input', got '" + v + "'");
        }
      }
      cfg.audit_substep = r.number_or("audit_substep", 0.0);
      cfg.integrator_tolerance = r.number_or("integrator_tolerance", cfg.integrator_tolerance);
    } else if (section.kind == "bound") {
      if (have_bound) throw ParseError(where + "duplicate [bound] section");
      if (!section.id.empty()) throw ParseError(where + "[bound] takes no identifier");
      have_bound = true;
      cfg.bound.nodes = static_cast<int>(r.integer("nodes", cfg.bound.nodes));
      cfg.bound.safety_factor = r.number_or("safety_factor", cfg.bound.safety_factor);
      cfg.bound.lipschitz_samples = static_cast<int>(r.integer("lipschitz_samples", cfg.bound.lipschitz_samples));
      cfg.bound.seed = r.unsigned_integer("seed", cfg.bound.seed);
      cfg.bound.cache_fraction = r.number_or("cache_fraction", cfg.bound.cache_fraction);
      const std::string v = r.text_or("input_variation", variation_name(cfg.bound.input_variation));
      if (v == "candidate-spread") {
        cfg.bound.input_variation = InputVariation::kCandidateSpread;
      } else if (v == "held-input") {
        cfg.bound.input_variation = InputVariation::kHeldInput;
      } else {
        throw ParseError(r.field("input_variation") + ": expected 'candidate-spread' or 'held-input'");
      }
      const std::string cand = r.text_or("candidate_inputs", candidates_name(cfg.bound.candidates));
      if (cand == "box-vertices") {
        cfg.bound.candidates = CandidateInputs::kBoxVertices;
      } else if (cand == "applied-input") {
        cfg.bound.candidates = CandidateInputs::kAppliedInput;
      } else {
        throw ParseError(r.field("candidate_inputs") + ": expected 'box-vertices' or 'applied-input'");
      }
      cfg.bound.certify_iterations = static_cast<int>(r.integer("certify_iterations", cfg.bound.certify_iterations));
      cfg.bound.certify_margin = r.number_or("certify_margin", cfg.bound.certify_margin);
    } else if (section.kind == "safety" || section.kind == "reach") {
      if (section.id.empty()) throw ParseError(where + "[" + section.kind + "] needs an identifier");
      ChainDecl c;
      c.id = section.id;
      const auto center = r.numbers("center");
      if (section.kind == "safety") {
        c.tag = ChainTag::kSafety;
        c.center = to_vector(center);
        c.radius = r.number("radius");
        c.norm_order = r.number_or("norm_order", 2.0);
        c.form = parse_form(r);
      } else {
        c.tag = ChainTag::kReach;
        c.reach.center = to_vector(center);
        c.reach.eps0 = r.number("eps0");
        c.reach.eps_d = r.number("eps_d");
        c.reach.t_start = r.number("t_start");
        c.reach.t_reach = r.number("t_reach");
        if (r.has("t_remain")) c.reach.t_remain = r.number("t_remain");
        c.reach.norm_order = r.number_or("norm_order", 2.0);
        const std::string sched = r.text_or("schedule", "powered-radius");
        if (sched == "powered-radius") {
          c.reach.schedule = ReachSchedule::kPoweredRadius;
        } else if (sched == "linear-radius") {
          c.reach.schedule = ReachSchedule::kLinearRadius;
        } else {
          throw ParseError(r.field("schedule") + ": expected 'powered-radius' or 'linear-radius'");
        }
        c.reach.form = parse_form(r);
      }
      c.alphas = parse_alphas(r);
      c.weight = r.number_or("weight", 1.0);
      cfg.chains.push_back(std::move(c));
    } else {
      throw ParseError(where + "unknown section [" + section.label() + "]");
    }
    r.finish();
  }
  if (!have_scenario) throw ParseError("[scenario]: missing required section");

  if (cfg.audit_substep == 0.0 && cfg.dt > 0.0) cfg.audit_substep = cfg.dt / 100.0;
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid scenario: ") + e.what());
  }
  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::ostringstream out;
  out << "[scenario]\n";
  out << "name = " << c.name << '\n';
  out << "model = " << c.model << '\n';
  write_list(out, "initial_state", c.initial_state);
  out << "t0 = " << format_number(c.t0) << '\n';
  out << "dt = " << format_number(c.dt) << '\n';
  out << "horizon = " << format_number(c.horizon) << '\n';
  out << "controller = " << to_string(c.controller) << '\n';
  write_list(out, "input_lower", c.input_box.lower);
  write_list(out, "input_upper", c.input_box.upper);
  out << "policy = " << to_string(c.policy) << '\n';
  out << "audit_substep = " << format_number(c.audit_substep) << '\n';
  out << "integrator_tolerance = " << format_number(c.integrator_tolerance) << '\n';

  out << "\n[bound]\n";
  out << "nodes = " << c.bound.nodes << '\n';
  out << "safety_factor = " << format_number(c.bound.safety_factor) << '\n';
  out << "lipschitz_samples = " << c.bound.lipschitz_samples << '\n';
  out << "seed = " << c.bound.seed << '\n';
  out << "cache_fraction = " << format_number(c.bound.cache_fraction) << '\n';
  out << "input_variation = " << variation_name(c.bound.input_variation) << '\n';
  out << "candidate_inputs = " << candidates_name(c.bound.candidates) << '\n';
  out << "certify_iterations = " << c.bound.certify_iterations << '\n';
  out << "certify_margin = " << format_number(c.bound.certify_margin) << '\n';

  for (const auto& ch : c.chains) {
    Eigen::VectorXd lambdas(static_cast<Eigen::Index>(ch.alphas.size()));
    Eigen::VectorXd etas(lambdas.size());
    for (std::size_t i = 0; i < ch.alphas.size(); ++i) {
      lambdas(static_cast<Eigen::Index>(i)) = ch.alphas[i].lambda;
      etas(static_cast<Eigen::Index>(i)) = ch.alphas[i].eta;
    }
    if (ch.tag == ChainTag::kSafety) {
      out << "\n[safety " << ch.id << "]\n";
      write_list(out, "center", ch.center);
      out << "radius = " << format_number(ch.radius) << '\n';
      out << "norm_order = " << format_number(ch.norm_order) << '\n';
      out << "form = " << form_name(ch.form) << '\n';
    } else {
      out << "\n[reach " << ch.id << "]\n";
      write_list(out, "center", ch.reach.center);
      out << "eps0 = " << format_number(ch.reach.eps0) << '\n';
      out << "eps_d = " << format_number(ch.reach.eps_d) << '\n';
      out << "t_start = " << format_number(ch.reach.t_start) << '\n';
      out << "t_reach = " << format_number(ch.reach.t_reach) << '\n';
      if (ch.reach.t_remain) out << "t_remain = " << format_number(*ch.reach.t_remain) << '\n';
      out << "norm_order = " << format_number(ch.reach.norm_order) << '\n';
      out << "schedule = " << schedule_name(ch.reach.schedule) << '\n';
      out << "form = " << form_name(ch.reach.form) << '\n';
    }
    out << "relative_degree = " << ch.alphas.size() << '\n';
    write_list(out, "lambda", lambdas);
    write_list(out, "eta", etas);
    out << "weight = " << format_number(ch.weight) << '\n';
  }
  return out.str();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  auto same = [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) { return x.size() == y.size() && x == y; };
  auto same_alphas = [](const std::vector<ClassKappaPower>& x, const std::vector<ClassKappaPower>& y) {
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (x[i].lambda != y[i].lambda || x[i].eta != y[i].eta) return false;
    return true;
  };
  auto same_chain = [&](const ChainDecl& x, const ChainDecl& y) {
    if (x.id != y.id || x.tag != y.tag || x.weight != y.weight || !same_alphas(x.alphas, y.alphas)) return false;
    if (x.tag == ChainTag::kSafety)
      return same(x.center, y.center) && x.radius == y.radius && x.norm_order == y.norm_order && x.form == y.form;
    const ReachSpec& p = x.reach;
    const ReachSpec& q = y.reach;
    return same(p.center, q.center) && p.eps0 == q.eps0 && p.eps_d == q.eps_d && p.t_start == q.t_start &&
           p.t_reach == q.t_reach && p.t_remain == q.t_remain && p.norm_order == q.norm_order &&
           p.schedule == q.schedule && p.form == q.form && p.position_indices == q.position_indices;
  };
  if (a.name != b.name || a.model != b.model || !same(a.initial_state, b.initial_state) || a.t0 != b.t0 || a.dt != b.dt ||
      a.horizon != b.horizon || a.controller != b.controller || !same(a.input_box.lower, b.input_box.lower) ||
      !same(a.input_box.upper, b.input_box.upper) || a.policy != b.policy || a.audit_substep != b.audit_substep ||
      a.integrator_tolerance != b.integrator_tolerance)
    return false;
  const BoundSettings& x = a.bound;
  const BoundSettings& y = b.bound;
  if (x.nodes != y.nodes || x.safety_factor != y.safety_factor || x.lipschitz_samples != y.lipschitz_samples ||
      x.seed != y.seed || x.cache_fraction != y.cache_fraction || x.input_variation != y.input_variation ||
      x.candidates != y.candidates || x.certify_iterations != y.certify_iterations ||
      x.certify_margin != y.certify_margin)
    return false;
  if (a.chains.size() != b.chains.size()) return false;
  for (std::size_t i = 0; i < a.chains.size(); ++i)
    if (!same_chain(a.chains[i], b.chains[i])) return false;
  return true;
}

}  // namespace sacbf
