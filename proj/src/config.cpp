#include "vhi/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace vhi {

namespace {

struct RawEntry {
  std::string value;
  int line = 0;
};

struct RawSection {
  int line = 0;
  std::map<std::string, RawEntry> entries;
};

using RawConfig = std::map<std::string, RawSection>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(int line, const std::string& where, const std::string& what) {
  throw ConfigError("line " + std::to_string(line) + ": " + where + ": " + what, where);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineno, line, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) fail(lineno, line, "empty section name");
      if (raw.count(name))
        fail(lineno, "[" + name + "]",
             "duplicate section (first opened at line " + std::to_string(raw[name].line) + ")");
      raw[name].line = lineno;
      section = name;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, line, "expected 'key = value'");
    if (section.empty()) fail(lineno, line, "entry before any [section] header");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(lineno, line, "empty key");
    if (value.empty()) fail(lineno, "[" + section + "] " + key, "empty value");
    auto& entries = raw[section].entries;
    if (entries.count(key))
      fail(lineno, "[" + section + "] " + key,
           "duplicate key (first set at line " + std::to_string(entries[key].line) + ")");
    entries[key] = RawEntry{value, lineno};
  }
  return raw;
}

double parse_double(const std::string& s, int line, const std::string& where,
                    bool allow_inf = false) {
  double v = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) fail(line, where, "not a number: '" + s + "'");
  if (std::isnan(v)) fail(line, where, "must not be NaN");
  if (!allow_inf && std::isinf(v)) fail(line, where, "must be finite");
  return v;
}

int parse_int(const std::string& s, int line, const std::string& where) {
  int v = 0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  const auto res = std::from_chars(begin, end, v);
  if (res.ec != std::errc{} || res.ptr != end) fail(line, where, "not an integer: '" + s + "'");
  return v;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

/// Typed, consuming view of one raw section; finish() rejects whatever the
/// schema did not ask for, naming the line.
class SectionReader {
public:
  SectionReader(RawConfig& raw, std::string name) : name_(std::move(name)) {
    if (const auto it = raw.find(name_); it != raw.end()) {
      owned_ = std::move(it->second);
      section_ = &owned_;
      line_ = owned_.line;
      raw.erase(it);  // consumed; leftovers are unknown sections
    }
  }

  bool present() const { return section_ != nullptr; }

  std::string get_string(const std::string& key, const std::string& fallback) {
    const auto e = take(key);
    return e ? e->value : fallback;
  }

  double get_double(const std::string& key, double fallback, bool allow_inf = false) {
    const auto e = take(key);
    if (!e) return fallback;
    return parse_double(e->value, e->line, where(key), allow_inf);
  }

  int get_int(const std::string& key, int fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    return parse_int(e->value, e->line, where(key));
  }

  bool get_bool(const std::string& key, bool fallback) {
    const auto e = take(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(e->line, where(key), "expected true or false, got '" + e->value + "'");
  }

  /// Empty fallback marks the key required.
  std::string get_choice(const std::string& key, const std::vector<std::string>& choices,
                         const std::string& fallback) {
    const auto e = take(key);
    if (!e && fallback.empty()) fail(line_, where(key), "missing required key");
    const std::string v = e ? e->value : fallback;
    for (const auto& c : choices)
      if (v == c) return v;
    std::string list;
    for (const auto& c : choices) list += (list.empty() ? "" : ", ") + c;
    fail(e ? e->line : line_, where(key), "expected one of {" + list + "}, got '" + v + "'");
  }

  Vec get_vec(const std::string& key, int length, const Vec& fallback, bool allow_inf = false) {
    const auto e = take(key);
    if (!e) return fallback;
    return parse_vec(*e, key, length, allow_inf);
  }

  std::optional<Vec> get_vec_optional(const std::string& key, int length,
                                      bool allow_inf = false) {
    const auto e = take(key);
    if (!e) return std::nullopt;
    return parse_vec(*e, key, length, allow_inf);
  }

  /// Line of the last entry fetched for `key`, or the section header line.
  int line_of(const std::string& key) const {
    const auto it = lines_.find(key);
    return it == lines_.end() ? line_ : it->second;
  }

  [[noreturn]] void reject(const std::string& key, const std::string& what) const {
    fail(line_of(key), where(key), what);
  }

  void finish() {
    if (!section_) return;
    if (!section_->entries.empty()) {
      const auto& [key, entry] = *section_->entries.begin();
      fail(entry.line, where(key), "unknown key");
    }
  }

private:
  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  std::optional<RawEntry> take(const std::string& key) {
    if (!section_) return std::nullopt;
    const auto it = section_->entries.find(key);
    if (it == section_->entries.end()) return std::nullopt;
    RawEntry entry = it->second;
    lines_[key] = entry.line;
    section_->entries.erase(it);
    return entry;
  }

  std::string name_;
  RawSection* section_ = nullptr;
  RawSection owned_;
  std::map<std::string, int> lines_;
  int line_ = 0;

  Vec parse_vec(const RawEntry& e, const std::string& key, int length, bool allow_inf) {
    const auto toks = split_ws(e.value);
    if (static_cast<int>(toks.size()) != length)
      fail(e.line, where(key),
           "expected " + std::to_string(length) + " values, got " + std::to_string(toks.size()));
    Vec v(length);
    for (int i = 0; i < length; ++i)
      v[i] = parse_double(toks[i], e.line, where(key), allow_inf);
    return v;
  }
};

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_vec(const Vec& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt17(v[i]);
  }
  return out;
}

std::string fmt_mat(const Mat& m) {
  std::string out;
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      if (r + c) out += ' ';
      out += fmt17(m(r, c));
    }
  return out;
}

void read_abstract(SectionReader& sec, AbstractScenario& a) {
  a.dim = sec.get_int("dim", 0);
  if (a.dim < 1) sec.reject("dim", "must be a positive integer");
  const int d = a.dim;
  const Vec mat_fallback = Eigen::Map<const Vec>(Mat(Mat::Identity(d, d)).data(), d * d);
  const Vec id_flat = mat_fallback;
  const auto as_matrix = [d](const Vec& flat) {
    Mat m(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) m(r, c) = flat[r * d + c];
    return m;
  };
  a.gram = as_matrix(sec.get_vec("gram", d * d, id_flat));
  const auto a_entries = sec.get_vec_optional("a", d * d);
  if (!a_entries) sec.reject("a", "required in abstract mode (row-major dim*dim entries)");
  a.a = as_matrix(*a_entries);
  a.a_shift = sec.get_vec("a_shift", d, Vec::Zero(d));
  a.f_const = sec.get_vec("f_const", d, Vec::Zero(d));
  a.f_slope = sec.get_vec("f_slope", d, Vec::Zero(d));
  const std::string h = sec.get_choice("history", {"none", "integral", "exponential"}, "none");
  a.history = h == "none"       ? AbstractScenario::History::none
              : h == "integral" ? AbstractScenario::History::integral
                                : AbstractScenario::History::exponential;
  a.history_scale = sec.get_double("history_scale", 1.0);
  a.history_rate = sec.get_double("history_rate", 1.0);
  if (a.history_rate < 0.0) sec.reject("history_rate", "must be nonnegative");
  a.box_lower = sec.get_vec_optional("box_lower", d, /*allow_inf=*/true);
  a.box_upper = sec.get_vec_optional("box_upper", d, /*allow_inf=*/true);
  if (a.box_lower.has_value() != a.box_upper.has_value())
    sec.reject(a.box_lower ? "box_lower" : "box_upper",
               "box_lower and box_upper must be given together");
  if (a.box_lower)
    for (int i = 0; i < d; ++i)
      if (!((*a.box_lower)[i] <= (*a.box_upper)[i]))
        sec.reject("box_upper", "component " + std::to_string(i) + " lies below box_lower");
}

void read_mesh(SectionReader& sec, ContactScenario& c) {
  c.width = sec.get_double("width", 0.0);
  c.height = sec.get_double("height", 0.0);
  if (!(c.width > 0.0)) sec.reject("width", "must be positive");
  if (!(c.height > 0.0)) sec.reject("height", "must be positive");
  c.nx = sec.get_int("nx", 0);
  c.ny = sec.get_int("ny", 0);
  if (c.nx < 1) sec.reject("nx", "must be a positive integer");
  if (c.ny < 1) sec.reject("ny", "must be a positive integer");
  c.contact_bottom = sec.get_bool("contact", true);
}

void read_material(SectionReader& sec, ContactScenario& c) {
  c.theta = sec.get_double("theta", c.theta);
  c.zeta = sec.get_double("zeta", c.zeta);
  c.lambda = sec.get_double("lambda", c.lambda);
  c.mu = sec.get_double("mu", c.mu);
  if (!(c.theta > 0.0)) sec.reject("theta", "must be positive");
  if (c.zeta < 0.0) sec.reject("zeta", "must be nonnegative");
  if (c.lambda < 0.0) sec.reject("lambda", "must be nonnegative");
  if (c.mu < 0.0) sec.reject("mu", "must be nonnegative");
  const std::string f = sec.get_choice("flow", {"none", "perzyna", "linear"}, "perzyna");
  c.flow = f == "none"      ? Material::Flow::none
           : f == "perzyna" ? Material::Flow::perzyna
                            : Material::Flow::linear;
  c.relax = sec.get_double("relax", c.relax);
  if (c.relax < 0.0) sec.reject("relax", "must be nonnegative");
}

void read_contact(SectionReader& sec, ContactScenario& c) {
  c.c_p = sec.get_double("c_p", c.c_p);
  if (c.c_p < 0.0) sec.reject("c_p", "must be nonnegative");
  c.g = sec.get_double("g", c.g, /*allow_inf=*/true);
  if (!(c.g > 0.0)) sec.reject("g", "must be positive (inf disables the bound)");
  c.memory_scale = sec.get_double("memory_scale", c.memory_scale);
  if (c.memory_scale < 0.0) sec.reject("memory_scale", "must be nonnegative");
  c.memory_rate = sec.get_double("memory_rate", c.memory_rate);
  if (c.memory_rate < 0.0) sec.reject("memory_rate", "must be nonnegative");
  c.friction_bound = sec.get_double("friction_bound", c.friction_bound);
  if (c.friction_bound < 0.0) sec.reject("friction_bound", "must be nonnegative");
  const Vec f0 = sec.get_vec("f0", 2, Vec::Zero(2));
  const Vec f2 = sec.get_vec("f2", 2, Vec::Zero(2));
  c.f0 = Vec2(f0[0], f0[1]);
  c.f2 = Vec2(f2[0], f2[1]);
  c.clamp_normal = sec.get_bool("clamp_normal", false);
}

}  // namespace

Material ContactScenario::material() const {
  Material m;
  m.theta = theta;
  m.zeta = zeta;
  m.lambda = lambda;
  m.mu = mu;
  m.flow = flow;
  m.relax = relax;
  return m;
}

ContactData ContactScenario::contact_data() const {
  ContactData d;
  d.c_p = c_p;
  d.g = g;
  if (memory_scale != 0.0) {
    const double scale = memory_scale, rate = memory_rate;
    d.memory_kernel = [scale, rate](double t) { return scale * std::exp(-rate * t); };
  }
  d.friction_bound = friction_bound;
  d.f0 = f0;
  d.f2 = f2;
  d.clamp_normal = clamp_normal;
  return d;
}

ScenarioConfig parse_config(const std::string& text) {
  RawConfig raw = tokenize(text);
  ScenarioConfig cfg;

  SectionReader problem(raw, "problem");
  if (!problem.present()) throw ConfigError("missing [problem] section", "problem");
  const std::string mode = problem.get_choice("mode", {"abstract", "contact"}, "");
  cfg.mode = mode == "abstract" ? ScenarioConfig::Mode::abstract : ScenarioConfig::Mode::contact;
  problem.finish();

  SectionReader grid(raw, "grid");
  if (!grid.present()) throw ConfigError("missing [grid] section", "grid");
  const double horizon = grid.get_double("horizon", 0.0);
  if (!(horizon > 0.0)) grid.reject("horizon", "must be positive");
  const int steps = grid.get_int("steps", 0);
  if (steps < 1) grid.reject("steps", "must be a positive integer");
  cfg.grid = TimeGrid(horizon, steps);
  grid.finish();

  SectionReader solver(raw, "solver");
  const std::string smode = solver.get_choice("mode", {"marching", "fixed-point"}, "marching");
  cfg.solver_mode = smode == "marching" ? SteppingMode::marching : SteppingMode::fixed_point;
  cfg.tolerance = solver.get_double("tolerance", 1e-10);
  if (!(cfg.tolerance > 0.0)) solver.reject("tolerance", "must be positive");
  cfg.max_sweeps = solver.get_int("max_sweeps", 200);
  if (cfg.max_sweeps < 1) solver.reject("max_sweeps", "must be a positive integer");
  solver.finish();

  SectionReader output(raw, "output");
  cfg.out_dir = output.get_string("directory", "out");
  cfg.write_fields = output.get_bool("fields", true);
  cfg.write_trace = output.get_bool("trace", true);
  output.finish();

  if (cfg.mode == ScenarioConfig::Mode::abstract) {
    SectionReader abs(raw, "abstract");
    if (!abs.present()) throw ConfigError("missing [abstract] section", "abstract");
    read_abstract(abs, cfg.abstract);
    abs.finish();
  } else {
    SectionReader mesh(raw, "mesh");
    if (!mesh.present()) throw ConfigError("missing [mesh] section", "mesh");
    read_mesh(mesh, cfg.contact);
    mesh.finish();
    SectionReader material(raw, "material");
    read_material(material, cfg.contact);
    material.finish();
    SectionReader contact(raw, "contact");
    read_contact(contact, cfg.contact);
    contact.finish();
  }

  if (!raw.empty()) {
    const auto& [name, section] = *raw.begin();
    const bool contact_only = name == "mesh" || name == "material" || name == "contact";
    const bool abstract_only = name == "abstract";
    std::string what = "unknown section";
    if (contact_only) what = "section applies to contact mode only";
    if (abstract_only) what = "section applies to abstract mode only";
    fail(section.line, "[" + name + "]", what);
  }
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path, path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.field());
  }
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream out;
  out << "[problem]\n";
  out << "mode = " << (cfg.mode == ScenarioConfig::Mode::abstract ? "abstract" : "contact")
      << "\n\n";
  out << "[grid]\n";
  out << "horizon = " << fmt17(cfg.grid.horizon) << "\n";
  out << "steps = " << cfg.grid.steps << "\n\n";
  out << "[solver]\n";
  out << "mode = " << (cfg.solver_mode == SteppingMode::marching ? "marching" : "fixed-point")
      << "\n";
  out << "tolerance = " << fmt17(cfg.tolerance) << "\n";
  out << "max_sweeps = " << cfg.max_sweeps << "\n\n";
  out << "[output]\n";
  out << "directory = " << cfg.out_dir << "\n";
  out << "fields = " << (cfg.write_fields ? "true" : "false") << "\n";
  out << "trace = " << (cfg.write_trace ? "true" : "false") << "\n\n";
  if (cfg.mode == ScenarioConfig::Mode::abstract) {
    const AbstractScenario& a = cfg.abstract;
    out << "[abstract]\n";
    out << "dim = " << a.dim << "\n";
    out << "gram = " << fmt_mat(a.gram) << "\n";
    out << "a = " << fmt_mat(a.a) << "\n";
    out << "a_shift = " << fmt_vec(a.a_shift) << "\n";
    out << "f_const = " << fmt_vec(a.f_const) << "\n";
    out << "f_slope = " << fmt_vec(a.f_slope) << "\n";
    const char* h = a.history == AbstractScenario::History::none       ? "none"
                    : a.history == AbstractScenario::History::integral ? "integral"
                                                                       : "exponential";
    out << "history = " << h << "\n";
    out << "history_scale = " << fmt17(a.history_scale) << "\n";
    out << "history_rate = " << fmt17(a.history_rate) << "\n";
    if (a.box_lower) {
      out << "box_lower = " << fmt_vec(*a.box_lower) << "\n";
      out << "box_upper = " << fmt_vec(*a.box_upper) << "\n";
    }
  } else {
    const ContactScenario& c = cfg.contact;
    out << "[mesh]\n";
    out << "width = " << fmt17(c.width) << "\n";
    out << "height = " << fmt17(c.height) << "\n";
    out << "nx = " << c.nx << "\n";
    out << "ny = " << c.ny << "\n";
    out << "contact = " << (c.contact_bottom ? "true" : "false") << "\n\n";
    out << "[material]\n";
    out << "theta = " << fmt17(c.theta) << "\n";
    out << "zeta = " << fmt17(c.zeta) << "\n";
    out << "lambda = " << fmt17(c.lambda) << "\n";
    out << "mu = " << fmt17(c.mu) << "\n";
    const char* f = c.flow == Material::Flow::none      ? "none"
                    : c.flow == Material::Flow::perzyna ? "perzyna"
                                                        : "linear";
    out << "flow = " << f << "\n";
    out << "relax = " << fmt17(c.relax) << "\n\n";
    out << "[contact]\n";
    out << "c_p = " << fmt17(c.c_p) << "\n";
    out << "g = " << fmt17(c.g) << "\n";
    out << "memory_scale = " << fmt17(c.memory_scale) << "\n";
    out << "memory_rate = " << fmt17(c.memory_rate) << "\n";
    out << "friction_bound = " << fmt17(c.friction_bound) << "\n";
    out << "f0 = " << fmt17(c.f0.x()) << ' ' << fmt17(c.f0.y()) << "\n";
    out << "f2 = " << fmt17(c.f2.x()) << ' ' << fmt17(c.f2.y()) << "\n";
    out << "clamp_normal = " << (c.clamp_normal ? "true" : "false") << "\n";
  }
  return out.str();
}

VHIProblem build_abstract(const ScenarioConfig& cfg) {
  if (cfg.mode != ScenarioConfig::Mode::abstract)
    throw ConfigError("build_abstract requires mode = abstract", "problem.mode");
  const AbstractScenario& a = cfg.abstract;
  InnerProductSpace space(a.gram);
  const int d = a.dim;

  MonotoneOperatorA::ShiftFn shift;
  if (a.a_shift.squaredNorm() > 0.0) {
    const Vec s = a.a_shift;
    shift = [s](double) { return s; };
  }
  MonotoneOperatorA A = MonotoneOperatorA::affine(space, a.a, shift);

  ConstraintSet K =
      a.box_lower ? ConstraintSet::box(*a.box_lower, *a.box_upper) : ConstraintSet::whole_space(d);

  HistoryOperator S = HistoryOperator::zero();
  ConvexBifunction phi = ConvexBifunction::zero();
  if (a.history != AbstractScenario::History::none) {
    const double scale = a.history_scale;
    const double rate = a.history == AbstractScenario::History::integral ? 0.0 : a.history_rate;
    const Mat gram = a.gram;
    S = HistoryOperator::volterra(
        [scale, rate, gram](double t, double s, const Vec& u) -> Vec {
          return scale * std::exp(-rate * (t - s)) * (gram * u);
        },
        std::abs(scale));
    phi = ConvexBifunction::pairing();
  }

  std::vector<Vec> f(cfg.grid.node_count());
  for (int n = 0; n < cfg.grid.node_count(); ++n)
    f[n] = a.f_const + cfg.grid.node(n) * a.f_slope;

  VHIProblem problem{std::move(space),
                     InnerProductSpace(a.gram),
                     cfg.grid,
                     std::move(K),
                     std::move(A),
                     std::move(phi),
                     NonsmoothFunctional::zero(),
                     CompactMap::identity(d),
                     std::move(S),
                     std::move(f)};
  problem.validate();
  return problem;
}

ContactSystem build_contact(const ScenarioConfig& cfg) {
  if (cfg.mode != ScenarioConfig::Mode::contact)
    throw ConfigError("build_contact requires mode = contact", "problem.mode");
  const ContactScenario& c = cfg.contact;
  Mesh mesh = build_mesh(c.width, c.height, c.nx, c.ny, c.contact_bottom);
  return assemble_problem(std::move(mesh), c.material(), c.contact_data(), cfg.grid);
}

}  // namespace vhi
