#pragma once

#include <optional>
#include <string>

#include "vhi/contact.hpp"
#include "vhi/problem.hpp"
#include "vhi/stepper.hpp"

namespace vhi {

/// Abstract-mode scenario: a dense problem on R^dim with Gram inner product,
/// affine A(t,u) = a u + a_shift, load f(t) = f_const + t f_slope, state
/// pairing phi~(z,u,v) = <z,v>, and a kernel history operator
///   (S u)(t) = scale * integral_0^t e^{-rate (t-s)} G u(s) ds
/// (rate = 0 gives the running integral). An optional coordinate box bounds
/// the admissible set; otherwise K is the whole space.
struct AbstractScenario {
  enum class History { none, integral, exponential };

  int dim = 1;
  Mat gram;  // dim x dim SPD
  Mat a;     // dim x dim
  Vec a_shift;
  Vec f_const;
  Vec f_slope;
  History history = History::none;
  double history_scale = 1.0;
  double history_rate = 1.0;
  std::optional<Vec> box_lower;
  std::optional<Vec> box_upper;
};

/// Contact-mode scenario: rectangle mesh plus material and contact constants.
/// The memory kernel is b(t) = memory_scale * e^{-memory_rate t}; scale 0
/// disables the term. g may be +inf (no velocity bound).
struct ContactScenario {
  double width = 2.0, height = 1.0;
  int nx = 8, ny = 4;
  bool contact_bottom = true;
  double theta = 2.0, zeta = 1.0, lambda = 1.0, mu = 1.0;
  Material::Flow flow = Material::Flow::perzyna;
  double relax = 0.5;
  double c_p = 1.0;
  double g = 0.02;
  double memory_scale = 0.0;
  double memory_rate = 1.0;
  double friction_bound = 1.0;
  Vec2 f0 = Vec2::Zero();
  Vec2 f2 = Vec2::Zero();
  bool clamp_normal = false;

  Material material() const;
  ContactData contact_data() const;
};

/// Parsed and validated scenario file. The file format is sectioned
/// key-value plaintext: `[section]` headers, `key = value` entries, `#`
/// comments. Every key is schema-checked; unknown sections or keys are
/// rejected with their line number.
struct ScenarioConfig {
  enum class Mode { abstract, contact };

  Mode mode = Mode::abstract;
  TimeGrid grid;
  SteppingMode solver_mode = SteppingMode::marching;
  double tolerance = 1e-10;
  int max_sweeps = 200;
  std::string out_dir = "out";
  bool write_fields = true;
  bool write_trace = true;
  AbstractScenario abstract;  // mode == abstract
  ContactScenario contact;    // mode == contact
};

/// Parses a scenario from text. Throws ConfigError carrying "line N" and the
/// offending section.key for every syntax, schema, or range violation.
ScenarioConfig parse_config(const std::string& text);

/// Reads and parses a scenario file; parse errors are prefixed with the path.
ScenarioConfig load_config(const std::string& path);

/// Canonical serialization: sections and keys in schema order, defaults
/// materialized, numbers printed with 17 significant digits so that
/// parse(serialize(c)) reproduces c exactly.
std::string serialize_config(const ScenarioConfig& config);

/// Builds the abstract-mode problem (validated). ConfigError on contact mode.
VHIProblem build_abstract(const ScenarioConfig& config);

/// Assembles the contact-mode system. ConfigError on abstract mode.
ContactSystem build_contact(const ScenarioConfig& config);

}  // namespace vhi
