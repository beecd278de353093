#include "pspin/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace pspin::cli {

using json = nlohmann::json;

namespace {

constexpr std::pair<Command, const char*> kCommands[] = {
    {Command::coeffs, "coeffs"},   {Command::meanfield, "meanfield"},
    {Command::fixed_points, "fixed-points"}, {Command::sample, "sample"},
    {Command::exact, "exact"},     {Command::compare, "compare"},
    {Command::verify, "verify"},   {Command::density, "density"},
};

// Reads the keys of one JSON object and rejects whatever is left unread.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) {
      throw InvalidArgument(path_, "must be an object");
    }
  }

  std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    seen_.insert(key);
    const auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number() || !std::isfinite(v->get<double>())) {
        throw InvalidArgument(key_path(key), "must be a finite number");
      }
      out = v->get<double>();
    }
  }

  bool integer(const std::string& key, int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer() || v->get<long long>() < std::numeric_limits<int>::min() ||
          v->get<long long>() > std::numeric_limits<int>::max()) {
        throw InvalidArgument(key_path(key), "must be an integer");
      }
      out = static_cast<int>(v->get<long long>());
      return true;
    }
    return false;
  }

  void unsigned64(const std::string& key, std::uint64_t& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_unsigned()) {
        throw InvalidArgument(key_path(key), "must be a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) {
        throw InvalidArgument(key_path(key), "must be true or false");
      }
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) {
        throw InvalidArgument(key_path(key), "must be a string");
      }
      out = v->get<std::string>();
    }
  }

  void vector3(const std::string& key, Vec3& out) {
    if (const json* v = find(key)) {
      if (!v->is_array() || v->size() != 3 ||
          !std::all_of(v->begin(), v->end(), [](const json& e) { return e.is_number(); })) {
        throw InvalidArgument(key_path(key), "must be an array of three numbers");
      }
      out = Vec3((*v)[0].get<double>(), (*v)[1].get<double>(), (*v)[2].get<double>());
      if (!out.allFinite()) {
        throw InvalidArgument(key_path(key), "must be finite");
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) {
        throw InvalidArgument(key_path(key), "unknown key");
      }
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) {
    throw InvalidArgument(key, what);
  }
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (const auto& [cmd, text] : kCommands) {
    if (name == text) {
      return cmd;
    }
  }
  return std::nullopt;
}

const char* to_string(Command c) noexcept {
  for (const auto& [cmd, text] : kCommands) {
    if (cmd == c) {
      return text;
    }
  }
  return "unknown";
}

SdeMode RunConfig::sde_mode() const {
  if (sim.mode == "sphere") return SdeMode::sphere;
  if (sim.mode == "ball") return SdeMode::ball;
  return model.collective_only() ? SdeMode::sphere : SdeMode::ball;
}

Basis RunConfig::exact_basis() const {
  if (sim.basis == "collective") return Basis::collective;
  if (sim.basis == "full") return Basis::full;
  return model.collective_only() ? Basis::collective : Basis::full;
}

SdeConfig RunConfig::sde_config() const {
  SdeConfig c;
  c.dt = sim.dt;
  c.t_final = sim.t_final;
  c.n_output_times = sim.n_output_times;
  c.n_traj = sim.n_traj;
  c.seed = sim.seed;
  c.mode = sde_mode();
  c.pole_epsilon = sim.pole_epsilon;
  c.force = sim.force;
  c.threads = sim.threads;
  return c;
}

nlohmann::ordered_json RunConfig::echo() const {
  nlohmann::ordered_json out;
  out["model"] = {{"N", model.N},
                  {"B", {model.B.x(), model.B.y(), model.B.z()}},
                  {"kappa_plus", model.kappa_plus},
                  {"kappa_minus", model.kappa_minus},
                  {"kappa_z", model.kappa_z},
                  {"gamma_plus", model.gamma_plus},
                  {"gamma_minus", model.gamma_minus},
                  {"gamma_z", model.gamma_z},
                  {"rate_unit", rate_unit}};
  out["sim"] = {{"dt", sim.dt},
                {"t_final", sim.t_final},
                {"n_output_times", sim.n_output_times},
                {"n_traj", sim.n_traj},
                {"seed", sim.seed},
                {"mode", sim.mode},
                {"basis", sim.basis},
                {"force", sim.force},
                {"pole_epsilon", sim.pole_epsilon},
                {"adaptive", sim.adaptive}};
  if (initial.type == InitialSection::Type::coherent) {
    out["initial"] = {{"type", "coherent"}, {"r", {initial.r.x, initial.r.y, initial.r.z}}};
  } else {
    out["initial"] = {{"type", "samples"}, {"path", initial.path.generic_string()}};
  }
  out["meanfield"] = {{"n_seeds", meanfield.n_seeds}, {"portrait_seeds", meanfield.portrait_seeds}};
  out["verify"] = {{"n_params", verify.n_params},
                   {"n_points", verify.n_points},
                   {"max_N", verify.max_N},
                   {"tolerance", verify.tolerance}};
  out["density"] = {{"n_eta", density.n_eta},
                    {"n_phi", density.n_phi},
                    {"N_values", density.N_values}};
  return out;
}

void validate(const RunConfig& c) {
  try {
    c.model.validate();
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("model." + e.field(), e.what());
  }
  require(c.sim.dt >= 0.0, "sim.dt", "must be >= 0 (0 selects the default)");
  require(c.sim.t_final > 0.0, "sim.t_final", "must be positive");
  require(c.sim.n_output_times >= 2, "sim.n_output_times", "must be >= 2");
  const bool from_file = c.initial.type == InitialSection::Type::samples && c.sim.n_traj == 0;
  require(c.sim.n_traj >= 1 || from_file, "sim.n_traj", "must be >= 1");
  require(c.sim.threads >= 0, "sim.threads", "must be >= 0");
  require(c.sim.pole_epsilon >= 1e-9 && c.sim.pole_epsilon < 0.5, "sim.pole_epsilon",
          "must lie in [1e-9, 0.5)");
  require(c.sim.mode == "auto" || c.sim.mode == "sphere" || c.sim.mode == "ball", "sim.mode",
          "must be sphere, ball or auto");
  require(c.sim.basis == "auto" || c.sim.basis == "collective" || c.sim.basis == "full",
          "sim.basis", "must be collective, full or auto");
  if (c.initial.type == InitialSection::Type::coherent) {
    require(c.initial.r.norm() <= 1.0 + kBallTolerance, "initial.r", "must satisfy |r| <= 1");
  }
  require(c.meanfield.n_seeds >= 1, "meanfield.n_seeds", "must be >= 1");
  require(c.meanfield.portrait_seeds >= 0, "meanfield.portrait_seeds", "must be >= 0");
  require(c.verify.n_params >= 1, "verify.n_params", "must be >= 1");
  require(c.verify.n_points >= 1, "verify.n_points", "must be >= 1");
  require(c.verify.max_N >= 1 && c.verify.max_N <= 6, "verify.max_N", "must lie in [1, 6]");
  require(c.verify.tolerance > 0.0, "verify.tolerance", "must be positive");
  require(c.density.n_eta >= 1, "density.n_eta", "must be >= 1");
  require(c.density.n_phi >= 1, "density.n_phi", "must be >= 1");
  for (int n : c.density.N_values) {
    require(n >= 1, "density.N_values", "entries must be >= 1");
  }
}

RunConfig parse_config(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config", std::string("JSON syntax error: ") + e.what());
  }
  RunConfig c;
  Section top(root, "");
  bool n_traj_given = false;

  if (const json* node = top.find("model")) {
    Section s(*node, "model");
    s.integer("N", c.model.N);
    s.vector3("B", c.model.B);
    s.number("kappa_plus", c.model.kappa_plus);
    s.number("kappa_minus", c.model.kappa_minus);
    s.number("kappa_z", c.model.kappa_z);
    s.number("gamma_plus", c.model.gamma_plus);
    s.number("gamma_minus", c.model.gamma_minus);
    s.number("gamma_z", c.model.gamma_z);
    s.string("rate_unit", c.rate_unit);
    s.finish();
  } else {
    throw InvalidArgument("model", "missing section");
  }
  if (const json* node = top.find("sim")) {
    Section s(*node, "sim");
    s.number("dt", c.sim.dt);
    s.number("t_final", c.sim.t_final);
    s.integer("n_output_times", c.sim.n_output_times);
    n_traj_given = s.integer("n_traj", c.sim.n_traj);
    s.unsigned64("seed", c.sim.seed);
    s.string("mode", c.sim.mode);
    s.string("basis", c.sim.basis);
    s.boolean("force", c.sim.force);
    s.integer("threads", c.sim.threads);
    s.number("pole_epsilon", c.sim.pole_epsilon);
    s.boolean("adaptive", c.sim.adaptive);
    s.finish();
  }
  if (const json* node = top.find("initial")) {
    Section s(*node, "initial");
    std::string type = "coherent";
    s.string("type", type);
    if (type == "coherent") {
      Vec3 r = c.initial.r.vec();
      s.vector3("r", r);
      c.initial.r = BlochVector::from(r);
    } else if (type == "samples") {
      std::string path;
      s.string("path", path);
      require(!path.empty(), "initial.path", "required for sample-file initial states");
      c.initial.type = InitialSection::Type::samples;
      c.initial.path = path;
    } else {
      throw InvalidArgument("initial.type", "must be coherent or samples");
    }
    s.finish();
  }
  if (const json* node = top.find("output")) {
    Section s(*node, "output");
    std::string dir = c.output.directory.string();
    s.string("directory", dir);
    c.output.directory = dir;
    if (const json* f = s.find("formats")) {
      require(f->is_array(), "output.formats", "must be an array of strings");
      c.output.svg = c.output.json = false;
      for (const json& e : *f) {
        require(e.is_string(), "output.formats", "must be an array of strings");
        const auto name = e.get<std::string>();
        if (name == "svg") {
          c.output.svg = true;
        } else if (name == "json") {
          c.output.json = true;
        } else {
          require(name == "csv", "output.formats", "unknown format '" + name + "'");
        }
      }
    }
    s.finish();
  }
  if (const json* node = top.find("meanfield")) {
    Section s(*node, "meanfield");
    s.integer("n_seeds", c.meanfield.n_seeds);
    s.integer("portrait_seeds", c.meanfield.portrait_seeds);
    s.finish();
  }
  if (const json* node = top.find("verify")) {
    Section s(*node, "verify");
    s.integer("n_params", c.verify.n_params);
    s.integer("n_points", c.verify.n_points);
    s.integer("max_N", c.verify.max_N);
    s.number("tolerance", c.verify.tolerance);
    s.finish();
  }
  if (const json* node = top.find("density")) {
    Section s(*node, "density");
    s.integer("n_eta", c.density.n_eta);
    s.integer("n_phi", c.density.n_phi);
    if (const json* v = s.find("N_values")) {
      require(v->is_array(), "density.N_values", "must be an array of integers");
      for (const json& e : *v) {
        require(e.is_number_integer(), "density.N_values", "must be an array of integers");
        c.density.N_values.push_back(e.get<int>());
      }
    }
    s.finish();
  }
  top.finish();

  if (c.initial.type == InitialSection::Type::samples && !n_traj_given) {
    c.sim.n_traj = 0;  // taken from the sample file at run time
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::vector<SphericalPoint> load_samples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot read sample file " + path.string());
  }
  std::vector<SphericalPoint> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') {
      continue;
    }
    for (char& ch : line) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream row(line);
    SphericalPoint p;
    if (!(row >> p.eta >> p.phi)) {
      if (out.empty()) {
        continue;  // header row
      }
      throw InvalidArgument("initial.path", "malformed row at line " + std::to_string(line_no));
    }
    if (!(row >> p.r)) {
      p.r = 1.0;
    }
    out.push_back(p);
  }
  if (out.empty()) {
    throw InvalidArgument("initial.path", "sample file holds no samples");
  }
  return out;
}

}  // namespace pspin::cli
