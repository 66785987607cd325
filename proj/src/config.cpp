#include "unemap/config.hpp"

#include <cstdlib>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "unemap/text_io.hpp"

namespace unemap {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"run", {"seed"}},
      {"input", {"path", "schema", "delimiter"}},
      {"synthetic", {"n"}},
      {"coding", {"AGEC", "CTINDMOY", "DURC", "HAR", "PPARC"}},
      {"som",
       {"rows", "cols", "mode", "epochs", "radius_start", "radius_end", "learning_rate_start",
        "learning_rate_end", "decay", "init"}},
      {"cluster", {"k", "occupancy_weights"}},
      {"mca", {"variables", "axes", "planes"}},
      {"transitions", {"threshold_registration_to_exit", "threshold_exit_to_registration"}},
      {"output", {"dir", "svg"}},
  };
  return keys;
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& field) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(field, '.'));
    if (!v) return std::nullopt;
    return std::string(text::trim(*v));
  }

  template <typename F>
  void with(const std::string& field, F&& f) const {
    if (auto v = raw(field)) f(*v);
  }

  double number(const std::string& field, const std::string& v) const {
    auto d = text::parse_double(v);
    if (!d) throw ConfigError(field, "expected a number, got '" + v + "'");
    return *d;
  }

  std::size_t count(const std::string& field, const std::string& v) const {
    auto i = text::parse_int(v);
    if (!i || *i < 0) throw ConfigError(field, "expected a non-negative integer, got '" + v + "'");
    return static_cast<std::size_t>(*i);
  }

  bool flag(const std::string& field, const std::string& v) const {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    throw ConfigError(field, "expected true or false, got '" + v + "'");
  }

 private:
  const pt::ptree& tree_;
};

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  for (auto& f : text::split_fields(v, ',')) {
    auto t = std::string(text::trim(f));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

std::string join_bounds(const std::vector<double>& bounds) {
  std::vector<std::string> parts;
  for (double b : bounds) parts.push_back(text::format_double(b));
  return text::join(parts, ',');
}

}  // namespace

void PipelineConfig::validate() const {
  if (input.has_value() == synthetic.has_value())
    throw ConfigError("input", "exactly one of [input] path and [synthetic] must be set");
  if (input && input->path.empty()) throw ConfigError("input.path", "must not be empty");
  if (synthetic && synthetic->n < 2) throw ConfigError("synthetic.n", "must be at least 2");
  if (grid.rows < 1 || grid.cols < 1) throw ConfigError("som.rows", "grid must be at least 1x1");
  if (grid.units() < 2) throw ConfigError("som.cols", "grid needs at least 2 units");
  try {
    schedule.validate();
  } catch (const Error& e) {
    throw ConfigError("som", e.what());
  }
  if (k < 1 || k > grid.units())
    throw ConfigError("cluster.k", "must lie in 1.." + std::to_string(grid.units()));
  if (mca_variables.empty()) throw ConfigError("mca.variables", "must list at least one variable");
  std::set<Qual> seen(mca_variables.begin(), mca_variables.end());
  if (seen.size() != mca_variables.size()) throw ConfigError("mca.variables", "duplicate variable");
  if (mca_axes < 1) throw ConfigError("mca.axes", "must be at least 1");
  for (const auto& [a, b] : mca_planes)
    if (a < 1 || b < 1 || a > mca_axes || b > mca_axes)
      throw ConfigError("mca.planes", "axis outside 1.." + std::to_string(mca_axes));
  for (auto [field, v] : {std::pair{"transitions.threshold_registration_to_exit",
                                    threshold_registration_to_exit},
                          std::pair{"transitions.threshold_exit_to_registration",
                                    threshold_exit_to_registration}})
    if (!(v >= 0.0 && v <= 100.0)) throw ConfigError(field, "must lie in [0, 100]");
  if (output_dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

std::string PipelineConfig::canonical() const {
  std::ostringstream o;
  o << "[run]\nseed = " << seed << "\n";
  if (input) {
    o << "\n[input]\npath = " << input->path.generic_string() << "\n";
    if (input->schema) o << "schema = " << input->schema->generic_string() << "\n";
    o << "delimiter = " << input->delimiter << "\n";
  }
  if (synthetic) o << "\n[synthetic]\nn = " << synthetic->n << "\n";
  o << "\n[coding]\n";
  for (Qual q : {Qual::AGEC, Qual::CTINDMOY, Qual::DURC, Qual::HAR, Qual::PPARC})
    o << name_of(q) << " = " << join_bounds(coding.binning(q).bounds) << "\n";
  o << "\n[som]\nrows = " << grid.rows << "\ncols = " << grid.cols
    << "\nmode = " << name_of(schedule.mode) << "\nepochs = " << schedule.epochs
    << "\nradius_start = " << text::format_double(schedule.radius_start)
    << "\nradius_end = " << text::format_double(schedule.radius_end)
    << "\nlearning_rate_start = " << text::format_double(schedule.learning_rate_start)
    << "\nlearning_rate_end = " << text::format_double(schedule.learning_rate_end)
    << "\ndecay = " << name_of(schedule.decay) << "\ninit = " << name_of(init) << "\n";
  o << "\n[cluster]\nk = " << k << "\noccupancy_weights = " << (occupancy_weights ? "true" : "false")
    << "\n";
  std::vector<std::string> vars;
  for (Qual q : mca_variables) vars.emplace_back(name_of(q));
  std::vector<std::string> planes;
  for (const auto& [a, b] : mca_planes) planes.push_back(std::to_string(a) + "-" + std::to_string(b));
  o << "\n[mca]\nvariables = " << text::join(vars, ',') << "\naxes = " << mca_axes
    << "\nplanes = " << text::join(planes, ',') << "\n";
  o << "\n[transitions]\nthreshold_registration_to_exit = "
    << text::format_double(threshold_registration_to_exit)
    << "\nthreshold_exit_to_registration = " << text::format_double(threshold_exit_to_registration)
    << "\n";
  o << "\n[output]\ndir = " << output_dir.generic_string() << "\nsvg = " << (svg ? "true" : "false")
    << "\n";
  return o.str();
}

PipelineConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  // read_ini drops sections that have no keys
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const auto t = text::trim(line);
    if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
      const std::string name(text::trim(t.substr(1, t.size() - 2)));
      if (!tree.get_child_optional(pt::ptree::path_type(name, '\0'))) tree.push_back({name, pt::ptree{}});
    }
  }

  for (const auto& [section, body] : tree) {
    auto it = known_keys().find(section);
    if (it == known_keys().end()) throw ConfigError(section, "unknown section");
    if (!body.data().empty() && body.empty())
      throw ConfigError(section, "key outside any section");
    for (const auto& [key, _] : body)
      if (!it->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
  }

  Reader r(tree);
  PipelineConfig c;
  r.with("run.seed", [&](const std::string& v) {
    auto i = text::parse_int(v);
    if (!i || *i < 0) throw ConfigError("run.seed", "expected a non-negative integer");
    c.seed = static_cast<std::uint64_t>(*i);
  });

  if (tree.get_child_optional("input")) {
    InputConfig in_cfg;
    r.with("input.path", [&](const std::string& v) { in_cfg.path = v; });
    if (in_cfg.path.empty()) throw ConfigError("input.path", "required in [input]");
    if (in_cfg.path.is_relative() && !base_dir.empty()) in_cfg.path = base_dir / in_cfg.path;
    r.with("input.schema", [&](const std::string& v) {
      std::filesystem::path p = v;
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      in_cfg.schema = p;
    });
    r.with("input.delimiter", [&](const std::string& v) {
      if (v == "tab" || v == "\\t")
        in_cfg.delimiter = '\t';
      else if (v.size() == 1)
        in_cfg.delimiter = v[0];
      else
        throw ConfigError("input.delimiter", "expected one character or 'tab'");
    });
    c.input = in_cfg;
  }
  if (tree.get_child_optional("synthetic")) {
    SyntheticConfig s;
    r.with("synthetic.n", [&](const std::string& v) { s.n = r.count("synthetic.n", v); });
    c.synthetic = s;
  }

  for (Qual q : {Qual::AGEC, Qual::CTINDMOY, Qual::DURC, Qual::HAR, Qual::PPARC}) {
    const std::string field = "coding." + std::string(name_of(q));
    r.with(field, [&](const std::string& v) {
      std::vector<double> bounds;
      for (const auto& part : split_list(v)) bounds.push_back(r.number(field, part));
      if (bounds.empty()) throw ConfigError(field, "needs at least one bound");
      for (std::size_t i = 0; i < bounds.size(); ++i)
        if (bounds[i] < 0 || (i > 0 && !(bounds[i] > bounds[i - 1])))
          throw ConfigError(field, "bounds must be non-negative and strictly increasing");
      auto& b = c.coding.binning(q);
      b = Binning::make(b.source, bounds, b.zero_category);
    });
  }

  r.with("som.rows", [&](const std::string& v) { c.grid.rows = r.count("som.rows", v); });
  r.with("som.cols", [&](const std::string& v) { c.grid.cols = r.count("som.cols", v); });
  r.with("som.epochs", [&](const std::string& v) { c.schedule.epochs = r.count("som.epochs", v); });
  auto enum_field = [&](const std::string& field, auto parse, auto& target) {
    r.with(field, [&](const std::string& v) {
      try {
        target = parse(v);
      } catch (const Error& e) {
        throw ConfigError(field, e.what());
      }
    });
  };
  enum_field("som.mode", training_mode_from_name, c.schedule.mode);
  enum_field("som.decay", decay_from_name, c.schedule.decay);
  enum_field("som.init", init_strategy_from_name, c.init);
  for (auto [field, target] : {std::pair{"som.radius_start", &c.schedule.radius_start},
                               std::pair{"som.radius_end", &c.schedule.radius_end},
                               std::pair{"som.learning_rate_start", &c.schedule.learning_rate_start},
                               std::pair{"som.learning_rate_end", &c.schedule.learning_rate_end},
                               std::pair{"transitions.threshold_registration_to_exit",
                                         &c.threshold_registration_to_exit},
                               std::pair{"transitions.threshold_exit_to_registration",
                                         &c.threshold_exit_to_registration}}) {
    const std::string f = field;
    r.with(f, [&](const std::string& v) { *target = r.number(f, v); });
  }

  r.with("cluster.k", [&](const std::string& v) { c.k = r.count("cluster.k", v); });
  r.with("cluster.occupancy_weights",
         [&](const std::string& v) { c.occupancy_weights = r.flag("cluster.occupancy_weights", v); });

  r.with("mca.variables", [&](const std::string& v) {
    c.mca_variables.clear();
    for (const auto& name : split_list(v)) {
      auto q = qual_from_name(name);
      if (!q) throw ConfigError("mca.variables", "unknown variable '" + name + "'");
      c.mca_variables.push_back(*q);
    }
  });
  r.with("mca.axes", [&](const std::string& v) { c.mca_axes = r.count("mca.axes", v); });
  r.with("mca.planes", [&](const std::string& v) {
    c.mca_planes.clear();
    for (const auto& p : split_list(v)) {
      const auto dash = p.find('-');
      if (dash == std::string::npos) throw ConfigError("mca.planes", "expected pairs like 1-2");
      c.mca_planes.emplace_back(r.count("mca.planes", p.substr(0, dash)),
                                r.count("mca.planes", p.substr(dash + 1)));
    }
  });

  r.with("output.dir", [&](const std::string& v) { c.output_dir = v; });
  r.with("output.svg", [&](const std::string& v) { c.svg = r.flag("output.svg", v); });

  c.validate();
  return c;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = text::read_file(path);
  } catch (const std::exception& e) {
    throw ConfigError("config", e.what());
  }
  auto c = parse_config(text, path.parent_path());
  return c;
}

void apply_environment(PipelineConfig& config) {
  if (const char* dir = std::getenv("UNEMAP_OUTPUT_DIR"); dir && *dir) config.output_dir = dir;
  if (const char* seed = std::getenv("UNEMAP_SEED"); seed && *seed) {
    auto i = text::parse_int(seed);
    if (!i || *i < 0) throw ConfigError("UNEMAP_SEED", "expected a non-negative integer");
    config.seed = static_cast<std::uint64_t>(*i);
  }
}

}  // namespace unemap
