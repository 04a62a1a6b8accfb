#include "ptsol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "ptsol/error.hpp"

namespace ptsol {
namespace {

std::string where(const YAML::Node& node, const std::string& source) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "command-line override";
  return source + ":" + std::to_string(mark.line + 1);
}

[[noreturn]] void fail(const YAML::Node& node, const std::string& source, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where(node, source) + ": " + what);
}

// One mapping of the document; tracks which keys were read so leftovers
// (typos) can be reported.
class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& source)
      : node_(std::move(node)), path_(std::move(path)), source_(source) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, source_, path_ + " must be a mapping");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node value = node_[key];
    if (!value) return;
    try {
      out = value.as<T>();
    } catch (const YAML::Exception&) {
      fail(value, source_, "cannot read " + dotted(key) + " as " + type_name<T>());
    }
  }

  void get_optional(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node value = node_[key];
    if (!value) return;
    if (value.IsNull()) {
      out.reset();
      return;
    }
    double v = 0.0;
    get(key, v);
    out = v;
  }

  Section child(const char* key) {
    seen_.insert(key);
    YAML::Node sub = node_ && node_.IsMap() ? node_[key] : YAML::Node();
    return Section(sub, dotted(key), source_);
  }

  void finish() const {
    if (!node_ || !node_.IsMap()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) fail(kv.first, source_, "unknown key '" + dotted(key.c_str()) + "'");
    }
  }

  const YAML::Node& node() const { return node_; }

 private:
  std::string dotted(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, bool>) return "a boolean";
    else if constexpr (std::is_integral_v<T>) return "an integer";
    else if constexpr (std::is_floating_point_v<T>) return "a number";
    else if constexpr (std::is_same_v<T, std::string>) return "a string";
    else return "a list of numbers";
  }

  YAML::Node node_;
  std::string path_;
  const std::string& source_;
  std::set<std::string> seen_;
};

Family parse_family(const std::string& text, const YAML::Node& node, const std::string& source) {
  if (text == "class_i") return Family::ClassI;
  if (text == "class_ii") return Family::ClassII;
  fail(node, source, "model.family must be class_i or class_ii, got '" + text + "'");
}

RunConfig from_node(const YAML::Node& root, const std::string& source) {
  RunConfig cfg;
  Section top(root, "", source);
  top.get("format_version", cfg.format_version);
  if (cfg.format_version != kConfigFormatVersion)
    fail(root["format_version"], source,
         "unsupported format_version " + std::to_string(cfg.format_version));

  {
    Section s = top.child("model");
    std::string family = to_string(cfg.model.family);
    s.get("family", family);
    cfg.model.family = parse_family(family, s.node()["family"], source);
    s.get("a", cfg.model.a);
    s.get("b", cfg.model.b);
    s.get("kappa", cfg.model.kappa);
    s.get_optional("phi0", cfg.model.phi0);
    s.get_optional("g1", cfg.model.g1);
    s.get_optional("g2", cfg.model.g2);
    s.get_optional("v1", cfg.model.v1);
    s.finish();
  }
  {
    Section s = top.child("grid");
    s.get("n", cfg.grid.n);
    s.get("half_width", cfg.grid.half_width);
    s.finish();
  }
  {
    Section s = top.child("spectrum");
    SpectrumOptions& o = cfg.spectrum;
    s.get("residual_tol", o.residual_tol);
    s.get("core_fraction", o.core_fraction);
    s.get("tail_threshold", o.tail_threshold);
    s.get("boundary_fraction", o.boundary_fraction);
    s.get("boundary_threshold", o.boundary_threshold);
    s.get("band_tol", o.band_tol);
    s.get("instab_rel", o.instab_rel);
    s.get("zero_rel", o.zero_rel);
    s.finish();
  }
  {
    Section s = top.child("sweep");
    SweepConfig& o = cfg.sweep;
    s.get("parameter", o.parameter);
    s.get("start", o.start);
    s.get("stop", o.stop);
    s.get("steps", o.steps);
    s.get("portrait_values", o.portrait_values);
    s.get("match_tol", o.match_tol);
    s.get("workers", o.workers);
    s.get("collision_tol", o.collision_tol);
    s.get("axis_tol", o.axis_tol);
    s.get("lookahead", o.lookahead);
    s.get("refine", o.refine);
    s.finish();
  }
  {
    Section s = top.child("propagation");
    PropagationConfig& o = cfg.propagation;
    s.get("z_end", o.z_end);
    s.get("dz", o.dz);
    s.get("sample_every", o.sample_every);
    s.get("noise", o.noise);
    s.get("blowup_factor", o.blowup_factor);
    s.get("check_step", o.check_step);
    s.get("step_tol", o.step_tol);
    s.get("max_halvings", o.max_halvings);
    s.get_optional("stop_deviation", o.stop_deviation);
    s.get("start_factor", o.start_factor);
    s.get("stop_fraction", o.stop_fraction);
    s.get("compare_spectrum", o.compare_spectrum);
    s.finish();
  }
  {
    Section s = top.child("output");
    s.get("dir", cfg.output.dir);
    s.get("plots", cfg.output.plots);
    s.finish();
  }
  top.get("seed", cfg.seed);
  top.finish();
  return cfg;
}

YAML::Node load_document(const std::string& text, const std::string& source) {
  try {
    YAML::Node root = YAML::Load(text);
    if (!root || root.IsNull()) return YAML::Node(YAML::NodeType::Map);
    return root;
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigError,
                source + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
}

// Copies a parsed override without source marks, so errors in it are
// reported as coming from the command line.
YAML::Node unmarked(const YAML::Node& node) {
  if (node.IsNull()) return YAML::Node(YAML::NodeType::Null);
  if (node.IsScalar()) return YAML::Node(node.Scalar());
  YAML::Node out(node.Type());
  if (node.IsSequence())
    for (const YAML::Node& item : node) out.push_back(unmarked(item));
  else
    for (const auto& kv : node) out[kv.first.Scalar()] = unmarked(kv.second);
  return out;
}

void apply_override(YAML::Node& root, const std::string& key, const std::string& value) {
  std::vector<std::string> parts;
  std::stringstream ss(key);
  for (std::string part; std::getline(ss, part, '.');) {
    if (part.empty()) throw Error(ErrorCode::ConfigError, "malformed override key '" + key + "'");
    parts.push_back(part);
  }
  if (parts.empty()) throw Error(ErrorCode::ConfigError, "empty override key");

  YAML::Node cur = root;
  for (std::size_t k = 0; k + 1 < parts.size(); ++k) {
    YAML::Node next = cur[parts[k]];
    if (!next || next.IsNull()) {
      cur[parts[k]] = YAML::Node(YAML::NodeType::Map);
      next.reset(cur[parts[k]]);
    }
    if (!next.IsMap())
      throw Error(ErrorCode::ConfigError, "override '" + key + "': '" + parts[k] + "' is not a section");
    cur.reset(next);
  }
  YAML::Node parsed;
  try {
    parsed = YAML::Load(value);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::ConfigError, "override '" + key + "': " + e.msg);
  }
  cur[parts.back()] = unmarked(parsed);
}

}  // namespace

RunConfig parse_config(const std::string& text, const std::string& source) {
  return from_node(load_document(text, source), source);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

RunConfig resolve_config(const std::string& text, const std::string& source,
                         const std::vector<std::pair<std::string, std::string>>& overrides) {
  YAML::Node root = load_document(text, source);
  if (!root.IsMap()) throw Error(ErrorCode::ConfigError, source + ": top level must be a mapping");
  for (const auto& [key, value] : overrides) apply_override(root, key, value);
  return from_node(root, source);
}

std::pair<std::string, std::string> split_override(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorCode::ConfigError, "override '" + arg + "' is not of the form key=value");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

namespace {

void emit_optional(YAML::Emitter& out, const char* key, const std::optional<double>& v) {
  out << YAML::Key << key << YAML::Value;
  if (v) out << *v;
  else out << YAML::Null;
}

}  // namespace

std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "format_version" << YAML::Value << c.format_version;

  out << YAML::Key << "model" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "family" << YAML::Value << to_string(c.model.family);
  out << YAML::Key << "a" << YAML::Value << c.model.a;
  out << YAML::Key << "b" << YAML::Value << c.model.b;
  out << YAML::Key << "kappa" << YAML::Value << c.model.kappa;
  emit_optional(out, "phi0", c.model.phi0);
  emit_optional(out, "g1", c.model.g1);
  emit_optional(out, "g2", c.model.g2);
  emit_optional(out, "v1", c.model.v1);
  out << YAML::EndMap;

  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n" << YAML::Value << c.grid.n;
  out << YAML::Key << "half_width" << YAML::Value << c.grid.half_width;
  out << YAML::EndMap;

  const SpectrumOptions& s = c.spectrum;
  out << YAML::Key << "spectrum" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "residual_tol" << YAML::Value << s.residual_tol;
  out << YAML::Key << "core_fraction" << YAML::Value << s.core_fraction;
  out << YAML::Key << "tail_threshold" << YAML::Value << s.tail_threshold;
  out << YAML::Key << "boundary_fraction" << YAML::Value << s.boundary_fraction;
  out << YAML::Key << "boundary_threshold" << YAML::Value << s.boundary_threshold;
  out << YAML::Key << "band_tol" << YAML::Value << s.band_tol;
  out << YAML::Key << "instab_rel" << YAML::Value << s.instab_rel;
  out << YAML::Key << "zero_rel" << YAML::Value << s.zero_rel;
  out << YAML::EndMap;

  const SweepConfig& w = c.sweep;
  out << YAML::Key << "sweep" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "parameter" << YAML::Value << w.parameter;
  out << YAML::Key << "start" << YAML::Value << w.start;
  out << YAML::Key << "stop" << YAML::Value << w.stop;
  out << YAML::Key << "steps" << YAML::Value << w.steps;
  out << YAML::Key << "portrait_values" << YAML::Value << YAML::Flow << w.portrait_values;
  out << YAML::Key << "match_tol" << YAML::Value << w.match_tol;
  out << YAML::Key << "workers" << YAML::Value << w.workers;
  out << YAML::Key << "collision_tol" << YAML::Value << w.collision_tol;
  out << YAML::Key << "axis_tol" << YAML::Value << w.axis_tol;
  out << YAML::Key << "lookahead" << YAML::Value << w.lookahead;
  out << YAML::Key << "refine" << YAML::Value << w.refine;
  out << YAML::EndMap;

  const PropagationConfig& p = c.propagation;
  out << YAML::Key << "propagation" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "z_end" << YAML::Value << p.z_end;
  out << YAML::Key << "dz" << YAML::Value << p.dz;
  out << YAML::Key << "sample_every" << YAML::Value << p.sample_every;
  out << YAML::Key << "noise" << YAML::Value << p.noise;
  out << YAML::Key << "blowup_factor" << YAML::Value << p.blowup_factor;
  out << YAML::Key << "check_step" << YAML::Value << p.check_step;
  out << YAML::Key << "step_tol" << YAML::Value << p.step_tol;
  out << YAML::Key << "max_halvings" << YAML::Value << p.max_halvings;
  emit_optional(out, "stop_deviation", p.stop_deviation);
  out << YAML::Key << "start_factor" << YAML::Value << p.start_factor;
  out << YAML::Key << "stop_fraction" << YAML::Value << p.stop_fraction;
  out << YAML::Key << "compare_spectrum" << YAML::Value << p.compare_spectrum;
  out << YAML::EndMap;

  out << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "dir" << YAML::Value << c.output.dir;
  out << YAML::Key << "plots" << YAML::Value << c.output.plots;
  out << YAML::EndMap;

  out << YAML::Key << "seed" << YAML::Value << c.seed;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

SweepOptions sweep_options(const RunConfig& config) {
  SweepOptions o;
  o.spectrum = config.spectrum;
  o.match_tol = config.sweep.match_tol;
  o.workers = config.sweep.workers;
  return o;
}

DetectionOptions detection_options(const RunConfig& config) {
  return {config.sweep.collision_tol, config.sweep.axis_tol, config.sweep.lookahead};
}

}  // namespace ptsol
