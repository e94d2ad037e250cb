#include "chsys/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace chsys {

ConfigError::ConfigError(const std::string& what, std::optional<int> line, std::optional<int> column)
    : std::runtime_error(line ? what + " (line " + std::to_string(*line) + ", column " +
                                    std::to_string(column.value_or(0)) + ")"
                              : what),
      line_(line),
      column_(column) {}

std::string format_real(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) throw std::runtime_error("format_real failed");
  return std::string(buf, end);
}

namespace {

[[noreturn]] void fail(const YAML::Node& node, const std::string& msg) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) throw ConfigError(msg);
  throw ConfigError(msg, mark.line + 1, mark.column + 1);
}

void require_map(const YAML::Node& node, const std::string& where) {
  if (!node.IsMap()) fail(node, "'" + where + "' must be a mapping");
}

void reject_unknown(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  require_map(node, where);
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(kv.first, "unknown key '" + key + "' in " + where + " (expected one of: " + list + ")");
    }
  }
}

template <class T>
T scalar(const YAML::Node& node, const std::string& name) {
  if (!node.IsScalar()) fail(node, "'" + name + "' must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, "'" + name + "' has an invalid value '" + node.Scalar() + "'");
  }
}

template <class T>
void read(const YAML::Node& parent, const char* key, T& out, const std::string& where) {
  if (const YAML::Node n = parent[key]) out = scalar<T>(n, where + "." + key);
}

// Unsigned reads go through long long so that "-3" is an error rather than a wrap.
void read_count(const YAML::Node& parent, const char* key, std::size_t& out, const std::string& where) {
  if (const YAML::Node n = parent[key]) {
    const auto v = scalar<long long>(n, where + "." + key);
    if (v < 0) fail(n, "'" + where + "." + key + "' must be non-negative");
    out = static_cast<std::size_t>(v);
  }
}

InitSpec read_spec(const YAML::Node& node, const std::string& where) {
  InitSpec spec;
  if (!node || node.IsNull()) return spec;
  if (!node.IsSequence()) fail(node, "'" + where + "' must be a list of profile terms");
  for (std::size_t i = 0; i < node.size(); ++i) {
    const YAML::Node t = node[i];
    const std::string here = where + "[" + std::to_string(i) + "]";
    reject_unknown(t, here, {"family", "amplitude", "center", "width", "sign"});
    ProfileTerm term;
    if (const YAML::Node f = t["family"]) {
      const auto name = scalar<std::string>(f, here + ".family");
      const auto fam = parse_profile_family(name);
      if (!fam) fail(f, "unknown profile family '" + name + "' (gaussian, bump, mollified_peakon)");
      term.family = *fam;
    }
    read(t, "amplitude", term.amplitude, here);
    read(t, "center", term.center, here);
    read(t, "width", term.width, here);
    read(t, "sign", term.sign, here);
    if (term.sign != 1 && term.sign != -1) fail(t["sign"], "'" + here + ".sign' must be 1 or -1");
    spec.terms.push_back(term);
  }
  return spec;
}

RunConfig from_yaml(const YAML::Node& root) {
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  reject_unknown(root, "config", {"system", "grid", "integrator", "init", "characteristics", "outputs"});

  if (const YAML::Node s = root["system"]) {
    const auto name = scalar<std::string>(s, "system");
    const auto kind = parse_system_kind(name);
    if (!kind) fail(s, "unknown system '" + name + "' (A, B, cubic_ch)");
    cfg.system = *kind;
  }
  if (const YAML::Node g = root["grid"]) {
    reject_unknown(g, "grid", {"n_points", "L"});
    read_count(g, "n_points", cfg.grid.n_points, "grid");
    read(g, "L", cfg.grid.L, "grid");
  }
  if (const YAML::Node in = root["integrator"]) {
    reject_unknown(in, "integrator", {"t_end", "cfl", "dt_min", "field_cap", "sample_interval"});
    read(in, "t_end", cfg.integrator.t_end, "integrator");
    read(in, "cfl", cfg.integrator.cfl, "integrator");
    read(in, "dt_min", cfg.integrator.dt_min, "integrator");
    read(in, "field_cap", cfg.integrator.field_cap, "integrator");
    read(in, "sample_interval", cfg.integrator.sample_interval, "integrator");
  }
  if (const YAML::Node init = root["init"]) {
    reject_unknown(init, "init", {"m0", "n0"});
    cfg.init.m0 = read_spec(init["m0"], "init.m0");
    cfg.init.n0 = read_spec(init["n0"], "init.n0");
  }
  if (const YAML::Node ch = root["characteristics"]) {
    reject_unknown(ch, "characteristics", {"n_seeds", "extra_seeds"});
    read_count(ch, "n_seeds", cfg.characteristics.n_seeds, "characteristics");
    if (const YAML::Node e = ch["extra_seeds"]) {
      if (!e.IsSequence()) fail(e, "'characteristics.extra_seeds' must be a list");
      for (std::size_t i = 0; i < e.size(); ++i)
        cfg.characteristics.extra_seeds.push_back(scalar<double>(e[i], "characteristics.extra_seeds"));
    }
  }
  if (const YAML::Node o = root["outputs"]) {
    reject_unknown(o, "outputs", {"directory", "snapshot_every"});
    read(o, "directory", cfg.outputs.directory, "outputs");
    read_count(o, "snapshot_every", cfg.outputs.snapshot_every, "outputs");
  }
  return cfg;
}

YAML::Node load_yaml(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML parse error: " + e.msg, e.mark.line + 1, e.mark.column + 1);
  }
}

}  // namespace

void validate(const RunConfig& cfg) {
  try {
    cfg.integrator.validate();
    const GridPtr grid = make_grid(cfg.grid.n_points, cfg.grid.L);
    build_profile(grid, cfg.init.m0);
    build_profile(grid, cfg.init.n0);
    for (double x : cfg.characteristics.extra_seeds)
      if (!(x >= -cfg.grid.L && x < cfg.grid.L))
        throw std::invalid_argument("extra seed " + format_real(x) + " lies outside [-L, L)");
    if (cfg.outputs.directory.empty()) throw std::invalid_argument("outputs.directory is empty");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = from_yaml(load_yaml(text));
  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

void emit_spec(YAML::Emitter& out, const InitSpec& spec) {
  out << YAML::BeginSeq;
  for (const auto& t : spec.terms) {
    out << YAML::BeginMap;
    out << YAML::Key << "family" << YAML::Value << std::string(to_string(t.family));
    out << YAML::Key << "amplitude" << YAML::Value << format_real(t.amplitude);
    out << YAML::Key << "center" << YAML::Value << format_real(t.center);
    out << YAML::Key << "width" << YAML::Value << format_real(t.width);
    out << YAML::Key << "sign" << YAML::Value << t.sign;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "system" << YAML::Value << std::string(to_string(cfg.system));
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_points" << YAML::Value << cfg.grid.n_points;
  out << YAML::Key << "L" << YAML::Value << format_real(cfg.grid.L);
  out << YAML::EndMap;
  const auto& ic = cfg.integrator;
  out << YAML::Key << "integrator" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "t_end" << YAML::Value << format_real(ic.t_end);
  out << YAML::Key << "cfl" << YAML::Value << format_real(ic.cfl);
  out << YAML::Key << "dt_min" << YAML::Value << format_real(ic.dt_min);
  out << YAML::Key << "field_cap" << YAML::Value << format_real(ic.field_cap);
  out << YAML::Key << "sample_interval" << YAML::Value << format_real(ic.sample_interval);
  out << YAML::EndMap;
  out << YAML::Key << "init" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "m0" << YAML::Value;
  emit_spec(out, cfg.init.m0);
  out << YAML::Key << "n0" << YAML::Value;
  emit_spec(out, cfg.init.n0);
  out << YAML::EndMap;
  out << YAML::Key << "characteristics" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "n_seeds" << YAML::Value << cfg.characteristics.n_seeds;
  out << YAML::Key << "extra_seeds" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : cfg.characteristics.extra_seeds) out << format_real(x);
  out << YAML::EndSeq;
  out << YAML::EndMap;
  out << YAML::Key << "outputs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "directory" << YAML::Value << YAML::DoubleQuoted << cfg.outputs.directory;
  out << YAML::Key << "snapshot_every" << YAML::Value << cfg.outputs.snapshot_every;
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

RunConfig apply_overrides(const RunConfig& cfg, const std::vector<std::string>& assignments) {
  YAML::Node root = YAML::Load(serialize_config(cfg));
  for (const auto& a : assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + a + "' is not of the form key=value");
    const std::string path = a.substr(0, eq);
    const std::string value = a.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(path);
    for (std::string p; std::getline(ss, p, '.');) parts.push_back(p);

    // Walk with explicit node copies; yaml-cpp nodes are handles into the tree.
    YAML::Node node = root;
    std::vector<YAML::Node> chain{node};
    for (std::size_t i = 0; i < parts.size(); ++i) {
      YAML::Node cur = chain.back();
      const std::string& key = parts[i];
      const bool last = i + 1 == parts.size();
      YAML::Node next;
      if (cur.IsSequence()) {
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), idx);
        if (ec != std::errc() || ptr != key.data() + key.size() || idx > cur.size())
          throw ConfigError("override '" + a + "': bad list index '" + key + "'");
        if (idx == cur.size()) cur.push_back(YAML::Node(YAML::NodeType::Map));
        next = cur[idx];
      } else {
        if (!cur.IsMap()) throw ConfigError("override '" + a + "': '" + key + "' is not inside a section");
        if (!last && !cur[key]) throw ConfigError("override '" + a + "': unknown key '" + key + "'");
        next = cur[key];
      }
      if (last) {
        // Lists may be given inline: extra_seeds=[-4, 4].
        next = (!value.empty() && value.front() == '[') ? YAML::Load(value) : YAML::Node(value);
        if (cur.IsSequence()) cur[std::stoul(key)] = next;
        else cur[key] = next;
      }
      chain.push_back(next);
    }
  }
  std::stringstream out;
  out << root;
  return parse_config(out.str());
}

}  // namespace chsys
