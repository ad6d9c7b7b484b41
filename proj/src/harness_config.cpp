// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mero/contour.hpp"
#include "mero/harness.hpp"

namespace mero::harness
{

using nlohmann::json;

namespace
{

struct KindName
{
  ScenarioKind kind;
  const char *name;
};

constexpr KindName kKinds[] = {
    {ScenarioKind::Multiplicity, "multiplicity"},
    {ScenarioKind::Index, "index"},
    {ScenarioKind::Factorize, "factorize"},
    {ScenarioKind::BirmanSchwinger, "birman_schwinger"},
    {ScenarioKind::DualPair, "dual_pair"},
    {ScenarioKind::FullSuite, "full_suite"},
};

std::string Pointer(const std::string &base, const std::string &key)
{
  return base + "/" + key;
}

std::string LineColumn(const std::string &text, std::size_t byte)
{
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i)
  {
    if (text[i] == '\n')
    {
      ++line;
      column = 1;
    }
    else
    {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

void RejectUnknown(const json &obj, const std::string &where, std::set<std::string> allowed)
{
  for (auto it = obj.begin(); it != obj.end(); ++it)
  {
    if (allowed.count(it.key()) == 0)
    {
      throw ConfigError(Pointer(where, it.key()), "unknown field");
    }
  }
}

const json &RequireObject(const json &v, const std::string &where)
{
  if (!v.is_object())
  {
    throw ConfigError(where, "expected an object");
  }
  return v;
}

int GetInt(const json &obj, const std::string &where, const char *key, int fallback, int lo,
           int hi)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  const json &v = obj.at(key);
  const std::string at = Pointer(where, key);
  if (!v.is_number_integer())
  {
    throw ConfigError(at, "expected an integer");
  }
  const auto x = v.get<long long>();
  if (x < lo || x > hi)
  {
    throw ConfigError(at, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  return static_cast<int>(x);
}

double GetDouble(const json &obj, const std::string &where, const char *key, double fallback,
                 double lo, double hi)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  const json &v = obj.at(key);
  const std::string at = Pointer(where, key);
  if (!v.is_number())
  {
    throw ConfigError(at, "expected a number");
  }
  const double x = v.get<double>();
  if (!(x >= lo && x <= hi))
  {
    std::ostringstream os;
    os << "must lie in [" << lo << ", " << hi << "]";
    throw ConfigError(at, os.str());
  }
  return x;
}

bool GetBool(const json &obj, const std::string &where, const char *key, bool fallback)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  if (!obj.at(key).is_boolean())
  {
    throw ConfigError(Pointer(where, key), "expected true or false");
  }
  return obj.at(key).get<bool>();
}

std::string GetString(const json &obj, const std::string &where, const char *key,
                      const std::string &fallback)
{
  if (!obj.contains(key))
  {
    return fallback;
  }
  if (!obj.at(key).is_string())
  {
    throw ConfigError(Pointer(where, key), "expected a string");
  }
  return obj.at(key).get<std::string>();
}

ScenarioKind ParseKind(const std::string &name, const std::string &where)
{
  for (const KindName &k : kKinds)
  {
    if (name == k.name)
    {
      return k.kind;
    }
  }
  throw ConfigError(where, "unknown scenario kind '" + name + "'");
}

const ScenarioInfo &InfoFor(ScenarioKind kind)
{
  for (const ScenarioInfo &info : Catalog())
  {
    if (info.kind == ToString(kind))
    {
      return info;
    }
  }
  throw ConfigError("", "no catalog entry for " + ToString(kind));
}

ScenarioConfig Defaults(ScenarioKind kind)
{
  ScenarioConfig s;
  s.kind = kind;
  switch (kind)
  {
    case ScenarioKind::Multiplicity:
      s.instances = 20;
      s.max_dim = 12;
      break;
    case ScenarioKind::Index:
      s.instances = 20;
      s.max_dim = 3;
      break;
    case ScenarioKind::Factorize:
      s.instances = 20;
      s.max_dim = 5;
      break;
    case ScenarioKind::BirmanSchwinger:
      s.instances = 20;
      s.max_dim = 12;
      s.max_rank = 4;
      break;
    case ScenarioKind::DualPair:
      s.instances = 1;
      s.sizes = {1, 2, 3, 4, 6, 8};
      s.thetas = 4;
      break;
    case ScenarioKind::FullSuite:
      break;
  }
  return s;
}

ScenarioConfig ParseScenario(const json &v, const std::string &where)
{
  RequireObject(v, where);
  RejectUnknown(v, where,
                {"id", "kind", "instances", "max_dim", "max_rank", "sizes", "thetas",
                 "complex_potential", "shared_fraction", "reference", "control"});
  if (!v.contains("kind"))
  {
    throw ConfigError(Pointer(where, "kind"), "missing required field");
  }
  if (!v.contains("id"))
  {
    throw ConfigError(Pointer(where, "id"), "missing required field");
  }
  ScenarioConfig s = Defaults(ParseKind(GetString(v, where, "kind", ""), Pointer(where, "kind")));
  s.id = GetString(v, where, "id", "");
  if (s.id.empty())
  {
    throw ConfigError(Pointer(where, "id"), "must not be empty");
  }
  s.instances = GetInt(v, where, "instances", s.instances, 0, 10000);
  s.max_dim = GetInt(v, where, "max_dim", s.max_dim, 1, 32);
  s.max_rank = GetInt(v, where, "max_rank", s.max_rank, 1, 8);
  s.thetas = GetInt(v, where, "thetas", s.thetas, 0, 500);
  s.complex_potential = GetBool(v, where, "complex_potential", s.complex_potential);
  s.shared_fraction = GetDouble(v, where, "shared_fraction", s.shared_fraction, 0.0, 1.0);
  s.reference = GetBool(v, where, "reference", s.reference);
  s.control = GetString(v, where, "control", "");
  if (v.contains("sizes"))
  {
    const std::string at = Pointer(where, "sizes");
    if (!v.at("sizes").is_array() || v.at("sizes").empty())
    {
      throw ConfigError(at, "expected a non-empty array of chain lengths");
    }
    s.sizes.clear();
    for (std::size_t i = 0; i < v.at("sizes").size(); ++i)
    {
      const json &e = v.at("sizes")[i];
      const std::string ei = Pointer(at, std::to_string(i));
      if (!e.is_number_integer() || e.get<long long>() < 1 || e.get<long long>() > 64)
      {
        throw ConfigError(ei, "chain length must be an integer in [1, 64]");
      }
      s.sizes.push_back(e.get<int>());
    }
  }
  if (s.kind == ScenarioKind::BirmanSchwinger && s.max_dim < 2)
  {
    throw ConfigError(Pointer(where, "max_dim"), "birman_schwinger needs max_dim >= 2");
  }
  if (!s.control.empty())
  {
    const std::vector<std::string> &allowed = InfoFor(s.kind).controls;
    if (std::find(allowed.begin(), allowed.end(), s.control) == allowed.end())
    {
      throw ConfigError(Pointer(where, "control"),
                        "control '" + s.control + "' is not available for " + ToString(s.kind));
    }
  }
  return s;
}

std::string FormatNumber(double v)
{
  if (std::isfinite(v) && v == std::floor(v) && std::abs(v) < 1e15)
  {
    return std::to_string(static_cast<long long>(v));
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string CsvField(const std::string &s)
{
  if (s.find_first_of(",\"\n") == std::string::npos)
  {
    return s;
  }
  std::string out = "\"";
  for (const char c : s)
  {
    out += c;
    if (c == '"')
    {
      out += '"';
    }
  }
  return out + "\"";
}

}  // namespace

std::string ToString(ScenarioKind kind)
{
  for (const KindName &k : kKinds)
  {
    if (k.kind == kind)
    {
      return k.name;
    }
  }
  return "unknown";
}

const std::vector<ToleranceBounds> &ToleranceLimits()
{
  static const std::vector<ToleranceBounds> limits = {
      {"identity", 1e-15, 1e-6},   {"green", 1e-15, 1e-8},      {"reconstruction", 1e-14, 1e-4},
      {"derivative", 1e-10, 1e-3}, {"projection", 1e-14, 1e-4},
  };
  return limits;
}

ConfigError::ConfigError(std::string location, const std::string &message)
    : std::runtime_error(location.empty() ? message : location + ": " + message),
      location_(std::move(location))
{
}

bool IsRandomized(const ScenarioConfig &s)
{
  return s.kind == ScenarioKind::FullSuite || (s.control.empty() && s.instances > 0);
}

RunConfig ParseConfig(const std::string &text, std::optional<std::uint64_t> seed_override)
{
  json root;
  try
  {
    root = json::parse(text);
  }
  catch (const json::parse_error &e)
  {
    throw ConfigError(LineColumn(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
  }
  RequireObject(root, "");
  RejectUnknown(root, "", {"seed", "nodes", "tolerances", "output", "scenarios"});

  RunConfig config;
  if (root.contains("seed"))
  {
    const json &seed = root.at("seed");
    if (!seed.is_number_unsigned())
    {
      throw ConfigError("/seed", "expected a non-negative 64-bit integer");
    }
    config.seed = seed.get<std::uint64_t>();
  }
  if (seed_override)
  {
    config.seed = seed_override;
  }
  config.nodes = GetInt(root, "", "nodes", config.nodes, kMinContourNodes, 65536);

  if (root.contains("tolerances"))
  {
    const json &t = RequireObject(root.at("tolerances"), "/tolerances");
    std::set<std::string> names;
    for (const ToleranceBounds &b : ToleranceLimits())
    {
      names.insert(b.name);
    }
    RejectUnknown(t, "/tolerances", names);
    double *slots[] = {&config.tol.identity, &config.tol.green, &config.tol.reconstruction,
                       &config.tol.derivative, &config.tol.projection};
    std::size_t i = 0;
    for (const ToleranceBounds &b : ToleranceLimits())
    {
      *slots[i] = GetDouble(t, "/tolerances", b.name, *slots[i], b.lo, b.hi);
      ++i;
    }
  }

  if (root.contains("output"))
  {
    const json &o = RequireObject(root.at("output"), "/output");
    RejectUnknown(o, "/output", {"path", "format"});
    if (o.contains("path"))
    {
      config.output_path = GetString(o, "/output", "path", "");
    }
    if (o.contains("format"))
    {
      const std::string f = GetString(o, "/output", "format", "");
      if (f != "json" && f != "csv")
      {
        throw ConfigError("/output/format", "expected \"json\" or \"csv\"");
      }
      config.output_format = f;
    }
  }

  if (!root.contains("scenarios"))
  {
    throw ConfigError("/scenarios", "missing required field");
  }
  const json &list = root.at("scenarios");
  if (!list.is_array() || list.empty())
  {
    throw ConfigError("/scenarios", "expected a non-empty array");
  }
  std::set<std::string> ids;
  for (std::size_t i = 0; i < list.size(); ++i)
  {
    const std::string where = "/scenarios/" + std::to_string(i);
    ScenarioConfig s = ParseScenario(list[i], where);
    if (!ids.insert(s.id).second)
    {
      throw ConfigError(where + "/id", "duplicate scenario id '" + s.id + "'");
    }
    if (IsRandomized(s) && !config.seed)
    {
      throw ConfigError("/seed", "scenario '" + s.id + "' is randomized and needs a seed");
    }
    config.scenarios.push_back(std::move(s));
  }
  return config;
}

RunConfig LoadConfig(const std::string &path, std::optional<std::uint64_t> seed_override)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError(path, "cannot read config file");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), seed_override);
}

std::vector<ScenarioConfig> ExpandScenarios(const std::vector<ScenarioConfig> &scenarios)
{
  std::vector<ScenarioConfig> out;
  for (const ScenarioConfig &s : scenarios)
  {
    if (s.kind != ScenarioKind::FullSuite)
    {
      out.push_back(s);
      continue;
    }
    for (const ScenarioKind k : {ScenarioKind::Multiplicity, ScenarioKind::Index,
                                 ScenarioKind::Factorize, ScenarioKind::BirmanSchwinger,
                                 ScenarioKind::DualPair})
    {
      ScenarioConfig part = Defaults(k);
      part.id = s.id + "." + ToString(k);
      part.reference = s.reference;
      out.push_back(std::move(part));
    }
  }
  return out;
}

bool AllPass(const std::vector<CheckRecord> &records)
{
  for (const CheckRecord &r : records)
  {
    if (!r.pass)
    {
      return false;
    }
  }
  return true;
}

std::string ReportJson(const RunConfig &config, const std::vector<CheckRecord> &records)
{
  json checks = json::array();
  std::size_t failed = 0;
  std::set<std::string> tags;
  for (const CheckRecord &r : records)
  {
    json values = json::array();
    for (const CheckValue &v : r.values)
    {
      json e = {{"name", v.name}, {"value", v.value}};
      if (v.tolerance)
      {
        e["tolerance"] = *v.tolerance;
      }
      values.push_back(std::move(e));
    }
    json c = {{"scenario_id", r.scenario_id}, {"tag", r.tag},
              {"instance", r.instance},       {"inputs_digest", r.inputs_digest},
              {"pass", r.pass},               {"values", std::move(values)},
              {"runtime_ms", r.runtime_ms}};
    if (!r.message.empty())
    {
      c["message"] = r.message;
    }
    checks.push_back(std::move(c));
    failed += r.pass ? 0 : 1;
    tags.insert(r.tag);
  }
  json tol = {{"identity", config.tol.identity},
              {"green", config.tol.green},
              {"reconstruction", config.tol.reconstruction},
              {"derivative", config.tol.derivative},
              {"projection", config.tol.projection}};
  json scenario_ids = json::array();
  for (const ScenarioConfig &s : config.scenarios)
  {
    scenario_ids.push_back(s.id);
  }
  json root = {{"report_version", 1},
               {"seed", config.seed ? json(*config.seed) : json(nullptr)},
               {"nodes", config.nodes},
               {"tolerances", tol},
               {"scenarios", scenario_ids},
               {"summary",
                {{"checks", records.size()},
                 {"failed", failed},
                 {"pass", failed == 0},
                 {"tags", std::vector<std::string>(tags.begin(), tags.end())}}},
               {"checks", std::move(checks)}};
  return root.dump(2) + "\n";
}

std::string ReportCsv(const std::vector<CheckRecord> &records)
{
  std::string out = "scenario_id,tag,pass,value_name,value,tolerance,runtime_ms\n";
  for (const CheckRecord &r : records)
  {
    const std::string head = CsvField(r.scenario_id) + "," + CsvField(r.tag) + "," +
                             (r.pass ? "true" : "false") + ",";
    const std::string tail = "," + FormatNumber(r.runtime_ms) + "\n";
    if (r.values.empty())
    {
      out += head + ",," + tail;
      continue;
    }
    for (const CheckValue &v : r.values)
    {
      out += head + CsvField(v.name) + "," + FormatNumber(v.value) + "," +
             (v.tolerance ? FormatNumber(*v.tolerance) : std::string()) + tail;
    }
  }
  return out;
}

void Digest::Add(const void *data, std::size_t size)
{
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t i = 0; i < size; ++i)
  {
    state_ ^= p[i];
    state_ *= 0x100000001b3ULL;
  }
}

std::string Digest::Hex() const
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
  return buf;
}

}  // namespace mero::harness
