// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace mero::harness
{

enum class ScenarioKind
{
  Multiplicity,
  Index,
  Factorize,
  BirmanSchwinger,
  DualPair,
  FullSuite,
};

std::string ToString(ScenarioKind kind);

// Pass thresholds. Each has documented bounds enforced at parse time.
struct Tolerances
{
  double identity = 1e-10;        // relative residual of resolvent/Weyl/Krein identities
  double green = 1e-12;           // Green identity residual
  double reconstruction = 1e-8;   // factorization and series reconstruction
  double derivative = 1e-6;       // stored derivative vs finite difference
  double projection = 1e-8;       // Riesz idempotency and trace-order agreement
};

struct ToleranceBounds
{
  const char *name;
  double lo;
  double hi;
};

const std::vector<ToleranceBounds> &ToleranceLimits();

struct ScenarioConfig
{
  std::string id;
  ScenarioKind kind = ScenarioKind::FullSuite;
  int instances = 10;
  int max_dim = 8;
  int max_rank = 3;
  std::vector<int> sizes;  // dual_pair chain lengths
  int thetas = 4;          // dual_pair: random theta per chain
  bool complex_potential = true;
  double shared_fraction = 0.3;  // birman_schwinger: share an eigenvalue of H0
  bool reference = true;         // include the hand-derived cases
  std::string control;           // negative control name, empty for none
};

struct RunConfig
{
  std::optional<std::uint64_t> seed;
  int nodes = 256;
  Tolerances tol;
  std::vector<ScenarioConfig> scenarios;
  std::optional<std::string> output_path;
  std::optional<std::string> output_format;
};

// Malformed or invalid configuration. `Location()` is a JSON pointer to the
// offending field or "line L, column C" for syntax errors.
class ConfigError : public std::runtime_error
{
public:
  ConfigError(std::string location, const std::string &message);
  const std::string &Location() const noexcept { return location_; }

private:
  std::string location_;
};

// `seed_override` replaces the config seed before the seed requirement is
// checked.
RunConfig ParseConfig(const std::string &text,
                      std::optional<std::uint64_t> seed_override = std::nullopt);
RunConfig LoadConfig(const std::string &path,
                     std::optional<std::uint64_t> seed_override = std::nullopt);

// True for every kind that draws random instances.
bool IsRandomized(const ScenarioConfig &s);

// Scenarios with `full_suite` replaced by their component scenarios.
std::vector<ScenarioConfig> ExpandScenarios(const std::vector<ScenarioConfig> &scenarios);

struct CheckValue
{
  std::string name;
  double value = 0.0;
  std::optional<double> tolerance;  // residuals carry one, exact integers do not
};

struct CheckRecord
{
  std::string scenario_id;
  std::string tag;
  std::string instance;
  std::string inputs_digest;
  std::vector<CheckValue> values;
  bool pass = true;
  std::string message;
  double runtime_ms = 0.0;
};

struct RunOptions
{
  int jobs = 1;
  bool timing = false;  // off keeps reports bit-identical
};

// Runs every scenario. Records come back in scenario order, then instance
// order, independent of `jobs`.
std::vector<CheckRecord> RunScenarios(const RunConfig &config, const RunOptions &options);

bool AllPass(const std::vector<CheckRecord> &records);

std::string ReportJson(const RunConfig &config, const std::vector<CheckRecord> &records);
std::string ReportCsv(const std::vector<CheckRecord> &records);

struct ScenarioInfo
{
  std::string kind;
  std::string summary;
  std::vector<std::string> parameters;
  std::vector<std::string> controls;
  std::vector<std::string> tags;
};

const std::vector<ScenarioInfo> &Catalog();
std::string CatalogText();
std::string CatalogJson();

// Tags a default full_suite run must emit.
const std::vector<std::string> &SuiteTags();

// 64-bit FNV-1a.
class Digest
{
public:
  void Add(const void *data, std::size_t size);
  void Add(const std::string &s) { Add(s.data(), s.size()); }
  void Add(double v) { Add(&v, sizeof v); }
  void Add(std::uint64_t v) { Add(&v, sizeof v); }
  std::uint64_t Value() const noexcept { return state_; }
  std::string Hex() const;

private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

}  // namespace mero::harness
