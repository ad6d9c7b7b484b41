// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "mero/harness.hpp"

using namespace mero::harness;

namespace
{

std::string LocationOf(const std::string &text)
{
  try
  {
    ParseConfig(text);
  }
  catch (const ConfigError &e)
  {
    return e.Location();
  }
  return "";
}

// Every tag the default suite is expected to emit, spelled out so that a
// catalog edit cannot silently drop one.
const std::vector<std::string> kInScopeTags = {
    "Eq1.1/ma",           "Eq1.2/riesz",         "Eq1.3/mg",
    "Eq.special/pencil",  "Eq3.10/argument",     "Quad/decay",
    "Def4.2/index",       "Eq4.9/integer",       "Eq4.11/additivity",
    "Eq4.12/inverse",     "Lem2.2/trace",        "Lem2.2/laurent",
    "Eq.coincide/index_ma",
    "Thm2.5/step",        "Thm2.6/factor",       "Eq2.35/monotone",
    "Eq2.40/p1",          "Eq2.41/nu_bounds",    "Eq2.42/simple_pole",
    "Eq2.31/nu_block",    "Eq3.6/partial",       "Thm3.4a/ma_nu",
    "Hyp5.1/probe",       "Eq5.4/K",             "Eq5.11ju/Kprime",
    "Thm5.2/resolvent",   "Eq5.9/second_resolvent", "Eq5.10f/inverse",
    "Lem5.3/5.11",        "Lem5.3/5.12",         "Thm5.4/5.16",
    "Thm5.4/5.17",        "Eq5.18/mg",           "Thm5.5/indi0",
    "Thm5.5/indiA",       "Thm5.5/indi",         "Thm5.5/indinu",
    "Def6.2/green",       "Def6.2/onto",         "Eq6.9/restrict",
    "Eq6.16/gamma",       "Eq6.18/weyl",         "Eq6.19/point_spectrum",
    "Eq6.20/krein",       "Lem6.3/triple",       "Lem6.3/mt",
    "Thm6.4/indi02",      "Thm6.4/indi2",        "Thm6.4/indinu2",
};

RunConfig SmallSuite(std::uint64_t seed)
{
  std::ostringstream os;
  os << R"({"seed": )" << seed << R"(, "scenarios": [)"
     << R"({"id": "m", "kind": "multiplicity", "instances": 3, "max_dim": 6},)"
     << R"({"id": "i", "kind": "index", "instances": 3},)"
     << R"({"id": "f", "kind": "factorize", "instances": 3},)"
     << R"({"id": "b", "kind": "birman_schwinger", "instances": 3, "max_dim": 6},)"
     << R"({"id": "d", "kind": "dual_pair", "sizes": [1, 2, 3], "thetas": 2}]})";
  return ParseConfig(os.str());
}

}  // namespace

TEST_CASE("config validation points at the offending field")
{
  CHECK(LocationOf(R"({"seed": 1, "nodes": 4, "scenarios": []})") == "/nodes");
  CHECK(LocationOf(R"({"seed": 1, "scenarios": [{"id": "a", "kind": "index", "bogus": 1}]})")
            .rfind("/scenarios/0", 0) == 0);
  CHECK(LocationOf(R"({"seed": 1, "extra": true, "scenarios": []})") == "/extra");
  CHECK(LocationOf(R"({"seed": 1, "tolerances": {"identity": 1.0}, "scenarios": []})") ==
        "/tolerances/identity");
  CHECK(LocationOf(R"({"seed": 1, "scenarios": [{"id": "a", "kind": "nope"}]})") ==
        "/scenarios/0/kind");
}

TEST_CASE("randomized scenarios need a seed")
{
  const std::string text = R"({"scenarios": [{"id": "a", "kind": "index"}]})";
  CHECK(LocationOf(text) == "/seed");
  CHECK(ParseConfig(text, 7).seed == 7u);
  CHECK_NOTHROW(ParseConfig(R"({"scenarios": [{"id": "c", "kind": "index",
                                               "control": "pole_on_contour"}]})"));
}

TEST_CASE("syntax errors report line and column")
{
  const std::string loc = LocationOf("{\n  \"seed\": 1,\n  \"scenarios\": [\n}");
  CHECK(loc.rfind("line 4", 0) == 0);
  CHECK(loc.find("column") != std::string::npos);
}

TEST_CASE("catalog order and content")
{
  const std::vector<ScenarioInfo> &cat = Catalog();
  std::vector<std::string> kinds;
  for (const ScenarioInfo &info : cat)
  {
    kinds.push_back(info.kind);
  }
  CHECK(kinds == std::vector<std::string>{"multiplicity", "index", "factorize",
                                          "birman_schwinger", "dual_pair", "full_suite"});
  const std::string text = CatalogText();
  CHECK(text.find("Thm3.4a/ma_nu") != std::string::npos);
  CHECK(text.find("Thm5.5/indi") != std::string::npos);
  CHECK(text.find("Thm6.4/indi2") != std::string::npos);
  CHECK(CatalogText() == text);
  CHECK(CatalogJson().find("\"zero_gamma\"") != std::string::npos);

  std::vector<std::string> sorted = SuiteTags();
  std::vector<std::string> expected = kInScopeTags;
  std::sort(sorted.begin(), sorted.end());
  std::sort(expected.begin(), expected.end());
  CHECK(sorted == expected);
}

TEST_CASE("csv has one row per value")
{
  CheckRecord a{"s", "Eq4.9/integer", "0", "00", {{"index", 2.0, std::nullopt}}, true, "", 0.0};
  CheckRecord b{"s", "Eq1.2/riesz", "1", "00", {{"idem", 1e-14, 1e-8}, {"trace", 3.0, {}}},
                false, "bad", 0.0};
  CheckRecord c{"s", "Harness/setup", "2", "00", {}, false, "setup", 0.0};
  const std::string csv = ReportCsv({a, b, c});
  std::istringstream in(csv);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);)
  {
    lines.push_back(line);
  }
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] == "scenario_id,tag,pass,value_name,value,tolerance,runtime_ms");
  CHECK(lines[1] == "s,Eq4.9/integer,true,index,2,,0");
  CHECK(lines[2].rfind("s,Eq1.2/riesz,false,idem,", 0) == 0);
  CHECK(lines[3] == "s,Eq1.2/riesz,false,trace,3,,0");
  CHECK(lines[4] == "s,Harness/setup,false,,,,0");
}

TEST_CASE("default suite emits every in-scope tag and passes")
{
  const RunConfig config = ParseConfig(
      R"({"seed": 11, "scenarios": [{"id": "suite", "kind": "full_suite"}]})");
  const std::vector<CheckRecord> records = RunScenarios(config, {1, false});
  std::set<std::string> emitted;
  for (const CheckRecord &r : records)
  {
    emitted.insert(r.tag);
    CHECK_MESSAGE(r.pass, r.scenario_id << " " << r.tag << " [" << r.instance << "] "
                                        << r.message);
  }
  const std::set<std::string> expected(kInScopeTags.begin(), kInScopeTags.end());
  std::vector<std::string> missing;
  std::set_difference(expected.begin(), expected.end(), emitted.begin(), emitted.end(),
                      std::back_inserter(missing));
  std::vector<std::string> unexpected;
  std::set_difference(emitted.begin(), emitted.end(), expected.begin(), expected.end(),
                      std::back_inserter(unexpected));
  CHECK(missing.empty());
  CHECK(unexpected.empty());
}

TEST_CASE("reports do not depend on the worker count")
{
  const RunConfig config = SmallSuite(31);
  const std::vector<CheckRecord> one = RunScenarios(config, {1, false});
  const std::vector<CheckRecord> three = RunScenarios(config, {3, false});
  CHECK(ReportJson(config, one) == ReportJson(config, three));
  CHECK(ReportCsv(one) == ReportCsv(three));
  CHECK(AllPass(one));

  const std::vector<CheckRecord> other = RunScenarios(SmallSuite(32), {1, false});
  CHECK(ReportCsv(one) != ReportCsv(other));
}

TEST_CASE("negative controls fail under their tag")
{
  const std::vector<std::pair<std::string, std::string>> controls = {
      {R"({"id": "c", "kind": "multiplicity", "control": "zero_on_contour"})", "Eq1.2/riesz"},
      {R"({"id": "c", "kind": "index", "control": "pole_on_contour"})", "Def4.2/index"},
      {R"({"id": "c", "kind": "dual_pair", "control": "zero_gamma"})", "Def6.2/green"},
      {R"({"id": "c", "kind": "dual_pair", "control": "multivalued_restriction"})",
       "Eq6.9/restrict"},
  };
  for (const auto &[scenario, tag] : controls)
  {
    CAPTURE(tag);
    const RunConfig config = ParseConfig(R"({"scenarios": [)" + scenario + "]}");
    const std::vector<CheckRecord> records = RunScenarios(config, {1, false});
    CHECK_FALSE(AllPass(records));
    const bool tagged = std::any_of(records.begin(), records.end(), [&](const CheckRecord &r) {
      return r.tag == tag && !r.pass;
    });
    CHECK(tagged);
  }
}
