// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "mero/harness.hpp"

namespace fs = std::filesystem;
using namespace mero::harness;

namespace
{

constexpr int kExitPass = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;

std::string DefaultOutput(const std::string &config_path, const std::string &format)
{
  const std::string name = fs::path(config_path).stem().string() + ".report." + format;
  const char *dir = std::getenv("MERO_REPORT_DIR");
  if (dir != nullptr && *dir != '\0')
  {
    return (fs::path(dir) / name).string();
  }
  return name;
}

int Run(const std::string &config_path, std::string out, std::string format,
        std::optional<std::uint64_t> seed, int jobs, bool timing)
{
  RunConfig config;
  try
  {
    config = LoadConfig(config_path, seed);
  }
  catch (const ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitError;
  }
  if (format.empty())
  {
    format = config.output_format.value_or("json");
  }
  if (out.empty())
  {
    out = config.output_path.value_or(DefaultOutput(config_path, format));
  }

  const std::vector<CheckRecord> records = RunScenarios(config, {jobs, timing});
  const std::string report = format == "csv" ? ReportCsv(records) : ReportJson(config, records);
  if (out == "-")
  {
    std::cout << report;
  }
  else
  {
    std::ofstream file(out, std::ios::binary);
    file << report;
    file.close();
    if (!file)
    {
      std::cerr << "cannot write report to " << out << "\n";
      return kExitError;
    }
  }

  std::size_t failed = 0;
  for (const CheckRecord &r : records)
  {
    if (!r.pass)
    {
      if (failed < 20)
      {
        std::cerr << "FAIL " << r.scenario_id << " " << r.tag << " [" << r.instance << "] "
                  << r.message << "\n";
      }
      ++failed;
    }
  }
  std::cerr << records.size() << " checks, " << failed << " failed";
  if (out != "-")
  {
    std::cerr << ", report: " << out;
  }
  std::cerr << "\n";
  return failed == 0 ? kExitPass : kExitCheckFailed;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Verification harness for meromorphic matrix functions"};
  app.require_subcommand(1);

  CLI::App *run = app.add_subcommand("run", "run the scenarios of a config file");
  std::string config_path;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool timing = false;
  run->add_option("config", config_path, "scenario config (JSON)")->required();
  run->add_option("--out", out, "report path, '-' for stdout");
  run->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
  run->add_flag("--timing", timing, "record per-check wall time");

  CLI::App *list = app.add_subcommand("list-scenarios", "print scenario kinds and their tags");
  bool as_json = false;
  list->add_flag("--json", as_json, "machine-readable output");

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitError;
  }

  if (list->parsed())
  {
    std::cout << (as_json ? CatalogJson() : CatalogText());
    return kExitPass;
  }
  try
  {
    return Run(config_path, out, format, seed, jobs, timing);
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
