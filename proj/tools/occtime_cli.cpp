// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "occtime/occtime.h"

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInternal = 4;

struct Flag {
  const char* name;
  const char* help;
};

constexpr Flag kCommonFlags[] = {
    {"alpha", "stability index in (0, 2]"},
    {"T", "time horizon"},
    {"n", "number of steps, or a comma-separated list"},
    {"reps", "Monte Carlo replications"},
    {"refine", "fine steps per coarse step for the ground truth"},
    {"seed", "random seed"},
    {"y", "level: half-line [y, inf) for occupation, point for local time"},
    {"a", "left end of the target interval"},
    {"b", "right end of the target interval"},
    {"bandwidth", "local time bandwidth as a multiple of delta^(1/alpha)"},
    {"format", "csv or json"},
    {"threads", "worker threads (results do not depend on it)"},
};

using Values = std::map<std::string, std::string>;

void add_flags(CLI::App* app, Values& values, std::initializer_list<Flag> extra)
{
  for (const Flag& f : kCommonFlags) app->add_option(std::string("--") + f.name, values[f.name], f.help);
  for (const Flag& f : extra) app->add_option(std::string("--") + f.name, values[f.name], f.help);
}

int exit_code(occt_status status)
{
  switch (status) {
    case OCCT_OK: return 0;
    case OCCT_NUMERIC_ERROR: return kExitNumeric;
    case OCCT_INTERNAL_ERROR: return kExitInternal;
    default: return kExitUsage;
  }
}

std::filesystem::path resolve_output(const std::string& out, const std::string& default_name)
{
  const char* dir = std::getenv("OCCTIME_OUT_DIR");
  if (out.empty()) return dir && *dir ? std::filesystem::path(dir) / default_name : std::filesystem::path();
  std::filesystem::path p(out);
  if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
  return p;
}

bool write_file(const std::filesystem::path& path, const std::string& text)
{
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  return static_cast<bool>(f);
}

int run(const std::string& command, const std::string& default_name, const CLI::App& app, const Values& values,
        const std::string& out)
{
  std::unique_ptr<occt_config, decltype(&occt_config_destroy)> config(nullptr, occt_config_destroy);
  occt_config* raw = nullptr;
  occt_config_create(&raw);
  config.reset(raw);
  for (const auto& [key, value] : values) {
    if (app.count("--" + key) > 0) occt_config_set(raw, key.c_str(), value.c_str());
  }

  occt_report* report = nullptr;
  const occt_status status = occt_run(command.c_str(), raw, &report);
  if (status != OCCT_OK) {
    std::cerr << "error: " << occt_last_error() << "\n";
    return exit_code(status);
  }
  std::unique_ptr<occt_report, decltype(&occt_report_destroy)> owned(report, occt_report_destroy);

  const auto format = values.count("format") && app.count("--format") ? values.at("format") : std::string("csv");
  const auto path = resolve_output(out, default_name + "." + format);
  if (path.empty()) {
    std::cout << occt_report_table(report);
  } else {
    const auto manifest_path = std::filesystem::path(path.string() + ".manifest.json");
    if (!write_file(path, occt_report_table(report)) ||
        !write_file(manifest_path, std::string(occt_report_manifest(report)) + "\n")) {
      std::cerr << "error: cannot write " << path << "\n";
      return kExitInternal;
    }
    std::cerr << "wrote " << path.string() << " and " << manifest_path.string() << "\n";
  }
  std::cerr << occt_report_summary(report);
  return occt_report_passed(report) ? 0 : kExitChecksFailed;
}

}  // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Occupation time and local time estimation for stable Levy processes"};
  app.set_version_flag("--version", std::string(occt_version()));
  app.require_subcommand(1);

  std::string out;
  struct Command {
    CLI::App* app;
    Values values;
    std::string name;
  };
  std::vector<std::unique_ptr<Command>> commands;
  auto add = [&](CLI::App* parent, const std::string& name, const std::string& help, const std::string& full,
                 std::initializer_list<Flag> extra) {
    auto c = std::make_unique<Command>();
    c->app = parent->add_subcommand(name, help);
    c->name = full;
    add_flags(c->app, c->values, extra);
    c->app->add_option("--out", out, "output file (relative paths resolve under $OCCTIME_OUT_DIR)");
    commands.push_back(std::move(c));
  };

  add(&app, "density", "density and tail probability of X_t", "density",
      {{"x", "points, comma-separated"}, {"t", "time"}});
  add(&app, "sample", "simulate one path and dump it as (t, X_t)", "sample", {{"stream", "stream id"}});
  add(&app, "constants", "closed-form constants for one alpha", "constants", {});
  CLI::App* study = app.add_subcommand("study", "Monte Carlo and quadrature studies");
  study->require_subcommand(1);
  const std::pair<const char*, const char*> studies[] = {
      {"occupation", "rate of the Riemann occupation estimator"},
      {"localtime", "rate of the Riemann local time estimator"},
      {"optimal", "Riemann against conditional expectation"},
      {"logregime", "exact error in the logarithmic regimes alpha <= 1"},
      {"identity", "exact second-moment identities by path simulation"},
      {"consistency", "consistency of the Riemann estimator on an interval"},
      {"figure1", "lower bound for the efficiency gap over alpha"},
  };
  for (const auto& [name, help] : studies) {
    add(study, name, help, std::string("study/") + name, {{"tolerance", "slope tolerance for rate studies"}});
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  for (const auto& c : commands) {
    if (c->app->parsed()) {
      std::string default_name = c->name;
      for (char& ch : default_name) {
        if (ch == '/') ch = '_';
      }
      return run(c->name, default_name, *c->app, c->values, out);
    }
  }
  return kExitUsage;
}
