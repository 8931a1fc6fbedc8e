#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "config.hpp"
#include "presets.hpp"
#include "qcr/errors.hpp"
#include "runner.hpp"

namespace {

qcrlab::RunConfig resolve(const std::string& source) {
  if (std::filesystem::exists(source)) return qcrlab::load_config(source);
  if (const auto p = qcrlab::find_preset(source)) {
    std::istringstream in(p->config);
    return qcrlab::parse_config(in);
  }
  throw qcr::ConfigError("'" + source + "' is neither a config file nor a preset name");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcrlab: batch verification of quaternionic CR structures"};
  app.require_subcommand(1);

  std::string source;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out;
  auto* run = app.add_subcommand("run", "run a config file or a named preset");
  run->add_option("config", source, "config path or preset name")->required();
  run->add_option("--samples", samples, "number of sample points")->check(CLI::NonNegativeNumber);
  run->add_option("--seed", seed, "sampling seed");
  run->add_option("--tol", tol, "tolerance applied to every task")->check(CLI::PositiveNumber);
  run->add_option("--out", out, "report path (default: config output, else stdout)");

  std::string shown;
  auto* list = app.add_subcommand("presets", "list presets, or print one as a config");
  list->add_option("name", shown, "preset to print");

  std::string task;
  auto* explain = app.add_subcommand("explain", "describe a task");
  explain->add_option("task", task, "task name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      if (shown.empty()) {
        for (const auto& p : qcrlab::presets()) std::printf("%-28s %s\n", p.name.c_str(), p.summary.c_str());
        return 0;
      }
      const auto p = qcrlab::find_preset(shown);
      if (!p) throw qcr::ConfigError("unknown preset '" + shown + "'");
      std::printf("# %s\n%s", p->summary.c_str(), p->config.c_str());
      return 0;
    }
    if (*explain) {
      const std::string text = qcrlab::explain_task(task);
      if (text.empty()) throw qcr::ConfigError("unknown task '" + task + "'");
      std::printf("%s: %s\n", task.c_str(), text.c_str());
      return 0;
    }
    qcrlab::RunConfig cfg = resolve(source);
    if (samples) cfg.samples = *samples;
    if (seed) cfg.seed = *seed;
    if (tol)
      for (const auto& t : cfg.tasks) cfg.tolerances[t] = *tol;
    if (!out.empty()) cfg.output = out;
    const auto report = qcrlab::run(cfg, qcrlab::thread_budget());
    const std::string text = qcrlab::serialize(report);
    if (cfg.output.empty()) {
      std::fwrite(text.data(), 1, text.size(), stdout);
    } else {
      std::ofstream f(cfg.output);
      if (!f) throw qcr::ConfigError("cannot write '" + cfg.output + "'");
      f << text;
      const auto& s = report.at("summary");
      std::fprintf(stderr, "%s: %s (hash %s)\n", cfg.output.c_str(), s.at("pass").get<bool>() ? "pass" : "fail",
                   s.at("determinism_hash").get<std::string>().c_str());
    }
    return qcrlab::all_passed(report) ? 0 : 1;
  } catch (const qcr::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  }
}
