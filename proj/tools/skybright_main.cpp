// skybright command-line front end. Everything it does goes through the
// shared library's C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "skybright/skybright.h"

namespace {

struct PipelineDeleter {
  void operator()(sb_pipeline* p) const { sb_pipeline_free(p); }
};
using PipelinePtr = std::unique_ptr<sb_pipeline, PipelineDeleter>;

int fail(const char* what) {
  std::fprintf(stderr, "error: %s\n", what);
  return 1;
}

int run_subcommand(const std::string& name, const std::string& config_path,
                   const std::vector<std::string>& overrides, int threads) {
  sb_pipeline* raw = nullptr;
  if (sb_pipeline_new(config_path.empty() ? nullptr : config_path.c_str(), &raw) !=
      SB_OK) {
    return fail(sb_last_error());
  }
  PipelinePtr pipeline(raw);

  for (const std::string& kv : overrides) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
      return 1;
    }
    auto strip = [](std::string s) {
      const std::size_t b = s.find_first_not_of(" \t");
      const std::size_t e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    if (sb_pipeline_set(pipeline.get(), strip(kv.substr(0, eq)).c_str(),
                        strip(kv.substr(eq + 1)).c_str()) != SB_OK) {
      return fail(sb_last_error());
    }
  }
  if (sb_pipeline_set_threads(pipeline.get(), threads) != SB_OK) {
    return fail(sb_last_error());
  }

  if (sb_pipeline_run(pipeline.get(), name.c_str()) != SB_OK) {
    return fail(sb_last_error());
  }

  const std::size_t warnings = sb_pipeline_warning_count(pipeline.get());
  if (warnings > 0) {
    std::fprintf(stderr, "%zu warning(s):\n", warnings);
    for (std::size_t i = 0; i < warnings; ++i) {
      std::fprintf(stderr, "  %s\n", sb_pipeline_warning(pipeline.get(), i));
    }
  }
  std::printf("%s: done\n", name.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"skybright: grid predictions and bias-corrected means from "
               "citizen-science sky-brightness observations"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 1;

  const char* const subcommands[] = {"enrich",  "fit",   "predict", "validate",
                                     "skyglow", "infer", "simulate"};
  const char* const descriptions[] = {
      "compute covariates for observations and grid cells",
      "fit the configured model and its residual variogram",
      "predict sky brightness for every grid cell",
      "compare all eight models (LOOCV, Spearman, R2)",
      "convert a radiance raster to per-cell expected skyglow",
      "observed vs bias-corrected area mean with standard errors",
      "generate a synthetic dataset for end-to-end runs"};

  for (std::size_t i = 0; i < std::size(subcommands); ++i) {
    CLI::App* sub = app.add_subcommand(subcommands[i], descriptions[i]);
    sub->add_option("-c,--config", config_path, "config file (key = value lines)");
    sub->add_option("--set", overrides,
                    "override a config key, e.g. --set seed=7 (repeatable; wins "
                    "over the config file)");
    sub->add_option("-t,--threads", threads, "worker threads (default 1)");
  }

  CLI::App* version = app.add_subcommand("version", "print the library version");
  CLI::App* reference =
      app.add_subcommand("config-reference", "list every config key with its "
                                             "default and meaning");

  CLI11_PARSE(app, argc, argv);

  if (version->parsed()) {
    std::printf("skybright %s\n", sb_version());
    return 0;
  }
  if (reference->parsed()) {
    std::printf("%s", sb_config_reference());
    return 0;
  }
  for (const char* name : subcommands) {
    if (app.get_subcommand(name)->parsed()) {
      return run_subcommand(name, config_path, overrides, threads);
    }
  }
  return fail("no subcommand given");
}
