#pragma once

#include <string>
#include <vector>

#include "skybright/config.hpp"
#include "skybright/types.hpp"

namespace skybright {

inline constexpr const char* kVersion = "0.1.0";

/// Run one pipeline subcommand (enrich, fit, predict, validate, skyglow,
/// infer, simulate). Artifacts land in the configured output_dir together
/// with a run manifest; timestamps appear only in the manifest so repeated
/// runs produce byte-identical outputs.
void run_pipeline(const std::string& subcommand, const PipelineConfig& config,
                  WarningLog& warnings, int threads = 1);

const std::vector<std::string>& pipeline_subcommands();

}  // namespace skybright
