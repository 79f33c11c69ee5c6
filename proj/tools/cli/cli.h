/* Copyright 2026 The SDANet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SDANET_TOOLS_CLI_H_
#define SDANET_TOOLS_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "sdanet/data.h"
#include "sdanet/model.h"
#include "sdanet/trainer.h"

namespace sdanet::cli {

// Environment variable naming the default cube directory.
inline constexpr const char* kDataDirEnv = "SDANET_DATA_DIR";

enum class ReportFormat { kText, kTsv };

// Fully resolved command configuration.
struct ExperimentSpec {
  std::string command;
  SdanetConfig model;
  TrainConfig train;
  std::string data_dir;
  std::string checkpoint_path;
  ReportFormat format = ReportFormat::kText;
};

// Loads every "*.hsi" cube in `dir`, ordered by file name.
std::vector<HsiCube> load_cube_dir(const std::string& dir);

// Runs the tool with the given arguments (argv[0] is the program name).
// Returns the process exit status; diagnostics go to `err` as
// "error[<kind>]: <message>".
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace sdanet::cli

#endif  // SDANET_TOOLS_CLI_H_
