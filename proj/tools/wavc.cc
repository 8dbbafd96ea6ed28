// Copyright 2026 The wavc Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// wavc: feature extraction, subsetting, training, conversion and evaluation.

#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wavc/cli/commands.h"
#include "wavc/cli/run_config.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"

namespace {

using wavc::cli::RunConfig;

std::string KeyHelp(const std::string &command) {
  std::ostringstream os;
  os << "\nConfig keys (set in --config JSON or with --override key=value):\n";
  for (const auto &[key, value] : wavc::cli::DescribeKeys(wavc::cli::KeysReadBy(command)))
    os << "  " << key << " = " << value << "\n";
  if (command == "train") os << "  (model.*.mcep_dim and n_speakers are taken from the manifest)\n";
  if (command == "extract")
    os << "\nEnvironment:\n  " << wavc::cli::kCacheRootEnv
       << "  feature cache root used when paths.cache_root is empty\n";
  return os.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"wavc: many-to-many voice conversion with weight-adaptive instance normalization"};
  app.require_subcommand(1);

  std::optional<std::string> config_file;
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  bool verbose = false;
  app.add_option("--config", config_file, "JSON run configuration");
  app.add_option("--override", overrides, "dotted key=value, applied after --config")->take_all();
  app.add_option("--seed", seed, "seed for training, subsetting and the evaluation classifier");
  app.add_option("--out-dir", out_dir, "output directory (paths.out_dir)");
  app.add_flag("-v,--verbose", verbose, "log every message");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"extract", "build a manifest from paths.audio_root and cache vocoder features"},
      {"subset", "select n speakers x m training utterances from paths.manifest"},
      {"train", "train the generator, discriminator and speaker encoder"},
      {"convert", "convert source utterances to target speakers with paths.checkpoint"},
      {"evaluate", "speaker identification accuracy and verification EER of conversions"},
  };
  const std::map<std::string, std::function<std::filesystem::path(const RunConfig &)>> run = {
      {"extract", wavc::cli::CmdExtract}, {"subset", wavc::cli::CmdSubset},     {"train", wavc::cli::CmdTrain},
      {"convert", wavc::cli::CmdConvert}, {"evaluate", wavc::cli::CmdEvaluate},
  };
  for (const auto &[name, description] : commands) {
    auto *sub = app.add_subcommand(name, description);
    sub->footer(KeyHelp(name));
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e);
  }
  if (verbose) wavc::SetLogLevel(wavc::LogLevel::kInfo);

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    auto config = wavc::cli::LoadRunConfig(config_file, overrides, seed, out_dir);
    const auto result = run.at(name)(config);
    std::cout << result.string() << "\n";
  } catch (const std::exception &e) {
    WAVC_ERR << name << ": " << e.what();
    return 1;
  }
  return 0;
}
