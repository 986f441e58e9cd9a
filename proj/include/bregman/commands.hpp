#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "json.hpp"

namespace bregman {

// Flat key-value configuration after defaults and command-line overrides
// have been applied and validated against the command's schema.
struct RunConfig {
  std::string command;
  nlohmann::json values;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir = "out";
};

// Merges file values and overrides over the command's defaults. Unknown keys
// and type mismatches raise UsageError.
RunConfig make_config(const std::string& command, const nlohmann::json& file_values,
                      const nlohmann::json& overrides);

nlohmann::json command_defaults(const std::string& command);

void cmd_loss_show(const RunConfig& cfg);
void cmd_fit(const RunConfig& cfg);
void cmd_eval(const RunConfig& cfg);
void cmd_fig1(const RunConfig& cfg);
void cmd_fig2(const RunConfig& cfg);
void cmd_fig3(const RunConfig& cfg);
// Returns true when every identity check passes.
bool cmd_check(const RunConfig& cfg);

// Exit codes: 0 ok, 1 usage, 2 numeric failure, 3 check failure.
int run_cli(int argc, char** argv);

}  // namespace bregman
