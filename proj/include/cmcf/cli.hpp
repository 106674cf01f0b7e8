#pragma once

#include "cmcf/flow.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace cmcf::cli {

inline constexpr const char* kVersion = "0.3.0";

// Exit codes shared by all commands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;  // bad flags, unreadable input, precondition violation
inline constexpr int kExitFailed = 2; // degenerate / solver failure, or validation failure
inline constexpr int kExitMaxSteps = 3;

struct RunOptions {
  std::filesystem::path input;
  std::filesystem::path out_dir = "cmcf_out";
  FlowConfig flow;
  bool project_sphere = false;
  bool dump_matrices = false;
};

struct MetricsOptions {
  std::filesystem::path orig;
  std::filesystem::path mapped;
  std::optional<std::filesystem::path> out_dir;
  double degenerate_ratio = 1e-8;
};

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err);
int cmd_validate(const std::filesystem::path& input, std::ostream& out, std::ostream& err);

// Full argument handling (subcommands run / metrics / validate).
int main(int argc, char** argv);

} // namespace cmcf::cli
