#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace svcharme::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

[[nodiscard]] const char* version() noexcept;

struct CommandOptions {
  std::filesystem::path out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool force = false;
};

struct CheckOutcome {
  Json report;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Assumption checks: chain irreducibility and aperiodicity, innovation
/// moments, and the Assumption 8 drift check. Never throws for a parsed
/// config; failures and errors are recorded in the report.
[[nodiscard]] CheckOutcome evaluate_checks(const RunConfig& config);

/// Each command takes a configuration document (not a manifest), writes its
/// outputs and a manifest under options.out_dir, and returns an exit code.
/// Exceptions propagate; run() maps them to exit codes.
int cmd_check(const Json& doc, const CommandOptions& options, std::ostream& out);
int cmd_simulate(const Json& doc, const CommandOptions& options, std::ostream& out);
int cmd_density(const Json& doc, const CommandOptions& options, std::ostream& out);
int cmd_diagnose(const Json& doc, const CommandOptions& options, std::ostream& out);

/// Full command line entry point. Never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svcharme::cli
