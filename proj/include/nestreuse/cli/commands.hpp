#pragma once

#include "nestreuse/cli/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace nestreuse::cli {

inline constexpr std::string_view tool_version = "nestreuse 1.0.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_runtime = 1,
    exit_config = 2,
    exit_audit_violation = 3,
};

struct Options {
    std::filesystem::path config;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> trials;
    std::size_t threads = 0;  // 0 = hardware concurrency
    bool quiet = false;
};

enum class Command { run, bench, audit };

/// Loads the config, applies overrides, executes the command and maps failures to
/// exit codes. Progress goes to `out`, diagnostics to `err`.
int execute(Command command, const Options& options, std::ostream& out, std::ostream& err);

/// The command bodies; they throw ConfigError / std::exception and return the
/// exit code on completion.
int cmd_run(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t threads,
            std::ostream& log);
int cmd_bench(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::size_t threads,
              std::ostream& log);
int cmd_audit(const ExperimentConfig& config, const std::filesystem::path& out_dir, std::ostream& log);

}  // namespace nestreuse::cli
