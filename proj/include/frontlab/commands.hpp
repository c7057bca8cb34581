#pragma once

#include <string>

#include "frontlab/config.hpp"
#include "frontlab/io.hpp"

namespace frontlab {

struct CommandResult {
    nlohmann::json report;
    std::string summary;  ///< human-readable lines for stdout
    std::string status = "ok";
    std::string warning;  ///< printed to stderr when non-empty
};

CommandResult cmd_speed(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_roots(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_spectrum(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_simulate(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_front(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_transition(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_wavenumber(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_models(const RunConfig& cfg, OutputDir& out);
CommandResult cmd_sweep(const RunConfig& cfg, OutputDir& out);

/// Dispatch by name; throws InvalidArgument for unknown commands.
CommandResult run_command(const std::string& name, const RunConfig& cfg, OutputDir& out);

/// Worker count from FRONTLAB_THREADS, else the hardware concurrency.
int thread_budget();

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace frontlab
