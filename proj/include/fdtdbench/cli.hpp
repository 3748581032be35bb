#pragma once

// Command-line front end.
//
//   fdtdbench simulate         1D run, snapshot CSV/JSON
//   fdtdbench simulate3d       3D run, snapshot CSV/JSON
//   fdtdbench bench-bandwidth  memory-copy bandwidth, JSON lines + summary table
//   fdtdbench bench-linsolve   dense left-division gigaflops, JSON lines (+ speedup document)
//   fdtdbench bench-fdtd       FDTD cell-update throughput, JSON lines (+ speedup document)
//
// Exit codes: 0 success, 1 runtime or I/O error, 2 usage error.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fdtdbench/bench.hpp"
#include "fdtdbench/core.hpp"

namespace fdtdbench {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Environment variable that overrides the default worker count.
inline constexpr const char* kWorkersEnv = "FDTDBENCH_WORKERS";

class UsageError : public Error
{
  public:
    using Error::Error;
};

/// Raised by parse_args for --help; carries the help text.
class HelpRequested : public Error
{
  public:
    using Error::Error;
};

enum class Subcommand { Simulate, Simulate3d, BenchBandwidth, BenchLinsolve, BenchFdtd };
enum class OutputFormat { Csv, Json };

struct CliConfig
{
    Subcommand subcommand = Subcommand::Simulate;
    OutputFormat format = OutputFormat::Csv;
    /// "-" writes to stdout.
    std::string output_path = "-";
    /// Speedup document for bench-linsolve / bench-fdtd; empty disables it.
    std::string speedup_path;
    bool timing = true;
    std::uint64_t seed = 42;

    // simulate / simulate3d
    SimulationConfig sim;
    Backend backend;
    /// Uniform losses applied to every cell.
    double sigma = 0;
    double sigma_star = 0;

    // bench-bandwidth
    std::vector<std::uint64_t> bandwidth_bytes;
    std::uint64_t bandwidth_repeats = 10;
    int bandwidth_samples = 5;
    std::vector<CopyTier> tiers;

    // bench-linsolve
    LinsolveBenchOptions linsolve;

    // bench-fdtd
    std::vector<SimulationConfig> fdtd_configs;
    std::vector<Backend> fdtd_backends;
    TimingPolicy fdtd_timing;
};

/// Validated configuration. Throws UsageError (bad flag, bad value, unstable Courant number)
/// or HelpRequested.
CliConfig parse_args(int argc, const char* const* argv);

/// Runs a parsed configuration; returns the exit code.
int execute(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + execute with the exit-code contract applied.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace fdtdbench
