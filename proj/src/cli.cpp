#include "fdtdbench/cli.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "fdtdbench/engine.hpp"
#include "fdtdbench/linsolve.hpp"
#include "fdtdbench/report.hpp"

namespace fdtdbench {

namespace {

// Accepts plain byte counts or K/M/G suffixes (powers of 1024), e.g. "1GiB", "512M".
std::uint64_t parse_bytes(const std::string& text)
{
    std::uint64_t value = 0;
    const char* begin = text.data();
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr == begin) {
        throw UsageError("invalid byte count '" + text + "'");
    }
    std::string suffix(ptr, end);
    for (auto& ch : suffix) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    std::uint64_t scale = 1;
    if (suffix.empty() || suffix == "b") {
        scale = 1;
    } else if (suffix == "k" || suffix == "kib") {
        scale = std::uint64_t{1} << 10;
    } else if (suffix == "m" || suffix == "mib") {
        scale = std::uint64_t{1} << 20;
    } else if (suffix == "g" || suffix == "gib") {
        scale = std::uint64_t{1} << 30;
    } else {
        throw UsageError("invalid byte-count suffix in '" + text + "'");
    }
    return value * scale;
}

std::vector<Precision> parse_precisions(const std::string& text)
{
    if (text == "both") {
        return {Precision::Single, Precision::Double};
    }
    return {parse_precision(text)};
}

std::vector<Backend> parse_backends(const std::string& text, unsigned workers)
{
    if (text == "both") {
        return {Backend::serial(), Backend::parallel(workers)};
    }
    if (text == "parallel") {
        return {Backend::parallel(workers)};
    }
    return {Backend::parse(text)};
}

struct SimFlags
{
    std::size_t xdim = 200;
    std::size_t nx = 32, ny = 32, nz = 32;
    std::int64_t steps = 350;
    double courant = 1.0;
    double n_lambda = 20.0;
    std::int64_t tstart = 1;
    std::int64_t tstop = -1;
    std::vector<std::size_t> source;
    double amplitude = 1.0;
    bool soft = false;
    bool plane = false;
    double sigma = 0;
    double sigma_star = 0;
    std::string units = "normalized";
    double delta = 1.0;
    std::string precision = "double";
    std::int64_t snapshot_every = 0;
};

struct CommonFlags
{
    std::string output = "-";
    std::string format;
    std::string backend = "serial";
    unsigned workers = 0;
    std::uint64_t seed = 42;
    bool no_timing = false;
    std::string speedup_output;
    double min_time = 0.2;
};

void add_common(CLI::App* cmd, CommonFlags& c, bool with_backend)
{
    cmd->add_option("-o,--output", c.output, "Output file ('-' for stdout)");
    cmd->add_option("--seed", c.seed, "Seed for all random inputs");
    if (with_backend) {
        cmd->add_option("--backend", c.backend, "serial, parallel, parallel:k or both");
        cmd->add_option("--workers", c.workers, "Worker count for the parallel backend")
            ->envname(kWorkersEnv)
            ->check(CLI::PositiveNumber);
    }
}

void add_sim_options(CLI::App* cmd, SimFlags& s, bool three_d)
{
    if (three_d) {
        cmd->add_option("--nx", s.nx, "Cells along x");
        cmd->add_option("--ny", s.ny, "Cells along y");
        cmd->add_option("--nz", s.nz, "Cells along z");
        cmd->add_option("--source", s.source, "Source cell i,j,k (default: grid center)")
            ->delimiter(',')
            ->expected(3);
        cmd->add_flag("--plane-source", s.plane, "Drive the whole y-z plane at the source x");
    } else {
        cmd->add_option("--xdim", s.xdim, "Number of cells");
        cmd->add_option("--source", s.source, "Source cell (default: xdim/2)")->expected(1);
    }
    cmd->add_option("--steps", s.steps, "Number of time steps");
    cmd->add_option("--courant", s.courant, "Courant number c*dt/delta");
    cmd->add_option("--n-lambda", s.n_lambda, "Source wavelength in cells");
    cmd->add_option("--tstart", s.tstart, "First source step");
    cmd->add_option("--tstop", s.tstop, "Last source step (default: never stops)");
    cmd->add_option("--amplitude", s.amplitude, "Source amplitude");
    cmd->add_flag("--soft-source", s.soft, "Add the source value instead of overwriting");
    cmd->add_option("--sigma", s.sigma, "Uniform electric conductivity");
    cmd->add_option("--sigma-star", s.sigma_star, "Uniform magnetic loss");
    cmd->add_option("--units", s.units, "normalized or physical")
        ->check(CLI::IsMember({"normalized", "physical"}));
    cmd->add_option("--delta", s.delta, "Space step (cells in normalized units, meters in physical)");
    cmd->add_option("--precision", s.precision, "single or double")
        ->check(CLI::IsMember({"single", "double"}));
    cmd->add_option("--snapshot-every", s.snapshot_every, "Steps between snapshots (0: final only)");
}

SimulationConfig build_sim(const SimFlags& s, bool three_d)
{
    SimulationConfig c = three_d ? SimulationConfig::default_3d() : SimulationConfig::default_1d(s.xdim);
    if (three_d) {
        c.extent = Extent{s.nx, s.ny, s.nz};
        c.source.location = {s.nx / 2, s.ny / 2, s.nz / 2};
        if (!s.source.empty()) {
            c.source.location = {s.source[0], s.source[1], s.source[2]};
        }
    } else if (!s.source.empty()) {
        c.source.location = {s.source[0], 0, 0};
    }
    c.time_tot = s.steps;
    c.courant = s.courant;
    c.source.n_lambda = s.n_lambda;
    c.source.tstart = s.tstart;
    if (s.tstop >= 0) {
        c.source.tstop = s.tstop;
    }
    c.source.amplitude = s.amplitude;
    c.source.soft = s.soft;
    c.source.plane = s.plane;
    c.units = s.units == "physical" ? Units::Physical : Units::Normalized;
    c.delta = s.delta;
    c.precision = parse_precision(s.precision);
    c.snapshot_every = s.snapshot_every;
    return c;
}

OutputFormat parse_format(const std::string& text, OutputFormat fallback)
{
    if (text.empty()) {
        return fallback;
    }
    if (text == "csv") {
        return OutputFormat::Csv;
    }
    if (text == "json") {
        return OutputFormat::Json;
    }
    throw UsageError("--format must be csv or json");
}

} // namespace

CliConfig parse_args(int argc, const char* const* argv)
{
    CLI::App app{"FDTD field solver and CPU benchmark harness", "fdtdbench"};
    app.require_subcommand(1, 1);

    SimFlags sim1;
    SimFlags sim3;
    sim3.steps = 100;
    sim3.courant = 0.5;
    CommonFlags c1, c3, cbw, cls, cfd;

    auto* simulate = app.add_subcommand("simulate", "Run the 1D Ez/Hy simulation");
    add_sim_options(simulate, sim1, false);
    add_common(simulate, c1, true);
    simulate->add_option("--format", c1.format, "csv or json");

    auto* simulate3d = app.add_subcommand("simulate3d", "Run the 3D six-component simulation");
    add_sim_options(simulate3d, sim3, true);
    add_common(simulate3d, c3, true);
    simulate3d->add_option("--format", c3.format, "csv or json");

    std::vector<std::string> bw_bytes{"33554432"};
    std::uint64_t bw_repeats = 10;
    int bw_samples = 5;
    std::string bw_tier = "both";
    auto* bandwidth = app.add_subcommand("bench-bandwidth", "Memory-copy bandwidth");
    add_common(bandwidth, cbw, false);
    bandwidth->add_option("--bytes", bw_bytes, "Transfer sizes (comma separated, K/M/G suffixes)")
        ->delimiter(',');
    bandwidth->add_option("--repeats", bw_repeats, "Copies per timing sample (>= 3)");
    bandwidth->add_option("--samples", bw_samples, "Timing samples (median is reported)");
    bandwidth->add_option("--tier", bw_tier, "warm, fresh or both")
        ->check(CLI::IsMember({"warm", "fresh", "both", "warm-buffer", "fresh-allocation"}));
    bandwidth->add_option("--format", cbw.format, "json or csv");
    bandwidth->add_flag("--no-timing", cbw.no_timing, "Write null for timing-dependent fields");

    std::vector<std::size_t> ls_sizes{256, 512, 1024};
    std::string ls_precision = "double";
    std::string ls_cap;
    cls.backend = "both";
    auto* linsolve = app.add_subcommand("bench-linsolve", "Dense A\\b gigaflops");
    add_common(linsolve, cls, true);
    linsolve->add_option("--sizes", ls_sizes, "Matrix orders (comma separated)")->delimiter(',');
    linsolve->add_option("--precision", ls_precision, "single, double or both")
        ->check(CLI::IsMember({"single", "double", "both"}));
    linsolve->add_option("--memory-cap", ls_cap, "Skip sizes whose footprint exceeds this (bytes, K/M/G)");
    linsolve->add_option("--min-time", cls.min_time, "Minimum total timing window per point, seconds");
    linsolve->add_option("--speedup-output", cls.speedup_output, "Write the speedup JSON document here");
    linsolve->add_option("--format", cls.format, "json or csv");
    linsolve->add_flag("--no-timing", cls.no_timing, "Write null for timing-dependent fields");

    int fd_dims = 1;
    std::vector<std::size_t> fd_sizes;
    std::int64_t fd_steps = 100;
    double fd_courant = 0;
    std::string fd_precision = "double";
    cfd.backend = "both";
    auto* fdtd = app.add_subcommand("bench-fdtd", "FDTD cell-update throughput");
    add_common(fdtd, cfd, true);
    fdtd->add_option("--dims", fd_dims, "1 or 3")->check(CLI::IsMember({1, 3}));
    fdtd->add_option("--sizes", fd_sizes, "xdim (1D) or cube edge (3D) per point")->delimiter(',');
    fdtd->add_option("--steps", fd_steps, "Time steps per run");
    fdtd->add_option("--courant", fd_courant, "Courant number (default 1.0 in 1D, 0.5 in 3D)");
    fdtd->add_option("--precision", fd_precision, "single, double or both")
        ->check(CLI::IsMember({"single", "double", "both"}));
    fdtd->add_option("--min-time", cfd.min_time, "Minimum total timing window per point, seconds");
    fdtd->add_option("--speedup-output", cfd.speedup_output, "Write the speedup JSON document here");
    fdtd->add_option("--format", cfd.format, "json or csv");
    fdtd->add_flag("--no-timing", cfd.no_timing, "Write null for timing-dependent fields");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        std::ostringstream text;
        app.exit(e, text, text);
        throw HelpRequested(text.str());
    } catch (const CLI::CallForAllHelp& e) {
        std::ostringstream text;
        app.exit(e, text, text);
        throw HelpRequested(text.str());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    CliConfig cfg;
    auto workers_of = [](const CommonFlags& c) { return c.workers ? c.workers : default_worker_count(); };
    auto apply_common = [&](const CommonFlags& c) {
        cfg.output_path = c.output;
        cfg.seed = c.seed;
        cfg.timing = !c.no_timing;
        cfg.speedup_path = c.speedup_output;
    };

    try {
        if (simulate->parsed() || simulate3d->parsed()) {
            const bool three_d = simulate3d->parsed();
            const CommonFlags& c = three_d ? c3 : c1;
            const SimFlags& s = three_d ? sim3 : sim1;
            apply_common(c);
            cfg.subcommand = three_d ? Subcommand::Simulate3d : Subcommand::Simulate;
            cfg.format = parse_format(c.format, OutputFormat::Csv);
            cfg.sim = build_sim(s, three_d);
            cfg.sigma = s.sigma;
            cfg.sigma_star = s.sigma_star;
            if (!(s.sigma >= 0) || !(s.sigma_star >= 0)) {
                throw UsageError("--sigma and --sigma-star must be non-negative");
            }
            const auto backends = parse_backends(c.backend, workers_of(c));
            if (backends.size() != 1) {
                throw UsageError("--backend both is only valid for benchmarks");
            }
            cfg.backend = backends.front();
            validate_config(cfg.sim);
            validate_stability(cfg.sim);
        } else if (bandwidth->parsed()) {
            apply_common(cbw);
            cfg.subcommand = Subcommand::BenchBandwidth;
            cfg.format = parse_format(cbw.format, OutputFormat::Json);
            for (const auto& b : bw_bytes) {
                const std::uint64_t bytes = parse_bytes(b);
                if (bytes < 4096) {
                    throw UsageError("--bytes values must be at least 4096");
                }
                cfg.bandwidth_bytes.push_back(bytes);
            }
            if (bw_repeats < 3) {
                throw UsageError("--repeats must be at least 3");
            }
            if (bw_samples < 3) {
                throw UsageError("--samples must be at least 3");
            }
            cfg.bandwidth_repeats = bw_repeats;
            cfg.bandwidth_samples = bw_samples;
            if (bw_tier == "both") {
                cfg.tiers = {CopyTier::FreshAllocation, CopyTier::WarmBuffer};
            } else {
                cfg.tiers = {parse_copy_tier(bw_tier)};
            }
        } else if (linsolve->parsed()) {
            apply_common(cls);
            cfg.subcommand = Subcommand::BenchLinsolve;
            cfg.format = parse_format(cls.format, OutputFormat::Json);
            for (const std::size_t n : ls_sizes) {
                if (n < 2) {
                    throw UsageError("--sizes values must be at least 2");
                }
            }
            cfg.linsolve.sizes = ls_sizes;
            cfg.linsolve.precisions = parse_precisions(ls_precision);
            cfg.linsolve.backends = parse_backends(cls.backend, workers_of(cls));
            cfg.linsolve.seed = cls.seed;
            cfg.linsolve.memory_cap_bytes = ls_cap.empty() ? 0 : parse_bytes(ls_cap);
            cfg.linsolve.timing.min_window_s = cls.min_time;
        } else if (fdtd->parsed()) {
            apply_common(cfd);
            cfg.subcommand = Subcommand::BenchFdtd;
            cfg.format = parse_format(cfd.format, OutputFormat::Json);
            if (fd_sizes.empty()) {
                fd_sizes = fd_dims == 1 ? std::vector<std::size_t>{10000, 1000000}
                                        : std::vector<std::size_t>{32, 64};
            }
            for (const Precision p : parse_precisions(fd_precision)) {
                for (const std::size_t n : fd_sizes) {
                    SimulationConfig sc = fd_dims == 1 ? SimulationConfig::default_1d(n)
                                                       : SimulationConfig::default_3d(n);
                    sc.time_tot = fd_steps;
                    if (fd_courant > 0) {
                        sc.courant = fd_courant;
                    }
                    sc.precision = p;
                    validate_config(sc);
                    validate_stability(sc);
                    cfg.fdtd_configs.push_back(sc);
                }
            }
            cfg.fdtd_backends = parse_backends(cfd.backend, workers_of(cfd));
            cfg.fdtd_timing.min_window_s = cfd.min_time;
        }
    } catch (const UsageError&) {
        throw;
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    return cfg;
}

namespace {

template <class FieldT, std::floating_point Real>
void simulate(const CliConfig& cfg)
{
    auto materials = make_vacuum_materials<Real>(cfg.sim.extent, cfg.sim.units);
    std::fill(materials.sigma.begin(), materials.sigma.end(), static_cast<Real>(cfg.sigma));
    std::fill(materials.sigma_star.begin(), materials.sigma_star.end(), static_cast<Real>(cfg.sigma_star));
    const auto series = run_simulation<FieldT>(cfg.sim, materials, cfg.backend);
    if (cfg.format == OutputFormat::Csv) {
        emit_snapshot_csv(series, cfg.output_path);
    } else {
        emit_snapshot_json(series, cfg.output_path);
    }
}

bool to_stdout(const std::string& path)
{
    return path.empty() || path == "-";
}

std::string json_cell(const nlohmann::json& v)
{
    if (v.is_null()) {
        return "";
    }
    if (v.is_string()) {
        return v.get<std::string>();
    }
    if (v.is_number_float()) {
        return format_g17(v.get<double>());
    }
    return v.dump();
}

// Flat CSV view of benchmark JSON records.
void emit_bench_csv(const std::vector<nlohmann::json>& records, const std::string& path)
{
    static const char* const columns[] = {"bench", "n", "bytes", "precision", "backend", "elapsed_s",
                                          "flops", "gigaflops", "mb_per_s", "updates_per_s",
                                          "residual", "skipped"};
    std::string text;
    for (const char* col : columns) {
        text += text.empty() ? "" : ",";
        text += col;
    }
    text += '\n';
    for (const auto& r : records) {
        bool first = true;
        for (const char* col : columns) {
            text += first ? "" : ",";
            first = false;
            if (r.contains(col)) {
                text += json_cell(r.at(col));
            }
        }
        text += '\n';
    }
    write_text_file(path, text);
}

void emit_records(const CliConfig& cfg, const std::vector<nlohmann::json>& records)
{
    if (cfg.format == OutputFormat::Csv) {
        emit_bench_csv(records, cfg.output_path);
    } else {
        emit_bench_json(records, cfg.output_path);
    }
}

void report_speedups(const CliConfig& cfg, const std::vector<SpeedupRecord>& speedups,
                     std::ostream& summary)
{
    if (!cfg.speedup_path.empty()) {
        write_text_file(cfg.speedup_path, speedup_document(speedups, cfg.timing).dump(2) + "\n");
    }
    if (!cfg.timing) {
        return;
    }
    char buf[160];
    for (const auto& s : speedups) {
        std::snprintf(buf, sizeof buf, "%s  n=%zu  %s  %s  speedup %.3f\n", s.bench.c_str(), s.n,
                      std::string(to_string(s.precision)).c_str(), s.parallel_backend.c_str(),
                      s.speedup);
        summary << buf;
    }
}

int run_bandwidth(const CliConfig& cfg, std::ostream& summary)
{
    std::vector<BandwidthRecord> records;
    for (const CopyTier tier : cfg.tiers) {
        for (const std::uint64_t bytes : cfg.bandwidth_bytes) {
            records.push_back(measure_copy_bandwidth(bytes, cfg.bandwidth_repeats, tier,
                                                     cfg.bandwidth_samples));
        }
    }
    std::vector<nlohmann::json> json;
    for (const auto& r : records) {
        json.push_back(to_json(r, cfg.timing));
    }
    emit_records(cfg, json);
    if (cfg.timing) {
        summary << "Single-memory-space analogy of host/device transfer tiers\n"
                << "Tier  Transfer Size (Bytes)  Bandwidth(MB/s)\n"
                << bandwidth_summary(records);
    }
    return kExitOk;
}

int run_linsolve(const CliConfig& cfg, std::ostream& summary, std::ostream& err)
{
    const auto records = run_linsolve_bench(cfg.linsolve);
    std::vector<nlohmann::json> json;
    int code = kExitOk;
    for (const auto& r : records) {
        json.push_back(to_json(r, cfg.timing));
        if (r.skipped) {
            continue;
        }
        const double bound = r.precision == Precision::Single ? residual_bound<float>(r.n)
                                                              : residual_bound<double>(r.n);
        if (!(r.residual <= bound)) {
            err << "error: residual " << r.residual << " exceeds " << bound << " for n=" << r.n
                << " " << to_string(r.precision) << " " << r.backend.name() << "\n";
            code = kExitRuntime;
        }
    }
    emit_records(cfg, json);
    report_speedups(cfg, linsolve_speedups(records), summary);
    return code;
}

int run_fdtd(const CliConfig& cfg, std::ostream& summary, std::ostream& err)
{
    const auto result = run_fdtd_bench(cfg.fdtd_configs, cfg.fdtd_backends, cfg.fdtd_timing);
    std::vector<nlohmann::json> json;
    int code = kExitOk;
    for (const auto& r : result.records) {
        json.push_back(to_json(r, cfg.timing));
        if (!r.matches_reference) {
            err << "error: " << r.backend.name() << " fields differ from the reference backend\n";
            code = kExitRuntime;
        }
    }
    emit_records(cfg, json);
    report_speedups(cfg, result.speedups, summary);
    return code;
}

} // namespace

int execute(const CliConfig& cfg, std::ostream& out, std::ostream& err)
{
    // Human-readable summaries must not interleave with records written to stdout.
    std::ostream& summary = to_stdout(cfg.output_path) ? err : out;
    const bool single = cfg.sim.precision == Precision::Single;
    switch (cfg.subcommand) {
    case Subcommand::Simulate:
        single ? simulate<Field1D<float>, float>(cfg) : simulate<Field1D<double>, double>(cfg);
        return kExitOk;
    case Subcommand::Simulate3d:
        single ? simulate<Field3D<float>, float>(cfg) : simulate<Field3D<double>, double>(cfg);
        return kExitOk;
    case Subcommand::BenchBandwidth:
        return run_bandwidth(cfg, summary);
    case Subcommand::BenchLinsolve:
        return run_linsolve(cfg, summary, err);
    case Subcommand::BenchFdtd:
        return run_fdtd(cfg, summary, err);
    }
    return kExitRuntime;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CliConfig cfg;
    try {
        cfg = parse_args(argc, argv);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    try {
        return execute(cfg, out, err);
    } catch (const ConfigError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

} // namespace fdtdbench
