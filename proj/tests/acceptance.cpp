// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero if any
// criterion fails. argv[1] is the path of the fdtdbench executable (criteria 10 and 11).

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fdtdbench/bench.hpp"
#include "fdtdbench/engine.hpp"
#include "fdtdbench/linsolve.hpp"
#include "fdtdbench/report.hpp"
#include "json.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace fdtdbench;
namespace fs = std::filesystem;

namespace {

// Tolerances, fixed here and nowhere else.
constexpr double kMagicTol = 1e-12;
constexpr double kMagicRuntimeS = 1.0;
constexpr double kSlopeTarget = 2.0;
constexpr double kSlopeTol = 0.1;
constexpr double kBackendRuntimeS = 60.0;
constexpr int kOracleInstances = 1000;
constexpr double kUniformityTol = 1e-10;
constexpr double kEnergySlack = 1e-12;
constexpr double kLossCourant = 0.5;
constexpr double kBandwidthExpected = 1493.1;
constexpr double kBandwidthTol = 0.1;
constexpr double kFlopsExpected = 7.17925e8;
constexpr double kFlopsTol = 1e4;

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Outcome magic_step()
{
    const auto t0 = std::chrono::steady_clock::now();
    auto cfg = SimulationConfig::default_1d(200);
    cfg.courant = 1.0;
    cfg.time_tot = 50;
    const auto series = run_1d(cfg, make_vacuum_materials<double>(cfg.extent));
    const double elapsed = seconds_since(t0);
    const auto& ez = series.entries.back().fields.ez;
    double worst = 0;
    for (int d = 0; d <= 40; ++d) {
        worst = std::max(worst, std::abs(ez[100 + d] - testutil::delayed_source(cfg.source, 50 - d, 1.0)));
    }
    return {worst <= kMagicTol && elapsed < kMagicRuntimeS,
            "max error " + fmt("%.3g", worst) + ", runtime " + fmt("%.3f", elapsed) + " s"};
}

Outcome convergence_order()
{
    const double deltas[] = {0.1, 0.05, 0.025, 0.0125};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double d : deltas) {
        const double err = std::abs(central_difference([](double x) { return std::sin(x); }, 1.0, d) - std::cos(1.0));
        const double lx = std::log(d), ly = std::log(err);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx);
    return {std::abs(slope - kSlopeTarget) <= kSlopeTol, "slope " + fmt("%.4f", slope)};
}

Outcome backend_equivalence()
{
    const auto t0 = std::chrono::steady_clock::now();
    const Backend backends[] = {Backend::serial(), Backend::parallel(1), Backend::parallel(4), Backend::parallel(8)};

    auto c1 = SimulationConfig::default_1d(1'000'000);
    c1.time_tot = 100;
    c1.snapshot_every = 50;
    const auto m1 = make_vacuum_materials<double>(c1.extent);
    auto c3 = SimulationConfig::default_3d(64);
    c3.time_tot = 20;
    c3.snapshot_every = 10;
    const auto m3 = make_vacuum_materials<double>(c3.extent);

    bool same = true;
    const auto ref1 = run_1d(c1, m1, backends[0]);
    for (std::size_t b = 1; b < 4; ++b) {
        same = same && testutil::same_bits(run_1d(c1, m1, backends[b]), ref1);
    }
    const auto ref3 = run_3d(c3, m3, backends[0]);
    for (std::size_t b = 1; b < 4; ++b) {
        same = same && testutil::same_bits(run_3d(c3, m3, backends[b]), ref3);
    }
    const double elapsed = seconds_since(t0);
    return {same && elapsed < kBackendRuntimeS,
            std::string(same ? "identical" : "DIFFERENT") + " across serial, parallel:1, parallel:4, parallel:8; runtime "
                + fmt("%.1f", elapsed) + " s"};
}

Outcome kernel_oracle()
{
    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> len(8, 32);
    std::uniform_real_distribution<double> courant(0.01, 1.0);
    int mismatches = 0;
    for (int trial = 0; trial < kOracleInstances; ++trial) {
        const int xdim = len(rng);
        auto cfg = SimulationConfig::default_1d(static_cast<std::size_t>(xdim));
        cfg.courant = courant(rng);
        cfg.source.location[0] = 1 + static_cast<std::size_t>(rng() % (xdim - 2));
        auto m = make_vacuum_materials<double>(cfg.extent);
        m.epsilon = testutil::uniform(rng, xdim, 1.0, 10.0);
        m.mu = testutil::uniform(rng, xdim, 1.0, 10.0);
        Field1D<double> f(xdim);
        f.ez = testutil::uniform(rng, xdim, -1, 1);
        f.hy = testutil::uniform(rng, xdim, -1, 1);
        const std::int64_t n = 1 + static_cast<std::int64_t>(rng() % 1000);

        oracle::OneBased1D lst(f.ez, f.hy, m.mu, m.epsilon, cfg.courant, cfg.delta);
        lst.h_loop();
        lst.e_loop();
        lst.source(static_cast<int>(n), 1, 20.0, static_cast<int>(cfg.source.location[0]) + 1);

        Simulation1D<double> sim(cfg, m);
        sim.fields() = f;
        sim.fields().step = n - 1;
        sim.step();
        if (!testutil::same_bits(sim.fields().ez, lst.ez0()) || !testutil::same_bits(sim.fields().hy, lst.hy0())) {
            ++mismatches;
        }
    }
    return {mismatches == 0,
            std::to_string(kOracleInstances - mismatches) + "/" + std::to_string(kOracleInstances) + " bitwise matches"};
}

Outcome uniformity_reduction()
{
    const std::size_t nx = 32, ny = 8, nz = 8;
    const int steps = 10;
    auto c3 = SimulationConfig::default_3d(8);
    c3.extent = Extent{nx, ny, nz};
    c3.courant = 0.5;
    c3.time_tot = steps;
    c3.source.plane = true;
    c3.source.location = {nx / 2, 0, 0};
    Simulation3D<double> s3(c3, make_vacuum_materials<double>(c3.extent));

    auto c1 = SimulationConfig::default_1d(nx);
    c1.courant = 0.5;
    c1.time_tot = steps;
    Simulation1D<double> s1(c1, make_vacuum_materials<double>(c1.extent));

    double worst = 0;
    int first_bad = 0;
    for (int n = 1; n <= steps; ++n) {
        s3.step();
        s1.step();
        for (std::size_t i = 0; i < nx; ++i) {
            const std::size_t q = c3.extent.index(i, ny / 2, nz / 2);
            worst = std::max({worst, std::abs(s3.fields().ez[q] - s1.fields().ez[i]),
                              std::abs(s3.fields().hy[q] - s1.fields().hy[i])});
        }
        if (first_bad == 0 && worst > kUniformityTol) {
            first_bad = n;
        }
    }
    std::string detail = "centre-line max deviation " + fmt("%.3g", worst) + " (32x8x8, 10 steps)";
    if (first_bad > 0) {
        detail += "; exact through step " + std::to_string(first_bad - 1) + ", frozen y/z wall cells reach the centre line at step "
                  + std::to_string(first_bad);
    }
    return {worst <= kUniformityTol, detail};
}

Outcome loss_monotonicity()
{
    auto cfg = SimulationConfig::default_1d(200);
    cfg.courant = kLossCourant;
    cfg.source.tstop = 20;
    auto m = make_vacuum_materials<double>(cfg.extent);
    std::fill(m.sigma.begin(), m.sigma.end(), 0.01);
    Simulation1D<double> sim(cfg, m);
    for (int n = 1; n <= 21; ++n) {
        sim.step();
    }
    double prev = energy_proxy(sim.fields(), m);
    double worst_rise = 0;
    for (int n = 22; n <= 200; ++n) {
        sim.step();
        const double w = energy_proxy(sim.fields(), m);
        worst_rise = std::max(worst_rise, w - prev);
        prev = w;
    }
    return {worst_rise <= kEnergySlack,
            "largest step-over-step rise " + fmt("%.3g", worst_rise) + " at S=" + fmt("%.2f", kLossCourant)};
}

Outcome solver_residual()
{
    LinsolveBenchOptions opt;
    opt.sizes = {64, 256, 1024};
    opt.precisions = {Precision::Single, Precision::Double};
    opt.backends = {Backend::serial(), Backend::parallel(4)};
    opt.timing.min_window_s = 0.0;
    const auto records = run_linsolve_bench(opt);
    bool ok = records.size() == 12;
    double worst_ratio = 0;
    for (const auto& r : records) {
        if (r.skipped) {
            ok = false;
            continue;
        }
        const double bound = r.precision == Precision::Single ? residual_bound<float>(r.n) : residual_bound<double>(r.n);
        worst_ratio = std::max(worst_ratio, r.residual / bound);
        ok = ok && r.residual <= bound;
    }
    bool singular = false;
    try {
        DenseMatrix<double> a(4, 1.0);
        lu_factor(a);
    } catch (const SingularMatrix&) {
        singular = true;
    }
    return {ok && singular, std::to_string(records.size()) + " points, worst residual/bound "
                                + fmt("%.3g", worst_ratio) + (singular ? ", singular input rejected" : ", singular NOT rejected")};
}

Outcome derived_metrics()
{
    const double bw = compute_bandwidth(33554432, 0.021432, 1);
    const double flops = flop_count_left_division(1024);
    SolveBenchRecord p, s;
    p.n = s.n = 1024;
    p.backend = Backend::parallel(4);
    p.gigaflops = 15.0;
    s.gigaflops = 10.0;
    const double speedup = compute_speedup(p, s).speedup;
    const bool ok = std::abs(bw - kBandwidthExpected) <= kBandwidthTol && std::abs(flops - kFlopsExpected) <= kFlopsTol
                    && speedup == 1.5;
    return {ok, "bandwidth " + fmt("%.2f", bw) + " MB/s, flops(1024) " + fmt("%.1f", flops) + ", speedup "
                    + fmt("%.17g", speedup)};
}

Outcome linearity()
{
    auto cfg = SimulationConfig::default_1d(200);
    cfg.time_tot = 100;
    const auto m = make_vacuum_materials<double>(cfg.extent);
    const auto a = run_1d(cfg, m).entries.back().fields;
    cfg.source.amplitude = 2.0;
    const auto b = run_1d(cfg, m).entries.back().fields;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        bad += (b.ez[i] != 2.0 * a.ez[i]) + (b.hy[i] != 2.0 * a.hy[i]);
    }
    return {bad == 0, std::to_string(bad) + " of " + std::to_string(2 * a.size()) + " samples differ from 2x"};
}

int run_binary(const std::string& exe, const std::string& args)
{
    const std::string cmd = "'" + exe + "' " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome cli_golden(const std::string& exe, const fs::path& dir)
{
    const auto a = dir / "golden_a.csv", b = dir / "golden_b.csv", c = dir / "golden_c.csv";
    const int ra = run_binary(exe, "simulate --seed 42 -o '" + a.string() + "'");
    const int rb = run_binary(exe, "simulate --seed 42 -o '" + b.string() + "'");
    const int rc = run_binary(exe, "simulate --seed 42 --backend parallel:4 -o '" + c.string() + "'");
    const std::string ta = slurp(a);
    const bool identical = !ta.empty() && ta == slurp(b) && ta == slurp(c);
    const int io = run_binary(exe, "simulate --steps 2 -o '" + (dir / "missing" / "x.csv").string() + "'");
    const int flag = run_binary(exe, "simulate --no-such-flag");
    const bool codes = ra == 0 && rb == 0 && rc == 0 && io == 1 && flag == 2;
    return {identical && codes, std::string(identical ? "byte-identical" : "outputs DIFFER") + "; exit codes ok/io/usage = "
                                    + std::to_string(ra) + "/" + std::to_string(io) + "/" + std::to_string(flag)};
}

Outcome memory_limit(const std::string& exe, const fs::path& dir)
{
    const auto out = dir / "skip.jsonl";
    const int code = run_binary(exe, "bench-linsolve --sizes 20000 --backend serial --memory-cap 1G -o '"
                                         + out.string() + "'");
    std::ifstream in(out);
    std::string line;
    std::string reason = "<none>";
    if (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line, nullptr, false);
        if (!j.is_discarded() && j.contains("skipped") && j["skipped"].is_string()) {
            reason = j["skipped"].get<std::string>();
        }
    }
    return {code == 0 && reason == kMemoryLimit, "exit " + std::to_string(code) + ", skip reason " + reason};
}

} // namespace

int main(int argc, char** argv)
{
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-fdtdbench>\n";
        return 2;
    }
    const std::string exe = argv[1];
    const fs::path dir = fs::temp_directory_path() / ("fdtdbench_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);

    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"magic time step exactness", magic_step},
        {"central difference convergence order", convergence_order},
        {"backend bitwise equivalence", backend_equivalence},
        {"1D kernel loop oracle", kernel_oracle},
        {"3D lossless uniformity reduction", uniformity_reduction},
        {"loss monotonicity", loss_monotonicity},
        {"solver residual", solver_residual},
        {"derived metric arithmetic", derived_metrics},
        {"source linearity", linearity},
        {"CLI golden files and exit codes", [&] { return cli_golden(exe, dir); }},
        {"memory-limit skip", [&] { return memory_limit(exe, dir); }},
    };

    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << index << ". " << name << ": " << o.detail << std::endl;
    }
    fs::remove_all(dir);
    std::cout << (index - failed) << " of " << index << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
