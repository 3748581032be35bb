#pragma once

// File formats.
//
// Snapshot CSV (one row per sample per snapshot, rows ordered by step then index):
//   1D: step,index,Ez,Hy
//   3D: step,i,j,k,Ex,Ey,Ez,Hx,Hy,Hz
// Values use 17 significant digits ("%.17g"), which round-trips every double exactly.
//
// Benchmark JSON lines, one object per record:
//   {"bench": "bandwidth"|"linsolve"|"fdtd", "n"|"bytes": int, "precision": "single"|"double"|null,
//    "backend": "serial"|"parallel:k", "elapsed_s": float|null, "flops": float|null,
//    "gigaflops"|"mb_per_s"|"updates_per_s": float|null, "residual": float|null,
//    "skipped": reason|null, ...}
// Timing-dependent values become null when timing output is disabled.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fdtdbench/bench.hpp"
#include "fdtdbench/engine.hpp"

namespace fdtdbench {

/// "%.17g".
std::string format_g17(double v);

template <std::floating_point Real>
void write_snapshot_csv(const SnapshotSeries<Field1D<Real>>& series, std::ostream& out);
template <std::floating_point Real>
void write_snapshot_csv(const SnapshotSeries<Field3D<Real>>& series, std::ostream& out);

/// Writes to `path`, or stdout for "-". Throws IoError naming the path; ConfigError for an
/// empty series.
template <class FieldT>
void emit_snapshot_csv(const SnapshotSeries<FieldT>& series, const std::string& path);

/// One parsed CSV data row: leading integer columns, then the field columns.
struct CsvRow
{
    std::vector<long long> keys;
    std::vector<double> values;
};

struct CsvTable
{
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
};

/// Reads a snapshot CSV: the first `key_columns` columns are integers, the rest doubles.
/// Throws IoError (path "<stream>") on malformed input.
CsvTable read_snapshot_csv(std::istream& in, std::size_t key_columns);

/// {"step": n, "Ez": [...], "Hy": [...]} (1D) or all six components plus "extent" (3D).
template <std::floating_point Real>
nlohmann::json to_json(const Snapshot<Field1D<Real>>& s);
template <std::floating_point Real>
nlohmann::json to_json(const Snapshot<Field3D<Real>>& s);

/// One snapshot object per line. Throws IoError; ConfigError for an empty series.
template <class FieldT>
void emit_snapshot_json(const SnapshotSeries<FieldT>& series, const std::string& path);

nlohmann::json to_json(const BandwidthRecord& r, bool timing = true);
nlohmann::json to_json(const SolveBenchRecord& r, bool timing = true);
nlohmann::json to_json(const FdtdBenchRecord& r, bool timing = true);
nlohmann::json to_json(const SpeedupRecord& r, bool timing = true);

/// Writes one compact JSON object per line to `path` (stdout for "-"). Throws IoError.
void emit_bench_json(const std::vector<nlohmann::json>& records, const std::string& path);

/// Nested object bench -> n -> precision -> [speedup entries].
nlohmann::json speedup_document(const std::vector<SpeedupRecord>& speedups, bool timing = true);

/// One line per record: "<tier>  <bytes>  <MB/s with one decimal>".
std::string bandwidth_summary(const std::vector<BandwidthRecord>& records);

/// Writes `text` to `path` (stdout for "-"). Throws IoError.
void write_text_file(const std::string& path, const std::string& text);

} // namespace fdtdbench
