#include "fdtdbench/report.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fdtdbench {

std::string format_g17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

// Appends "," + value for each sample.
template <class... Rs>
void append_values(std::string& line, Rs... values)
{
    ((line += ',', line += format_g17(double(values))), ...);
}

} // namespace

template <std::floating_point Real>
void write_snapshot_csv(const SnapshotSeries<Field1D<Real>>& series, std::ostream& out)
{
    out << "step,index,Ez,Hy\n";
    std::string line;
    for (const auto& snap : series.entries) {
        const auto& f = snap.fields;
        for (std::size_t i = 0; i < f.size(); ++i) {
            line = std::to_string(snap.step);
            line += ',';
            line += std::to_string(i);
            append_values(line, f.ez[i], f.hy[i]);
            line += '\n';
            out << line;
        }
    }
}

template <std::floating_point Real>
void write_snapshot_csv(const SnapshotSeries<Field3D<Real>>& series, std::ostream& out)
{
    out << "step,i,j,k,Ex,Ey,Ez,Hx,Hy,Hz\n";
    std::string line;
    for (const auto& snap : series.entries) {
        const auto& f = snap.fields;
        const Extent& e = f.extent;
        for (std::size_t i = 0; i < e.nx; ++i) {
            for (std::size_t j = 0; j < e.ny; ++j) {
                for (std::size_t k = 0; k < e.nz; ++k) {
                    const std::size_t c = e.index(i, j, k);
                    line = std::to_string(snap.step) + ',' + std::to_string(i) + ','
                           + std::to_string(j) + ',' + std::to_string(k);
                    append_values(line, f.ex[c], f.ey[c], f.ez[c], f.hx[c], f.hy[c], f.hz[c]);
                    line += '\n';
                    out << line;
                }
            }
        }
    }
}

namespace {

template <class Writer>
void with_output(const std::string& path, Writer&& write)
{
    if (path.empty() || path == "-") {
        write(std::cout);
        std::cout.flush();
        if (!std::cout) {
            throw IoError("<stdout>", "write failed");
        }
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError(path, std::strerror(errno));
    }
    write(out);
    out.flush();
    if (!out) {
        throw IoError(path, "write failed");
    }
}

} // namespace

template <class FieldT>
void emit_snapshot_csv(const SnapshotSeries<FieldT>& series, const std::string& path)
{
    if (series.entries.empty()) {
        throw ConfigError("cannot emit an empty snapshot series");
    }
    with_output(path, [&](std::ostream& out) { write_snapshot_csv(series, out); });
}

CsvTable read_snapshot_csv(std::istream& in, std::size_t key_columns)
{
    CsvTable table;
    std::string line;
    if (!std::getline(in, line)) {
        throw IoError("<stream>", "missing CSV header");
    }
    {
        std::istringstream hs(line);
        std::string col;
        while (std::getline(hs, col, ',')) {
            table.header.push_back(col);
        }
    }
    if (table.header.size() <= key_columns) {
        throw IoError("<stream>", "CSV header has too few columns");
    }
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        CsvRow row;
        const char* p = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t c = 0; c < table.header.size(); ++c) {
            const char* stop = std::find(p, end, ',');
            if (c < key_columns) {
                long long v = 0;
                const auto [ptr, ec] = std::from_chars(p, stop, v);
                if (ec != std::errc{} || ptr != stop) {
                    throw IoError("<stream>", "bad integer on line " + std::to_string(line_no));
                }
                row.keys.push_back(v);
            } else {
                // strtod accepts every "%.17g" output, including inf/nan spellings.
                std::string cell(p, stop);
                char* parsed_end = nullptr;
                const double v = std::strtod(cell.c_str(), &parsed_end);
                if (cell.empty() || parsed_end != cell.c_str() + cell.size()) {
                    throw IoError("<stream>", "bad number on line " + std::to_string(line_no));
                }
                row.values.push_back(v);
            }
            if (stop == end && c + 1 < table.header.size()) {
                throw IoError("<stream>", "short row on line " + std::to_string(line_no));
            }
            p = stop == end ? end : stop + 1;
        }
        if (p != end) {
            throw IoError("<stream>", "extra columns on line " + std::to_string(line_no));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

template <std::floating_point Real>
nlohmann::json to_json(const Snapshot<Field1D<Real>>& s)
{
    return {{"step", s.step}, {"Ez", s.fields.ez}, {"Hy", s.fields.hy}};
}

template <std::floating_point Real>
nlohmann::json to_json(const Snapshot<Field3D<Real>>& s)
{
    const Extent& e = s.fields.extent;
    return {
        {"step", s.step}, {"extent", {e.nx, e.ny, e.nz}},
        {"Ex", s.fields.ex}, {"Ey", s.fields.ey}, {"Ez", s.fields.ez},
        {"Hx", s.fields.hx}, {"Hy", s.fields.hy}, {"Hz", s.fields.hz},
    };
}

template <class FieldT>
void emit_snapshot_json(const SnapshotSeries<FieldT>& series, const std::string& path)
{
    if (series.entries.empty()) {
        throw ConfigError("cannot emit an empty snapshot series");
    }
    with_output(path, [&](std::ostream& out) {
        for (const auto& snap : series.entries) {
            out << to_json(snap).dump() << '\n';
        }
    });
}

namespace {

nlohmann::json timed(bool timing, double v)
{
    return timing ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

nlohmann::json to_json(const BandwidthRecord& r, bool timing)
{
    return {
        {"bench", "bandwidth"},
        {"bytes", r.bytes},
        {"precision", nullptr},
        {"backend", "serial"},
        {"tier", std::string(to_string(r.tier))},
        {"repeats", r.repeats},
        {"elapsed_s", timed(timing, r.elapsed_s)},
        {"flops", nullptr},
        {"mb_per_s", timed(timing, r.mb_per_s)},
        {"residual", nullptr},
        {"skipped", nullptr},
    };
}

nlohmann::json to_json(const SolveBenchRecord& r, bool timing)
{
    nlohmann::json j = {
        {"bench", "linsolve"},
        {"n", r.n},
        {"precision", std::string(to_string(r.precision))},
        {"backend", r.backend.name()},
    };
    if (r.skipped) {
        j["elapsed_s"] = nullptr;
        j["flops"] = nullptr;
        j["gigaflops"] = nullptr;
        j["residual"] = nullptr;
        j["skipped"] = *r.skipped;
        j["detail"] = r.skip_detail;
        return j;
    }
    j["elapsed_s"] = timed(timing, r.elapsed_s);
    j["flops"] = r.flops;
    j["gigaflops"] = timed(timing, r.gigaflops);
    j["residual"] = r.residual;
    j["skipped"] = nullptr;
    return j;
}

nlohmann::json to_json(const FdtdBenchRecord& r, bool timing)
{
    return {
        {"bench", "fdtd"},
        {"n", r.extent.cells()},
        {"dims", r.dims},
        {"extent", {r.extent.nx, r.extent.ny, r.extent.nz}},
        {"steps", r.steps},
        {"precision", std::string(to_string(r.precision))},
        {"backend", r.backend.name()},
        {"elapsed_s", timed(timing, r.elapsed_s)},
        {"flops", nullptr},
        {"cell_updates", r.cell_updates},
        {"updates_per_s", timed(timing, r.updates_per_s)},
        {"residual", nullptr},
        {"matches_reference", r.matches_reference},
        {"skipped", nullptr},
    };
}

nlohmann::json to_json(const SpeedupRecord& r, bool timing)
{
    return {
        {"backend", r.parallel_backend},
        {"serial", timed(timing, r.serial)},
        {"parallel", timed(timing, r.parallel)},
        {"speedup", timed(timing, r.speedup)},
    };
}

void emit_bench_json(const std::vector<nlohmann::json>& records, const std::string& path)
{
    with_output(path, [&](std::ostream& out) {
        for (const auto& r : records) {
            out << r.dump() << '\n';
        }
    });
}

nlohmann::json speedup_document(const std::vector<SpeedupRecord>& speedups, bool timing)
{
    nlohmann::json doc = nlohmann::json::object();
    for (const auto& s : speedups) {
        doc[s.bench][std::to_string(s.n)][std::string(to_string(s.precision))].push_back(
            to_json(s, timing));
    }
    return doc;
}

std::string bandwidth_summary(const std::vector<BandwidthRecord>& records)
{
    std::string out;
    char buf[128];
    for (const auto& r : records) {
        std::snprintf(buf, sizeof buf, "%s  %llu  %.1f\n", std::string(to_string(r.tier)).c_str(),
                      static_cast<unsigned long long>(r.bytes), r.mb_per_s);
        out += buf;
    }
    return out;
}

void write_text_file(const std::string& path, const std::string& text)
{
    with_output(path, [&](std::ostream& out) { out << text; });
}

template void write_snapshot_csv<float>(const SnapshotSeries<Field1D<float>>&, std::ostream&);
template void write_snapshot_csv<double>(const SnapshotSeries<Field1D<double>>&, std::ostream&);
template void write_snapshot_csv<float>(const SnapshotSeries<Field3D<float>>&, std::ostream&);
template void write_snapshot_csv<double>(const SnapshotSeries<Field3D<double>>&, std::ostream&);
template nlohmann::json to_json<float>(const Snapshot<Field1D<float>>&);
template nlohmann::json to_json<double>(const Snapshot<Field1D<double>>&);
template nlohmann::json to_json<float>(const Snapshot<Field3D<float>>&);
template nlohmann::json to_json<double>(const Snapshot<Field3D<double>>&);
template void emit_snapshot_json(const SnapshotSeries<Field1D<float>>&, const std::string&);
template void emit_snapshot_json(const SnapshotSeries<Field1D<double>>&, const std::string&);
template void emit_snapshot_json(const SnapshotSeries<Field3D<float>>&, const std::string&);
template void emit_snapshot_json(const SnapshotSeries<Field3D<double>>&, const std::string&);
template void emit_snapshot_csv(const SnapshotSeries<Field1D<float>>&, const std::string&);
template void emit_snapshot_csv(const SnapshotSeries<Field1D<double>>&, const std::string&);
template void emit_snapshot_csv(const SnapshotSeries<Field3D<float>>&, const std::string&);
template void emit_snapshot_csv(const SnapshotSeries<Field3D<double>>&, const std::string&);

} // namespace fdtdbench
