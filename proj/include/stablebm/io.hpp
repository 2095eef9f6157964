#pragma once
// Serialization: CSV tables (%.17g, LF line endings), flat binary formats
// for grids and kernel tables, and FNV-1a checksums for manifests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "grid.hpp"
#include "stable_density.hpp"

namespace sbm {

inline std::string csv_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

using CsvRow = std::vector<std::string>;

struct CsvTable {
    CsvRow header;
    std::vector<CsvRow> rows;
};

inline void write_csv(const std::string& path, const CsvRow& header,
                      const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary); // binary => LF endings everywhere
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    auto emit = [&out](const CsvRow& row) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << row[i];
        }
        out << '\n';
    };
    emit(header);
    for (const CsvRow& r : rows) {
        if (r.size() != header.size())
            throw std::invalid_argument("csv row width differs from header");
        emit(r);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline void write_csv_numeric(const std::string& path, const CsvRow& header,
                              const std::vector<std::vector<double>>& rows) {
    std::vector<CsvRow> srows;
    srows.reserve(rows.size());
    for (const auto& r : rows) {
        CsvRow s;
        s.reserve(r.size());
        for (double v : r) s.push_back(csv_number(v));
        srows.push_back(std::move(s));
    }
    write_csv(path, header, srows);
}

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() && in.eof()) break;
        CsvRow row;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        if (!line.empty() && line.back() == ',') row.emplace_back();
        if (first) {
            t.header = std::move(row);
            first = false;
        } else {
            if (row.size() != t.header.size())
                throw std::runtime_error("csv row width differs from header: " + path);
            t.rows.push_back(std::move(row));
        }
    }
    if (first) throw std::runtime_error("empty csv: " + path);
    return t;
}

// ---- checksums --------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 14695981039346656037ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string checksum_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::string file_checksum_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for checksum: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0)
        h = fnv1a64(buf, static_cast<std::size_t>(in.gcount()), h);
    return checksum_hex(h);
}

// ---- flat binary formats (native little-endian layout) ----------------

namespace detail {

inline void put_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

inline void get_bytes(std::ifstream& in, void* p, std::size_t n,
                      const std::string& path) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n)
        throw std::runtime_error("truncated binary file: " + path);
}

inline void put_i64(std::ofstream& out, std::int64_t v) { put_bytes(out, &v, 8); }
inline void put_f64(std::ofstream& out, double v) { put_bytes(out, &v, 8); }

inline std::int64_t get_i64(std::ifstream& in, const std::string& path) {
    std::int64_t v;
    get_bytes(in, &v, 8, path);
    return v;
}

inline double get_f64(std::ifstream& in, const std::string& path) {
    double v;
    get_bytes(in, &v, 8, path);
    return v;
}

inline void put_f64v(std::ofstream& out, const std::vector<double>& v) {
    if (!v.empty()) put_bytes(out, v.data(), v.size() * 8);
}

inline void get_f64v(std::ifstream& in, std::vector<double>& v, std::size_t n,
                     const std::string& path) {
    v.resize(n);
    if (n) get_bytes(in, v.data(), n * 8, path);
}

} // namespace detail

inline void write_grid_binary(const std::string& path, const GridFunction& g) {
    g.validate();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("SBMGRID1", 8);
    detail::put_i64(out, g.d);
    detail::put_f64(out, g.spacing);
    for (int a = 0; a < g.d; ++a) detail::put_i64(out, g.extent[a]);
    for (int a = 0; a < g.d; ++a) detail::put_f64(out, g.origin[a]);
    detail::put_i64(out, static_cast<std::int64_t>(g.t_slices.size()));
    detail::put_f64v(out, g.t_slices);
    if (g.t_slices.empty()) {
        detail::put_f64v(out, g.values);
    } else {
        for (const auto& sv : g.slice_values) detail::put_f64v(out, sv);
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline GridFunction read_grid_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[8];
    detail::get_bytes(in, magic, 8, path);
    if (std::memcmp(magic, "SBMGRID1", 8) != 0)
        throw std::runtime_error("bad grid file magic: " + path);
    GridFunction g;
    g.d = static_cast<int>(detail::get_i64(in, path));
    if (g.d < 1 || g.d > 3) throw std::runtime_error("bad grid dimension: " + path);
    g.spacing = detail::get_f64(in, path);
    g.extent.resize(g.d);
    for (int a = 0; a < g.d; ++a)
        g.extent[a] = static_cast<int>(detail::get_i64(in, path));
    g.origin.resize(g.d);
    for (int a = 0; a < g.d; ++a) g.origin[a] = detail::get_f64(in, path);
    std::size_t ns = static_cast<std::size_t>(detail::get_i64(in, path));
    detail::get_f64v(in, g.t_slices, ns, path);
    if (ns == 0) {
        detail::get_f64v(in, g.values, g.size(), path);
    } else {
        g.slice_values.resize(ns);
        for (auto& sv : g.slice_values) detail::get_f64v(in, sv, g.size(), path);
    }
    g.validate();
    return g;
}

// Human-readable grid export: one row per cell (slice height first when
// stacked), coordinates then value.
inline void write_grid_csv(const std::string& path, const GridFunction& g) {
    g.validate();
    CsvRow header;
    const bool stacked = !g.t_slices.empty();
    if (stacked) header.push_back("t");
    for (int a = 0; a < g.d; ++a) header.push_back("x" + std::to_string(a));
    header.push_back("value");
    std::vector<CsvRow> rows;
    rows.reserve((stacked ? g.t_slices.size() : 1) * g.size());
    std::vector<int> idx(g.d, 0);
    auto cell_row = [&](double v, double t, CsvRow& row) {
        row.clear();
        if (stacked) row.push_back(csv_number(t));
        for (int a = 0; a < g.d; ++a) row.push_back(csv_number(g.coordinate(a, idx[a])));
        row.push_back(csv_number(v));
    };
    auto sweep = [&](const std::vector<double>& vals, double t) {
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t flat = 0; flat < vals.size(); ++flat) {
            CsvRow row;
            cell_row(vals[flat], t, row);
            rows.push_back(std::move(row));
            for (int a = g.d - 1; a >= 0; --a) {
                if (++idx[a] < g.extent[a]) break;
                idx[a] = 0;
            }
        }
    };
    if (stacked)
        for (std::size_t k = 0; k < g.t_slices.size(); ++k)
            sweep(g.slice_values[k], g.t_slices[k]);
    else
        sweep(g.values, 0.0);
    write_csv(path, header, rows);
}

// Rebuilds a grid from its CSV export; geometry is inferred from the
// coordinate columns.
inline GridFunction read_grid_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.header.size() < 2 || t.header.back() != "value")
        throw std::runtime_error("unrecognized grid csv header: " + path);
    const bool stacked = t.header.front() == "t";
    const int d = static_cast<int>(t.header.size()) - 1 - (stacked ? 1 : 0);
    if (d < 1 || d > 3) throw std::runtime_error("bad grid csv dimension: " + path);
    auto axis_values = [&](std::size_t col) {
        std::vector<double> u;
        for (const CsvRow& r : t.rows) {
            double x = std::stod(r[col]);
            bool seen = false;
            for (double y : u)
                if (std::fabs(y - x) <= 1e-12 * (1.0 + std::fabs(x))) { seen = true; break; }
            if (!seen) u.push_back(x);
        }
        std::sort(u.begin(), u.end());
        return u;
    };
    GridFunction g;
    g.d = d;
    std::vector<std::vector<double>> axes(d);
    for (int a = 0; a < d; ++a) axes[a] = axis_values(static_cast<std::size_t>(a) + (stacked ? 1 : 0));
    g.spacing = axes[0].size() > 1 ? axes[0][1] - axes[0][0] : 1.0;
    for (int a = 0; a < d; ++a) {
        g.extent.push_back(static_cast<int>(axes[a].size()));
        g.origin.push_back(axes[a].front());
    }
    std::vector<double> heights;
    if (stacked) heights = axis_values(0);
    auto locate = [&](const std::vector<double>& axis, double x) {
        long i = std::lround((x - axis.front()) / g.spacing);
        if (i < 0 || i >= static_cast<long>(axis.size()))
            throw std::runtime_error("off-lattice coordinate in grid csv: " + path);
        return static_cast<std::size_t>(i);
    };
    if (stacked) {
        g.t_slices = heights;
        g.slice_values.assign(heights.size(), std::vector<double>(g.size(), 0.0));
    } else {
        g.values.assign(g.size(), 0.0);
    }
    for (const CsvRow& r : t.rows) {
        std::size_t flat = 0;
        for (int a = 0; a < d; ++a)
            flat = flat * static_cast<std::size_t>(g.extent[a]) +
                   locate(axes[a], std::stod(r[static_cast<std::size_t>(a) + (stacked ? 1 : 0)]));
        double v = std::stod(r.back());
        if (stacked) {
            double tv = std::stod(r.front());
            std::size_t k = 0;
            while (k < heights.size() &&
                   std::fabs(heights[k] - tv) > 1e-12 * (1.0 + std::fabs(tv)))
                ++k;
            if (k == heights.size())
                throw std::runtime_error("off-lattice height in grid csv: " + path);
            g.slice_values[k][flat] = v;
        } else {
            g.values[flat] = v;
        }
    }
    g.validate();
    return g;
}

inline void write_kernel_table_binary(const std::string& path, const KernelTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("SBMKTBL1", 8);
    detail::put_i64(out, t.params.d);
    detail::put_f64(out, t.params.alpha);
    detail::put_f64(out, t.accuracy);
    detail::put_i64(out, static_cast<std::int64_t>(t.s_grid.size()));
    detail::put_i64(out, static_cast<std::int64_t>(t.r_grid.size()));
    detail::put_f64v(out, t.s_grid);
    detail::put_f64v(out, t.r_grid);
    detail::put_f64v(out, t.values);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline KernelTable read_kernel_table_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    char magic[8];
    detail::get_bytes(in, magic, 8, path);
    if (std::memcmp(magic, "SBMKTBL1", 8) != 0)
        throw std::runtime_error("bad kernel table magic: " + path);
    KernelTable t;
    t.params.d = static_cast<int>(detail::get_i64(in, path));
    t.params.alpha = detail::get_f64(in, path);
    t.params.validate();
    t.accuracy = detail::get_f64(in, path);
    std::size_t ns = static_cast<std::size_t>(detail::get_i64(in, path));
    std::size_t nr = static_cast<std::size_t>(detail::get_i64(in, path));
    detail::get_f64v(in, t.s_grid, ns, path);
    detail::get_f64v(in, t.r_grid, nr, path);
    detail::get_f64v(in, t.values, ns * nr, path);
    t.check_grids();
    t.validate();
    return t;
}

} // namespace sbm
