#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pfc/errors.hpp"
#include "pfc/field.hpp"
#include "pfc/model.hpp"
#include "pfc/stepper.hpp"

namespace pfc {

/// FNV-1a over raw bytes; used as the snapshot content checksum.
inline std::uint64_t fnv1a64(const void* data, std::size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

/// Diagnostics CSV writer. Column order is part of the output contract:
/// step,t,energy,mass,max_norm,energy_delta,bound_violated
class CsvDiagnosticsSink : public DiagnosticsSink {
  public:
    explicit CsvDiagnosticsSink(const std::string& path) : out_(path) {
        if (!out_) throw config_error("cannot open diagnostics file: " + path);
        out_ << "step,t,energy,mass,max_norm,energy_delta,bound_violated\n";
    }

    void append(const DiagnosticsRecord& r) override {
        out_ << r.step << ',' << format_double(r.t) << ',' << format_double(r.energy) << ','
             << format_double(r.mass) << ',' << format_double(r.max_norm) << ','
             << format_double(r.energy_delta) << ',' << (r.bound_violated ? 1 : 0) << '\n';
    }

    void flush() override { out_.flush(); }

  private:
    std::ofstream out_;
};

namespace detail {
inline void write_le_doubles(std::ostream& out, const std::vector<double>& data) {
    static_assert(sizeof(double) == 8);
    // this codebase targets little-endian hosts; snapshots are defined LE
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size() * sizeof(double)));
}
} // namespace detail

/// Raw field dump: little-endian float64, row-major (x fastest), no header.
/// The sidecar JSON carries grid, time, model parameters and a checksum.
inline void write_snapshot(const std::filesystem::path& dir, const Field& f, long step, double t,
                           const ModelParams& p) {
    std::filesystem::create_directories(dir);
    const std::string stem = "field_" + std::to_string(step);
    const auto bin_path = dir / (stem + ".f64");
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) throw config_error("cannot open snapshot file: " + bin_path.string());
    detail::write_le_doubles(bin, f.data);
    bin.close();

    nlohmann::json meta;
    meta["dims"] = std::vector<int>(f.grid.dims.begin(), f.grid.dims.begin() + f.grid.ndim);
    meta["lengths"] = std::vector<double>(f.grid.lengths.begin(), f.grid.lengths.begin() + f.grid.ndim);
    meta["step"] = step;
    meta["t"] = t;
    meta["model"] = {{"epsilon", p.epsilon}, {"a", p.a},    {"alpha", p.alpha},
                     {"beta", p.beta},       {"r", p.r},    {"m0", std::isfinite(p.m0) ? nlohmann::json(p.m0) : nlohmann::json("inf")},
                     {"lip", std::isfinite(p.lip) ? nlohmann::json(p.lip) : nlohmann::json("inf")}};
    meta["checksum_fnv1a64"] = fnv1a64(f.data.data(), f.data.size() * sizeof(double));
    std::ofstream side(dir / (stem + ".json"));
    side << meta.dump(2) << "\n";
}

struct Snapshot {
    std::vector<double> data;
    std::vector<int> dims;
    std::vector<double> lengths;
    double t = 0.0;
    long step = 0;
};

inline Snapshot read_snapshot(const std::filesystem::path& bin_path) {
    std::filesystem::path side_path = bin_path;
    side_path.replace_extension(".json");
    std::ifstream side(side_path);
    if (!side) throw config_error("cannot open snapshot sidecar: " + side_path.string());
    nlohmann::json meta;
    try {
        side >> meta;
    } catch (const nlohmann::json::exception& e) {
        throw config_error(side_path.string() + ": " + e.what());
    }

    Snapshot snap;
    snap.dims = meta.at("dims").get<std::vector<int>>();
    snap.lengths = meta.at("lengths").get<std::vector<double>>();
    snap.t = meta.at("t").get<double>();
    snap.step = meta.at("step").get<long>();

    std::int64_t count = 1;
    for (int n : snap.dims) count *= n;
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw config_error("cannot open snapshot file: " + bin_path.string());
    snap.data.resize(static_cast<std::size_t>(count));
    bin.read(reinterpret_cast<char*>(snap.data.data()),
             static_cast<std::streamsize>(snap.data.size() * sizeof(double)));
    if (bin.gcount() != static_cast<std::streamsize>(snap.data.size() * sizeof(double)))
        throw config_error("snapshot file truncated: " + bin_path.string());

    if (meta.contains("checksum_fnv1a64")) {
        const auto expect = meta["checksum_fnv1a64"].get<std::uint64_t>();
        if (fnv1a64(snap.data.data(), snap.data.size() * sizeof(double)) != expect)
            throw config_error("snapshot checksum mismatch: " + bin_path.string());
    }
    return snap;
}

/// 8-bit grayscale PGM (P5). Normalization is per-frame min/max unless a
/// fixed range is supplied; a constant field maps to mid-gray. The range
/// actually used is written to a JSON sidecar.
inline void render_pgm(const Snapshot& snap, const std::filesystem::path& out_path,
                       bool fixed_range = false, double range_min = 0.0, double range_max = 1.0) {
    if (snap.dims.size() != 2) throw config_error("render: only 2D snapshots can be rendered");
    const int nx = snap.dims[0], ny = snap.dims[1];

    double lo = range_min, hi = range_max;
    if (!fixed_range) {
        lo = *std::min_element(snap.data.begin(), snap.data.end());
        hi = *std::max_element(snap.data.begin(), snap.data.end());
    }

    std::ofstream img(out_path, std::ios::binary);
    if (!img) throw config_error("cannot open image file: " + out_path.string());
    img << "P5\n" << nx << " " << ny << "\n255\n";
    const double span = hi - lo;
    std::vector<unsigned char> row(static_cast<std::size_t>(nx));
    for (int y = ny - 1; y >= 0; --y) { // top row of the image = largest y
        for (int x = 0; x < nx; ++x) {
            const double v = snap.data[static_cast<std::size_t>(y) * nx + x];
            double u = span > 0.0 ? (v - lo) / span : 0.5;
            u = std::clamp(u, 0.0, 1.0);
            row[static_cast<std::size_t>(x)] = static_cast<unsigned char>(std::lround(u * 255.0));
        }
        img.write(reinterpret_cast<const char*>(row.data()), nx);
    }
    img.close();

    nlohmann::json meta;
    meta["source_step"] = snap.step;
    meta["t"] = snap.t;
    meta["normalization"] = {{"min", lo}, {"max", hi}, {"fixed_range", fixed_range}};
    std::filesystem::path side = out_path;
    side += ".json";
    std::ofstream sout(side);
    sout << meta.dump(2) << "\n";
}

} // namespace pfc
