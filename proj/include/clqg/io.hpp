#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "clqg/gff.hpp"

// Output writers. Everything here is deterministic: fixed float formatting
// for CSV, sorted keys and shortest-round-trip doubles for JSON, and a raw
// binary grid format for fields.

namespace clqg::io {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<std::string>& cells) {
        if (cells.size() != header_.size())
            throw std::invalid_argument("csv: row width mismatch");
        rows_.push_back(cells);
    }

    std::string str() const {
        std::string out = join(header_);
        for (const auto& r : rows_) out += join(r);
        return out;
    }

    void write(const std::filesystem::path& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw std::runtime_error("csv: cannot write " + path.string());
        f << str();
    }

    std::size_t size() const { return rows_.size(); }

  private:
    static std::string join(const std::vector<std::string>& cells) {
        std::string line;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) line += ',';
            line += cells[i];
        }
        line += '\n';
        return line;
    }
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("json: cannot write " + path.string());
    f << j.dump(2) << '\n';
}

// Binary field grid: eight 8-byte header slots
//   magic "CLQGFLD1" | version | N | width | height | root_x | root_y | seed
// followed by row-major float64 site values (missing sites as NaN for
// non-rectangular domains).
inline void write_field_bin(const std::filesystem::path& path, const gff::FieldSample& field) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("field: cannot write " + path.string());
    const auto& dom = *field.domain;

    char magic[8] = {'C', 'L', 'Q', 'G', 'F', 'L', 'D', '1'};
    f.write(magic, 8);
    auto put_u64 = [&](std::uint64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    auto put_i64 = [&](std::int64_t v) { f.write(reinterpret_cast<const char*>(&v), 8); };
    put_u64(1);
    put_u64(static_cast<std::uint64_t>(dom.N));
    put_u64(static_cast<std::uint64_t>(dom.width));
    put_u64(static_cast<std::uint64_t>(dom.height));
    const auto rc = field.provenance.conditioning;
    put_i64(rc ? rc->root.x : -1);
    put_i64(rc ? rc->root.y : -1);
    put_u64(field.provenance.seed);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int iy = 0; iy < dom.height; ++iy)
        for (int ix = 0; ix < dom.width; ++ix) {
            const auto i = dom.site_index(dom.x_lo + ix, dom.y_lo + iy);
            const double v = i >= 0 ? field.values[static_cast<std::size_t>(i)] : nan;
            f.write(reinterpret_cast<const char*>(&v), 8);
        }
}

struct FieldBin {
    std::uint64_t version = 0, N = 0, width = 0, height = 0, seed = 0;
    std::int64_t root_x = -1, root_y = -1;
    std::vector<double> values;
};

inline FieldBin read_field_bin(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("field: cannot read " + path.string());
    char magic[8];
    f.read(magic, 8);
    if (std::memcmp(magic, "CLQGFLD1", 8) != 0)
        throw std::runtime_error("field: bad magic in " + path.string());
    FieldBin out;
    auto get_u64 = [&]() {
        std::uint64_t v = 0;
        f.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    out.version = get_u64();
    out.N = get_u64();
    out.width = get_u64();
    out.height = get_u64();
    std::int64_t rx, ry;
    f.read(reinterpret_cast<char*>(&rx), 8);
    f.read(reinterpret_cast<char*>(&ry), 8);
    out.root_x = rx;
    out.root_y = ry;
    out.seed = get_u64();
    out.values.resize(out.width * out.height);
    f.read(reinterpret_cast<char*>(out.values.data()),
           static_cast<std::streamsize>(out.values.size() * 8));
    if (!f) throw std::runtime_error("field: truncated file " + path.string());
    return out;
}

} // namespace clqg::io
