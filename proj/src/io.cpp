#include "fpgm/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

namespace fpgm {

namespace {

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ofstream out(path, mode | std::ios::out | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
    return out;
}

std::ifstream open_in(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, mode | std::ios::in);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    return in;
}

std::uint64_t to_le(std::uint64_t v) {
    if constexpr (std::endian::native == std::endian::little) return v;
    else return __builtin_bswap64(v);
}

} // namespace

std::size_t ArrayFile::count() const {
    std::size_t n = channels;
    for (std::size_t d : dims) n *= d;
    return n;
}

void write_array(const std::filesystem::path& path, const ArrayFile& a) {
    if (a.data.size() != a.count())
        throw ContractError("write_array: data length does not match dims * channels");
    if (a.kind.empty() || a.kind.find_first_of(" \t\n") != std::string::npos)
        throw ContractError("write_array: kind must be a single word");
    auto out = open_out(path, std::ios::binary);
    std::ostringstream h;
    h << std::setprecision(17);
    h << "FPGM-ARRAY 1\nkind " << a.kind << "\ndims";
    for (std::size_t d : a.dims) h << ' ' << d;
    h << "\nchannels " << a.channels << "\nextent " << a.extent << "\ngrid " << a.grid
      << "\nseed " << a.seed << "\nend\n";
    out << h.str();
    std::vector<std::uint64_t> raw(a.data.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        raw[i] = to_le(std::bit_cast<std::uint64_t>(a.data[i]));
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
}

ArrayFile read_array(const std::filesystem::path& path) {
    auto in = open_in(path, std::ios::binary);
    const std::string where = "'" + path.string() + "'";
    std::string line;
    if (!std::getline(in, line) || line != "FPGM-ARRAY 1")
        throw DataError(where + ": not an FPGM-ARRAY 1 file");
    ArrayFile a;
    bool ended = false;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line == "end") {
            ended = true;
            break;
        }
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        bool ok = true;
        if (key == "kind") ok = static_cast<bool>(ls >> a.kind);
        else if (key == "dims") {
            std::size_t d;
            while (ls >> d) a.dims.push_back(d);
            ok = !a.dims.empty() && ls.eof();
        } else if (key == "channels") ok = static_cast<bool>(ls >> a.channels);
        else if (key == "extent") ok = static_cast<bool>(ls >> a.extent);
        else if (key == "grid") ok = static_cast<bool>(ls >> a.grid);
        else if (key == "seed") ok = static_cast<bool>(ls >> a.seed);
        else throw DataError(where + " line " + std::to_string(lineno) + ": unknown key '" + key + "'");
        if (!ok) throw DataError(where + " line " + std::to_string(lineno) + ": malformed '" + key + "'");
    }
    if (!ended) throw DataError(where + ": header not terminated by 'end'");
    std::vector<std::uint64_t> raw(a.count());
    in.read(reinterpret_cast<char*>(raw.data()),
            static_cast<std::streamsize>(raw.size() * sizeof(std::uint64_t)));
    if (static_cast<std::size_t>(in.gcount()) != raw.size() * sizeof(std::uint64_t))
        throw DataError(where + ": truncated payload");
    if (in.peek() != std::char_traits<char>::eof()) throw DataError(where + ": trailing bytes");
    a.data.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) a.data[i] = std::bit_cast<double>(to_le(raw[i]));
    return a;
}

void write_image_csv(const std::filesystem::path& path, ConstSpan image, GridShape grid) {
    require_size(image, grid.size(), "write_image_csv");
    auto out = open_out(path);
    out << std::setprecision(17);
    for (std::size_t r = grid.height; r-- > 0;) {
        for (std::size_t c = 0; c < grid.width; ++c) {
            if (c) out << ',';
            out << image[r * grid.width + c];
        }
        out << '\n';
    }
}

void write_pgm(const std::filesystem::path& path, ConstSpan image, GridShape grid, double low,
               double high) {
    require_size(image, grid.size(), "write_pgm");
    if (!(high > low)) throw ContractError("write_pgm: empty window");
    auto out = open_out(path, std::ios::binary);
    out << "P5\n" << grid.width << ' ' << grid.height << "\n255\n";
    std::string row(grid.width, '\0');
    for (std::size_t r = grid.height; r-- > 0;) {
        for (std::size_t c = 0; c < grid.width; ++c) {
            const double v = std::clamp((image[r * grid.width + c] - low) / (high - low), 0.0, 1.0);
            row[c] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
        }
        out.write(row.data(), static_cast<std::streamsize>(row.size()));
    }
}

void write_roi_manifest(const std::filesystem::path& path, const std::vector<RoiPair>& pairs,
                        GridShape grid, std::uint64_t seed) {
    nlohmann::json j;
    j["grid"] = {grid.width, grid.height};
    j["seed"] = seed;
    j["pairs"] = nlohmann::json::array();
    for (const auto& p : pairs) {
        j["pairs"].push_back({{"tumor_cx", p.tumor_cx},
                              {"tumor_cy", p.tumor_cy},
                              {"radius", p.radius},
                              {"on_left", p.on_left},
                              {"tumor", p.tumor},
                              {"control", p.control}});
    }
    auto out = open_out(path);
    out << std::setw(1) << j << '\n';
}

std::vector<RoiPair> read_roi_manifest(const std::filesystem::path& path) {
    auto in = open_in(path);
    std::vector<RoiPair> pairs;
    try {
        const auto j = nlohmann::json::parse(in);
        for (const auto& e : j.at("pairs")) {
            RoiPair p;
            p.tumor_cx = e.at("tumor_cx").get<double>();
            p.tumor_cy = e.at("tumor_cy").get<double>();
            p.radius = e.at("radius").get<double>();
            p.on_left = e.at("on_left").get<bool>();
            p.tumor = e.at("tumor").get<std::vector<std::size_t>>();
            p.control = e.at("control").get<std::vector<std::size_t>>();
            pairs.push_back(std::move(p));
        }
    } catch (const nlohmann::json::exception& ex) {
        throw DataError("'" + path.string() + "': " + ex.what());
    }
    return pairs;
}

} // namespace fpgm
