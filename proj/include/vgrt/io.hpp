#pragma once

// File formats: polygon JSON, tree JSON, coefficient CSV, PGM rasters and
// the analysis reports. Numbers are written so that reading them back
// reproduces the same doubles.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "analysis.hpp"
#include "error.hpp"
#include "field.hpp"
#include "geometry.hpp"
#include "radon.hpp"
#include "refinement.hpp"
#include "transform.hpp"

namespace vgrt::io {

using json = nlohmann::json;

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error(ErrorCode::Io, "failed writing '" + path + "'");
}

/// 17 significant digits, enough to round-trip a double.
inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline json point_json(Point p) { return json::array({p.x, p.y}); }

inline Point point_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw Error(ErrorCode::Io, "expected a point [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json ring_json(const Polygon& poly) {
    json ring = json::array();
    for (Point p : poly.vertices) ring.push_back(point_json(p));
    return ring;
}

// ---- polygon file: {"vertices": [[x, y], ...]} ----

inline Region parse_polygon_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, std::string("polygon JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("vertices") || !j["vertices"].is_array())
        throw Error(ErrorCode::Io, "polygon JSON needs a \"vertices\" array");
    std::vector<Point> pts;
    for (const auto& v : j["vertices"]) pts.push_back(point_from_json(v));
    return Region(make_polygon(std::move(pts)));
}

inline Region read_polygon_file(const std::string& path) { return parse_polygon_json(read_file(path)); }

inline std::string polygon_json(const Polygon& poly) {
    json j;
    j["vertices"] = ring_json(poly);
    return j.dump(2) + "\n";
}

// ---- tree file ----

inline json params_json(const RefinementParams& p) {
    json j;
    j["multiplicity"] = p.multiplicity;
    j["dispersion"] = p.dispersion;
    j["base_angle"] = p.base_angle;
    j["rotation_per_level"] = p.rotation_per_level;
    j["max_depth"] = p.max_depth;
    j["min_cell_area"] = p.min_cell_area;
    j["degeneracy_policy"] = to_string(p.policy);
    if (p.root_generator) j["root_generator"] = point_json(*p.root_generator);
    return j;
}

inline RefinementParams params_from_json(const json& j) {
    try {
        RefinementParams p;
        p.multiplicity = j.at("multiplicity").get<int>();
        p.dispersion = j.at("dispersion").get<double>();
        p.base_angle = j.at("base_angle").get<double>();
        p.rotation_per_level = j.at("rotation_per_level").get<double>();
        p.max_depth = j.at("max_depth").get<int>();
        p.min_cell_area = j.value("min_cell_area", 0.0);
        const std::string policy = j.value("degeneracy_policy", std::string("strict"));
        if (policy != "strict" && policy != "permissive") throw Error(ErrorCode::Io, "unknown degeneracy policy");
        p.policy = policy == "strict" ? DegeneracyPolicy::Strict : DegeneracyPolicy::Permissive;
        if (j.contains("root_generator")) p.root_generator = point_from_json(j["root_generator"]);
        return p;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, std::string("tree params: ") + e.what());
    }
}

/// {"params": {...}, "nodes": [{"m", "n", "generator", "pieces", "area"}, ...]}
/// sorted by (m, n); skipped nodes carry "skipped": true and no pieces.
inline std::string tree_json(const RefinementTree& tree) {
    json j;
    j["params"] = params_json(tree.params);
    json nodes = json::array();
    for (const auto& level : tree.levels) {
        for (const auto& node : level) {
            json n;
            n["m"] = node.id.level;
            n["n"] = node.id.index;
            n["generator"] = point_json(node.generator);
            json pieces = json::array();
            for (const auto& piece : node.region.pieces()) pieces.push_back(ring_json(piece));
            n["pieces"] = std::move(pieces);
            n["area"] = node.skipped ? 0.0 : node.measure;
            if (node.skipped) n["skipped"] = true;
            nodes.push_back(std::move(n));
        }
    }
    j["nodes"] = std::move(nodes);
    return j.dump() + "\n";
}

inline RefinementTree parse_tree_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, std::string("tree JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("params") || !j.contains("nodes") || !j["nodes"].is_array())
        throw Error(ErrorCode::Io, "tree JSON needs \"params\" and \"nodes\"");
    RefinementTree tree;
    tree.params = params_from_json(j["params"]);
    if (tree.params.multiplicity < 2 || tree.params.max_depth < 0) throw Error(ErrorCode::Io, "tree params out of range");
    tree.levels.resize(static_cast<std::size_t>(tree.params.max_depth) + 1);
    for (int m = 0; m <= tree.params.max_depth; ++m)
        tree.levels[static_cast<std::size_t>(m)].resize(nodes_at_level(tree.params.multiplicity, m));
    std::vector<std::vector<char>> seen(tree.levels.size());
    for (std::size_t m = 0; m < tree.levels.size(); ++m) seen[m].assign(tree.levels[m].size(), 0);

    try {
        for (const auto& jn : j["nodes"]) {
            const int m = jn.at("m").get<int>();
            const auto idx = jn.at("n").get<std::uint64_t>();
            if (m < 0 || m > tree.params.max_depth || idx >= tree.levels[static_cast<std::size_t>(m)].size())
                throw Error(ErrorCode::Io, "tree node index out of range");
            auto& node = tree.levels[static_cast<std::size_t>(m)][static_cast<std::size_t>(idx)];
            node.id = {m, idx};
            node.generator = point_from_json(jn.at("generator"));
            node.skipped = jn.value("skipped", false);
            std::vector<Polygon> pieces;
            for (const auto& ring : jn.at("pieces")) {
                Polygon poly;
                for (const auto& v : ring) poly.vertices.push_back(point_from_json(v));
                pieces.push_back(std::move(poly));
            }
            if (!pieces.empty()) node.region = Region(std::move(pieces));
            node.measure = node.skipped ? 0.0 : node.region.area();
            seen[static_cast<std::size_t>(m)][static_cast<std::size_t>(idx)] = 1;
        }
    } catch (const json::exception& e) {
        throw Error(ErrorCode::Io, std::string("tree node: ") + e.what());
    }
    for (const auto& level : seen)
        for (char s : level)
            if (!s) throw Error(ErrorCode::Io, "tree JSON is missing nodes");
    tree.domain = tree.levels[0][0].region;
    if (tree.domain.empty()) throw Error(ErrorCode::Io, "tree root has no region");
    return tree;
}

inline RefinementTree read_tree_file(const std::string& path) { return parse_tree_json(read_file(path)); }

// ---- coefficient CSV: m,n,area,gen_x,gen_y,coeff (root row holds c00) ----

inline std::string coefficients_csv(const CoefficientSet& coeffs) {
    std::string out = "m,n,area,gen_x,gen_y,coeff\n";
    for (std::size_t m = 0; m < coeffs.levels.size(); ++m)
        for (std::size_t i = 0; i < coeffs.levels[m].size(); ++i) {
            const auto& e = coeffs.levels[m][i];
            out += std::to_string(m) + "," + std::to_string(i) + "," + fmt17(e.measure) + "," + fmt17(e.generator.x) +
                   "," + fmt17(e.generator.y) + "," + fmt17(e.coeff) + "\n";
        }
    return out;
}

/// Reads a coefficient CSV laid out for `params` (multiplicity and depth).
inline CoefficientSet parse_coefficients_csv(const std::string& text, const RefinementParams& params) {
    CoefficientSet set{params, {}};
    set.levels.resize(static_cast<std::size_t>(params.max_depth) + 1);
    for (int m = 0; m <= params.max_depth; ++m)
        set.levels[static_cast<std::size_t>(m)].resize(nodes_at_level(params.multiplicity, m));
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("m,n,area,gen_x,gen_y,coeff", 0) != 0)
        throw Error(ErrorCode::Io, "coefficient CSV header must be m,n,area,gen_x,gen_y,coeff");
    std::size_t rows = 0, expected = 0;
    for (const auto& l : set.levels) expected += l.size();
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != 6) throw Error(ErrorCode::Io, "coefficient CSV row needs 6 columns: " + line);
        try {
            const int m = std::stoi(cells[0]);
            const auto idx = static_cast<std::size_t>(std::stoull(cells[1]));
            if (m < 0 || m > params.max_depth || idx >= set.levels[static_cast<std::size_t>(m)].size())
                throw Error(ErrorCode::Io, "coefficient CSV row out of range: " + line);
            auto& e = set.levels[static_cast<std::size_t>(m)][idx];
            e.measure = std::stod(cells[2]);
            e.generator = {std::stod(cells[3]), std::stod(cells[4])};
            e.coeff = std::stod(cells[5]);
        } catch (const std::logic_error&) {
            throw Error(ErrorCode::Io, "malformed coefficient CSV row: " + line);
        }
        ++rows;
    }
    if (rows != expected) throw Error(ErrorCode::Io, "coefficient CSV has " + std::to_string(rows) + " rows, expected " +
                                                         std::to_string(expected));
    return set;
}

inline CoefficientSet read_coefficients_file(const std::string& path, const RefinementParams& params) {
    return parse_coefficients_csv(read_file(path), params);
}

// ---- PGM ----

/// Grey image with samples scaled to [0, 1], stored top row first.
struct PgmImage {
    int width = 0;
    int height = 0;
    int maxval = 255;
    std::vector<double> values;
};

inline PgmImage parse_pgm(const std::string& data) {
    std::size_t pos = 0;
    auto skip_space = [&] {
        while (pos < data.size()) {
            if (data[pos] == '#') {
                while (pos < data.size() && data[pos] != '\n') ++pos;
            } else if (std::isspace(static_cast<unsigned char>(data[pos]))) {
                ++pos;
            } else {
                break;
            }
        }
    };
    auto read_int = [&]() -> long {
        skip_space();
        std::size_t start = pos;
        while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) ++pos;
        if (start == pos) throw Error(ErrorCode::Io, "PGM: expected an integer");
        return std::stol(data.substr(start, pos - start));
    };
    if (data.size() < 2 || data[0] != 'P' || (data[1] != '2' && data[1] != '5'))
        throw Error(ErrorCode::Io, "not a P2/P5 PGM file");
    const bool binary = data[1] == '5';
    pos = 2;
    PgmImage img;
    const long w = read_int(), h = read_int(), maxval = read_int();
    if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) throw Error(ErrorCode::Io, "PGM: bad dimensions");
    if (maxval <= 0 || maxval > 65535) throw Error(ErrorCode::Io, "PGM: maxval must lie in [1, 65535]");
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.maxval = static_cast<int>(maxval);
    const std::size_t count = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
    img.values.resize(count);
    if (binary) {
        ++pos;  // single whitespace after maxval
        const std::size_t bytes = maxval < 256 ? 1 : 2;
        if (data.size() < pos + count * bytes) throw Error(ErrorCode::Io, "PGM: truncated raster");
        for (std::size_t k = 0; k < count; ++k) {
            unsigned v = static_cast<unsigned char>(data[pos + k * bytes]);
            if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(data[pos + k * bytes + 1]);
            if (v > static_cast<unsigned>(maxval)) throw Error(ErrorCode::Io, "PGM: sample exceeds maxval");
            img.values[k] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    } else {
        for (std::size_t k = 0; k < count; ++k) {
            const long v = read_int();
            if (v > maxval) throw Error(ErrorCode::Io, "PGM: sample exceeds maxval");
            img.values[k] = static_cast<double>(v) / static_cast<double>(maxval);
        }
    }
    return img;
}

inline PgmImage read_pgm_file(const std::string& path) { return parse_pgm(read_file(path)); }

/// Samples are clamped to [0, 1] and quantized to maxval (255 or 65535).
inline std::string pgm_bytes(const PgmImage& img, bool binary = true) {
    if (img.maxval < 1 || img.maxval > 65535) throw Error(ErrorCode::InvalidArgument, "PGM maxval out of range");
    std::string out = std::string(binary ? "P5" : "P2") + "\n" + std::to_string(img.width) + " " +
                      std::to_string(img.height) + "\n" + std::to_string(img.maxval) + "\n";
    auto quantize = [&](double v) {
        const double c = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
        return static_cast<unsigned>(std::lround(c * img.maxval));
    };
    for (std::size_t k = 0; k < img.values.size(); ++k) {
        const unsigned q = quantize(img.values[k]);
        if (binary) {
            if (img.maxval > 255) out.push_back(static_cast<char>((q >> 8) & 0xff));
            out.push_back(static_cast<char>(q & 0xff));
        } else {
            out += std::to_string(q);
            out += ((k + 1) % static_cast<std::size_t>(img.width) == 0) ? '\n' : ' ';
        }
    }
    return out;
}

/// Image rows run top to bottom; raster row 0 is the bottom row.
inline RasterField raster_from_pgm(const PgmImage& img, Point origin, double pixel_size) {
    RasterField r = RasterField::zeros(img.width, img.height, origin, pixel_size);
    for (int row = 0; row < img.height; ++row)
        for (int i = 0; i < img.width; ++i)
            r.at(i, img.height - 1 - row) = img.values[static_cast<std::size_t>(row) * static_cast<std::size_t>(img.width) +
                                                       static_cast<std::size_t>(i)];
    return r;
}

/// Masked-out pixels are written as 0.
inline PgmImage pgm_from_raster(const RasterField& r, const std::vector<std::uint8_t>& mask = {}, int maxval = 255) {
    PgmImage img{r.width, r.height, maxval, {}};
    img.values.resize(r.values.size());
    for (int j = 0; j < r.height; ++j)
        for (int i = 0; i < r.width; ++i) {
            const std::size_t k = static_cast<std::size_t>(j) * static_cast<std::size_t>(r.width) + static_cast<std::size_t>(i);
            const double v = mask.empty() || mask[k] ? r.at(i, j) : 0.0;
            img.values[static_cast<std::size_t>(r.height - 1 - j) * static_cast<std::size_t>(r.width) +
                       static_cast<std::size_t>(i)] = v;
        }
    return img;
}

// ---- reports ----

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json frame_json(const FrameReport& r) {
    json j;
    j["coefficient_energy"] = r.coefficient_energy;
    j["coefficient_energy_with_root"] = r.coefficient_energy_with_root;
    j["field_norm_sq"] = r.field_norm_sq;
    j["total_measure"] = r.total_measure;
    j["normalized_inner"] = r.normalized_inner;
    j["ratio"] = optional_json(r.ratio);
    j["ratio_excluding_root"] = optional_json(r.ratio_excluding_root);
    return j;
}

inline json corpus_json(const FrameCorpusReport& c) {
    json j;
    j["empirical_A"] = c.empirical_A;
    j["empirical_B"] = c.empirical_B;
    json entries = json::array();
    for (const auto& e : c.entries) {
        json ej = frame_json(e.report);
        ej["field"] = e.name;
        entries.push_back(std::move(ej));
    }
    j["fields"] = std::move(entries);
    return j;
}

inline json entropy_json(const EntropyReport& r) {
    json j;
    j["m"] = r.level;
    j["S"] = r.entropy;
    j["beta"] = r.beta;
    j["Z"] = r.partition_value;
    j["mean_energy"] = r.mean_energy;
    j["E_level"] = r.level_energy;
    j["n_nonzero"] = r.nonzero;
    j["probabilities"] = r.probabilities;
    return j;
}

/// m,S,E_level,n_nonzero
inline std::string entropy_csv(const std::vector<EntropyReport>& reports) {
    std::string out = "m,S,E_level,n_nonzero\n";
    for (const auto& r : reports)
        out += std::to_string(r.level) + "," + fmt17(r.entropy) + "," + fmt17(r.level_energy) + "," +
               std::to_string(r.nonzero) + "\n";
    return out;
}

inline json symmetry_json(const SymmetryReport& r) {
    json levels = json::array();
    for (const auto& s : r.levels)
        levels.push_back({{"m", s.level}, {"cells", s.cells}, {"max_deviation", s.max_deviation},
                          {"mean_deviation", s.mean_deviation}});
    return levels;
}

/// K,rmse
inline std::string rmse_curve_csv(const std::vector<std::pair<int, double>>& curve) {
    std::string out = "K,rmse\n";
    for (const auto& [k, rmse] : curve) out += std::to_string(k) + "," + fmt17(rmse) + "\n";
    return out;
}

} // namespace vgrt::io
