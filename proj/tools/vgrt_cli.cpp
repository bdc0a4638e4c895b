// vgrt: command-line driver for the refinement transform.
//
// Exit codes: 0 success, 2 bad arguments, 3 geometry/degeneracy failure,
// 4 I/O failure, 5 failed assertion (waveletcheck).

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "vgrt/vgrt.hpp"

namespace fs = std::filesystem;
using namespace vgrt;

namespace {

constexpr int kExitBadArgs = 2;
constexpr int kExitGeometry = 3;
constexpr int kExitIo = 4;
constexpr int kExitAssertion = 5;

struct Options {
    std::string domain_path;
    std::string field_spec;
    std::string tree_path;
    std::string coeffs_path;
    std::string out_dir = ".";
    int multiplicity = 4;
    double dispersion = 0.5;
    std::optional<double> angle;
    std::optional<double> angle_deg;
    double rotation = 0.0;
    int depth = 3;
    double min_cell_area = 0.0;
    bool permissive = false;
    std::string root;
    std::string quad = "gauss:7";
    std::string grid = "256x256";
    std::string origin;
    double pixel_size = 0.0;
    std::vector<int> levels;
    double beta = 1.0;
    bool corpus = false;
    int angles = 16;
    unsigned threads = 1;
    std::uint64_t seed = 42;
    bool pgm16 = false;
    bool ascii = false;
};

[[noreturn]] void bad_args(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

Point parse_pair(const std::string& text, const char* what) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) bad_args(std::string(what) + " must be X,Y");
    try {
        return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
    } catch (const std::exception&) {
        bad_args(std::string(what) + " must be X,Y");
    }
}

std::pair<int, int> parse_grid(const std::string& text) {
    const auto x = text.find('x');
    if (x == std::string::npos) bad_args("--grid must be WxH");
    try {
        const int w = std::stoi(text.substr(0, x)), h = std::stoi(text.substr(x + 1));
        if (w <= 0 || h <= 0) bad_args("--grid dimensions must be positive");
        return {w, h};
    } catch (const std::logic_error&) {
        bad_args("--grid must be WxH");
    }
}

QuadratureSpec parse_quad(const std::string& text) {
    auto number = [&](const std::string& s) {
        try {
            return std::stoi(s);
        } catch (const std::exception&) {
            bad_args("bad --quad value '" + text + "'");
        }
    };
    if (text == "pixel") return QuadratureSpec::pixel();
    if (text.rfind("pixel:", 0) == 0) return QuadratureSpec::pixel(number(text.substr(6)));
    if (text.rfind("gauss:", 0) == 0) {
        const std::string rest = text.substr(6);
        const auto colon = rest.find(':');
        if (colon == std::string::npos) return QuadratureSpec::gauss(number(rest));
        return QuadratureSpec::gauss(number(rest.substr(0, colon)), number(rest.substr(colon + 1)));
    }
    bad_args("--quad must be pixel[:S] or gauss:ORDER[:LEVELS]");
}

Region unit_square() { return Region(make_polygon({{0, 0}, {1, 0}, {1, 1}, {0, 1}})); }

Region load_domain(const Options& o, bool required) {
    if (o.domain_path.empty()) {
        if (required) bad_args("--domain is required");
        return unit_square();
    }
    return io::read_polygon_file(o.domain_path);
}

RefinementParams params_from(const Options& o, double default_angle) {
    RefinementParams p;
    p.multiplicity = o.multiplicity;
    p.dispersion = o.dispersion;
    if (o.angle && o.angle_deg) bad_args("give either --angle or --angle-deg");
    p.base_angle = o.angle ? *o.angle : o.angle_deg ? *o.angle_deg * std::numbers::pi / 180.0 : default_angle;
    p.rotation_per_level = o.rotation;
    p.max_depth = o.depth;
    p.min_cell_area = o.min_cell_area;
    p.policy = o.permissive ? DegeneracyPolicy::Permissive : DegeneracyPolicy::Strict;
    if (!o.root.empty()) p.root_generator = parse_pair(o.root, "--root");
    validate(p);
    return p;
}

Field load_field(const Options& o, const Region& domain) {
    if (o.field_spec.rfind("fn:", 0) == 0) return AnalyticField::parse(o.field_spec.substr(3));
    if (o.field_spec.rfind("pgm:", 0) == 0) {
        const io::PgmImage img = io::read_pgm_file(o.field_spec.substr(4));
        const BoundingBox box = domain.bbox();
        const Point origin = o.origin.empty() ? box.lo : parse_pair(o.origin, "--origin");
        const double ps = o.pixel_size > 0.0 ? o.pixel_size
                                             : std::max(box.width() / img.width, box.height() / img.height);
        RasterField r = io::raster_from_pgm(img, origin, ps);
        r.validate();
        return r;
    }
    bad_args("--field must be fn:NAME[:ARGS] or pgm:PATH");
}

fs::path out_path(const Options& o, const std::string& name) {
    std::error_code ec;
    fs::create_directories(o.out_dir, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + o.out_dir + "'");
    return fs::path(o.out_dir) / name;
}

RefinementTree tree_from(const Options& o, double default_angle, bool write_tree) {
    if (!o.tree_path.empty()) return io::read_tree_file(o.tree_path);
    const RefinementParams params = params_from(o, default_angle);
    RefinementTree tree = refine(load_domain(o, true), params);
    if (write_tree) io::write_file(out_path(o, "tree.json").string(), io::tree_json(tree));
    return tree;
}

void print_closure(const RefinementTree& tree) {
    const double total = tree.domain.area();
    const auto n = static_cast<std::size_t>(tree.multiplicity());
    std::printf("level  cells  area_sum  closure_residual  max_parent_residual\n");
    for (std::size_t m = 0; m < tree.levels.size(); ++m) {
        double sum = 0.0, worst = 0.0;
        for (const auto& node : tree.levels[m]) sum += node.measure;
        if (m > 0)
            for (std::size_t p = 0; p < tree.levels[m - 1].size(); ++p) {
                const auto& parent = tree.levels[m - 1][p];
                if (parent.skipped) continue;
                double kids = 0.0;
                for (std::size_t k = 0; k < n; ++k) kids += tree.levels[m][p * n + k].measure;
                worst = std::max(worst, std::abs(kids - parent.measure) / parent.measure);
            }
        std::printf("%5zu %6zu  %.12g  %.3e  %.3e\n", m, tree.levels[m].size(), sum, std::abs(sum - total) / total,
                    worst);
    }
}

int cmd_refine(const Options& o) {
    const RefinementTree tree = tree_from(o, 0.0, true);
    std::printf("nodes: %zu\n", tree.node_count());
    print_closure(tree);
    return 0;
}

int cmd_forward(const Options& o) {
    const RefinementTree tree = tree_from(o, 0.0, true);
    const Field field = load_field(o, tree.domain);
    const CoefficientSet coeffs = forward(tree, field, parse_quad(o.quad));
    io::write_file(out_path(o, "coeffs.csv").string(), io::coefficients_csv(coeffs));
    std::printf("root average: %.17g\n", coeffs.root_average());
    std::printf("coefficients: %zu\n", tree.node_count());
    return 0;
}

int cmd_reconstruct(const Options& o) {
    if (o.tree_path.empty() || o.coeffs_path.empty()) bad_args("reconstruct needs --tree and --coeffs");
    const RefinementTree tree = io::read_tree_file(o.tree_path);
    const CoefficientSet coeffs = io::read_coefficients_file(o.coeffs_path, tree.params);
    const auto [w, h] = parse_grid(o.grid);
    GridSpec grid = GridSpec::covering(tree.domain.bbox(), w, h);
    if (!o.origin.empty()) grid.origin = parse_pair(o.origin, "--origin");
    if (o.pixel_size > 0.0) grid.pixel_size = o.pixel_size;
    std::vector<int> levels = o.levels.empty() ? std::vector<int>{tree.depth()} : o.levels;
    for (int level : levels) {
        const Reconstruction rec = reconstruct_raster(coeffs, tree, level, grid);
        const std::string stem = "recon_m" + std::to_string(level);
        io::write_file(out_path(o, stem + ".pgm").string(),
                       io::pgm_bytes(io::pgm_from_raster(rec.raster, rec.mask, o.pgm16 ? 65535 : 255), !o.ascii));
        std::string csv = "i,j,x,y,value\n";
        for (int j = 0; j < rec.raster.height; ++j)
            for (int i = 0; i < rec.raster.width; ++i) {
                if (!rec.mask[static_cast<std::size_t>(j) * static_cast<std::size_t>(w) + static_cast<std::size_t>(i)])
                    continue;
                const Point c = rec.raster.pixel_center(i, j);
                csv += std::to_string(i) + "," + std::to_string(j) + "," + io::fmt17(c.x) + "," + io::fmt17(c.y) + "," +
                       io::fmt17(rec.raster.at(i, j)) + "\n";
            }
        io::write_file(out_path(o, stem + ".csv").string(), csv);
        std::printf("level %d -> %s.pgm\n", level, stem.c_str());
    }
    return 0;
}

int cmd_analyze(const Options& o) {
    if (o.tree_path.empty() || o.coeffs_path.empty()) bad_args("analyze needs --tree and --coeffs");
    const RefinementTree tree = io::read_tree_file(o.tree_path);
    const CoefficientSet coeffs = io::read_coefficients_file(o.coeffs_path, tree.params);
    const QuadratureSpec quad = parse_quad(o.quad);

    io::json frame;
    if (!o.field_spec.empty()) {
        const Field field = load_field(o, tree.domain);
        frame = io::frame_json(frame_report(coeffs, field, tree.domain, quad));
    }
    if (o.corpus) frame["corpus"] = io::corpus_json(frame_corpus(tree, o.seed, quad));
    io::write_file(out_path(o, "frame.json").string(), frame.dump(2) + "\n");

    const auto spectrum = entropy_spectrum(coeffs, o.beta);
    io::json entropy = io::json::array();
    for (const auto& r : spectrum) {
        io::json j = io::entropy_json(r);
        if (!r.probabilities.empty() && r.beta == 1.0) j["identity_residual"] = thermo_identity_residual(r);
        entropy.push_back(std::move(j));
    }
    io::write_file(out_path(o, "entropy.json").string(), entropy.dump(2) + "\n");
    io::write_file(out_path(o, "entropy.csv").string(), io::entropy_csv(spectrum));
    io::write_file(out_path(o, "symmetry.json").string(), io::symmetry_json(symmetry_report(tree)).dump(2) + "\n");

    if (!frame.is_null() && frame.contains("ratio")) std::printf("frame ratio: %s\n", frame["ratio"].dump().c_str());
    for (const auto& r : spectrum) std::printf("m=%d S=%.12g n_nonzero=%zu\n", r.level, r.entropy, r.nonzero);
    return 0;
}

int cmd_radon(const Options& o) {
    RadonConfig config;
    config.domain = load_domain(o, false);
    config.field = load_field(o, config.domain);
    config.depth = o.depth;
    config.angles_count = o.angles;
    config.quad = parse_quad(o.quad);
    const auto [w, h] = parse_grid(o.grid);
    config.grid = GridSpec::covering(config.domain.bbox(), w, h);
    const RadonResult result = radon_average(config);
    io::write_file(out_path(o, "radon_avg.pgm").string(),
                   io::pgm_bytes(io::pgm_from_raster(result.averaged, result.mask, o.pgm16 ? 65535 : 255), !o.ascii));
    io::write_file(out_path(o, "rmse_vs_k.csv").string(), io::rmse_curve_csv(result.rmse_vs_k));
    for (const auto& [k, rmse] : result.rmse_vs_k) std::printf("K=%d rmse=%.12g\n", k, rmse);
    return 0;
}

int cmd_waveletcheck(const Options& o) {
    const RefinementParams params = params_from(o, std::numbers::pi / 4.0);
    const RefinementTree tree = refine(load_domain(o, false), params);
    const SquareGridCheck check = square_grid_check(tree);
    if (!check.ok) {
        std::printf("FAIL: %s\n", check.failure.c_str());
        return kExitAssertion;
    }
    std::printf("PASS: %d levels of 4^m congruent axis-aligned squares\n", tree.depth());
    return 0;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::RootHasNoParent: return kExitBadArgs;
    case ErrorCode::Io: return kExitIo;
    default: return kExitGeometry;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical Voronoi refinement transform"};
    app.require_subcommand(1);
    Options o;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--domain", o.domain_path, "Polygon JSON file");
        sub->add_option("-N,--multiplicity", o.multiplicity, "Daughters per parent");
        sub->add_option("-d,--dispersion", o.dispersion, "Fraction of the way to the cell boundary");
        sub->add_option("-a,--angle", o.angle, "Base angle in radians");
        sub->add_option("--angle-deg", o.angle_deg, "Base angle in degrees");
        sub->add_option("--rotation", o.rotation, "Rotation added per level (radians)");
        sub->add_option("-M,--depth", o.depth, "Refinement depth");
        sub->add_option("--min-cell-area", o.min_cell_area, "Cells smaller than this are degenerate");
        sub->add_option("--root", o.root, "Root generator X,Y (default: domain centroid)");
        sub->add_flag("--permissive", o.permissive, "Skip degenerate cells instead of failing");
    };
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", o.out_dir, "Output directory");
        sub->add_option("--threads", o.threads, "Worker thread cap")->check(CLI::PositiveNumber);
        sub->add_option("--seed", o.seed, "Seed for randomized batteries");
    };
    auto add_field = [&](CLI::App* sub) {
        sub->add_option("--field", o.field_spec, "fn:NAME[:ARGS] or pgm:PATH");
        sub->add_option("--quad", o.quad, "pixel[:S] or gauss:ORDER[:LEVELS]");
        sub->add_option("--origin", o.origin, "Raster lower-left corner X,Y");
        sub->add_option("--pixel-size", o.pixel_size, "Raster pixel size in domain units");
    };
    auto add_raster_out = [&](CLI::App* sub) {
        sub->add_option("--grid", o.grid, "Output raster WxH");
        sub->add_flag("--pgm16", o.pgm16, "Write 16-bit PGM");
        sub->add_flag("--ascii", o.ascii, "Write ASCII (P2) PGM");
    };

    auto* refine_cmd = app.add_subcommand("refine", "Build a refinement tree and write tree.json");
    add_params(refine_cmd);
    add_common(refine_cmd);

    auto* forward_cmd = app.add_subcommand("forward", "Compute coefficients and write coeffs.csv");
    add_params(forward_cmd);
    add_common(forward_cmd);
    add_field(forward_cmd);
    forward_cmd->add_option("--tree", o.tree_path, "Reuse an existing tree.json");

    auto* recon_cmd = app.add_subcommand("reconstruct", "Rasterize partial reconstructions");
    add_common(recon_cmd);
    add_raster_out(recon_cmd);
    recon_cmd->add_option("--tree", o.tree_path, "tree.json")->required();
    recon_cmd->add_option("--coeffs", o.coeffs_path, "coeffs.csv")->required();
    recon_cmd->add_option("--level", o.levels, "Level(s) to reconstruct (default: deepest)");
    recon_cmd->add_option("--origin", o.origin, "Output grid lower-left corner X,Y");
    recon_cmd->add_option("--pixel-size", o.pixel_size, "Output pixel size");

    auto* analyze_cmd = app.add_subcommand("analyze", "Frame, entropy and symmetry reports");
    add_common(analyze_cmd);
    add_field(analyze_cmd);
    analyze_cmd->add_option("--tree", o.tree_path, "tree.json")->required();
    analyze_cmd->add_option("--coeffs", o.coeffs_path, "coeffs.csv")->required();
    analyze_cmd->add_option("--beta", o.beta, "Inverse temperature for the partition function");
    analyze_cmd->add_flag("--corpus", o.corpus, "Also run the fixed-seed field battery");

    auto* radon_cmd = app.add_subcommand("radon", "Angle-averaged slab reconstruction");
    add_common(radon_cmd);
    add_field(radon_cmd);
    add_raster_out(radon_cmd);
    radon_cmd->add_option("--domain", o.domain_path, "Polygon JSON file (default: unit square)");
    radon_cmd->add_option("-M,--depth", o.depth, "Slab depth");
    radon_cmd->add_option("-K,--angles", o.angles, "Number of angles");

    auto* wavelet_cmd = app.add_subcommand("waveletcheck", "Assert the quad-adic square decomposition");
    add_params(wavelet_cmd);
    add_common(wavelet_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitBadArgs;
    }

    try {
        set_thread_count(o.threads);
        if (*radon_cmd) {
            if (o.depth == 3 && radon_cmd->count("--depth") == 0) o.depth = 8;
            if (o.grid == "256x256" && radon_cmd->count("--grid") == 0) o.grid = "128x128";
            if (o.field_spec.empty()) o.field_spec = "fn:gauss";
        }
        if (*forward_cmd && o.field_spec.empty()) bad_args("forward needs --field");
        if (*refine_cmd) return cmd_refine(o);
        if (*forward_cmd) return cmd_forward(o);
        if (*recon_cmd) return cmd_reconstruct(o);
        if (*analyze_cmd) return cmd_analyze(o);
        if (*radon_cmd) return cmd_radon(o);
        if (*wavelet_cmd) return cmd_waveletcheck(o);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    }
    return kExitBadArgs;
}
