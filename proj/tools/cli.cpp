#include "cli.hpp"

#include <CLI11.hpp>
#include <Eigen/Dense>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "hsiband/bandstats.hpp"
#include "hsiband/composite.hpp"
#include "hsiband/csv.hpp"
#include "hsiband/cube.hpp"
#include "hsiband/envi_io.hpp"
#include "hsiband/error.hpp"
#include "hsiband/evalmetrics.hpp"
#include "hsiband/infotheory.hpp"
#include "hsiband/png_io.hpp"
#include "hsiband/selector.hpp"
#include "hsiband/synthgen.hpp"

namespace hsiband::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

// One flat bag of knobs for all subcommands. Unused fields keep their
// defaults, and the whole bag is echoed into run_config.json next to every
// artifact so a run can be reproduced from its outputs alone.
struct RunConfig {
    std::string command;
    std::string cube;        // ENVI-style header path
    std::string patches;     // patch CSV
    std::string out = ".";   // output directory
    std::string selection;   // selection JSON (composite)
    std::string rgb;         // RGB PNG (evaluate)
    std::string composite;   // composite PNG (evaluate)
    std::string records;     // pre-computed metric records CSV (evaluate)
    std::string spec_file;   // scene description JSON (synth)
    std::string input;       // numeric matrix CSV (heatmap)
    std::string background;  // class name (select) / patch label (evaluate)
    int n_select = 3;
    int k_candidates = 5;
    int bins = 32;
    int draws = 50;
    int half_width = 7;
    int adjacency_window = 7;
    int search_radius = 10;
    double corr_threshold = 0.3;
    double csnr_percentile = 75.0;
    std::uint64_t seed = 42;
    bool seed_explicit = false;  // set when --config or --seed supplied one
};

ordered_json run_config_json(const RunConfig& rc) {
    ordered_json j;
    j["command"] = rc.command;
    j["cube"] = rc.cube;
    j["patches"] = rc.patches;
    j["out"] = rc.out;
    j["selection"] = rc.selection;
    j["rgb"] = rc.rgb;
    j["composite"] = rc.composite;
    j["records"] = rc.records;
    j["spec"] = rc.spec_file;
    j["input"] = rc.input;
    j["background"] = rc.background;
    j["n_select"] = rc.n_select;
    j["k_candidates"] = rc.k_candidates;
    j["bins"] = rc.bins;
    j["draws"] = rc.draws;
    j["half_width"] = rc.half_width;
    j["adjacency_window"] = rc.adjacency_window;
    j["search_radius"] = rc.search_radius;
    j["corr_threshold"] = rc.corr_threshold;
    j["csnr_percentile"] = rc.csnr_percentile;
    j["seed"] = rc.seed;
    return j;
}

// Keys mirror the run_config.json layout, so a previous run's sidecar can be
// fed straight back in as --config.
void apply_config_file(const fs::path& path, RunConfig& rc) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config file " + path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw ValidationError("config file must hold a JSON object: " + path.string());
    try {
        auto str = [&](const char* key, std::string& dst) {
            if (j.contains(key)) dst = j.at(key).get<std::string>();
        };
        auto num = [&](const char* key, auto& dst) {
            if (j.contains(key)) dst = j.at(key).get<std::decay_t<decltype(dst)>>();
        };
        str("cube", rc.cube);
        str("patches", rc.patches);
        str("out", rc.out);
        str("selection", rc.selection);
        str("rgb", rc.rgb);
        str("composite", rc.composite);
        str("records", rc.records);
        str("spec", rc.spec_file);
        str("input", rc.input);
        str("background", rc.background);
        num("n_select", rc.n_select);
        num("k_candidates", rc.k_candidates);
        num("bins", rc.bins);
        num("draws", rc.draws);
        num("half_width", rc.half_width);
        num("adjacency_window", rc.adjacency_window);
        num("search_radius", rc.search_radius);
        num("corr_threshold", rc.corr_threshold);
        num("csnr_percentile", rc.csnr_percentile);
        if (j.contains("seed")) {
            rc.seed = j.at("seed").get<std::uint64_t>();
            rc.seed_explicit = true;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("config file " + path.string() + ": " + e.what());
    }
}

fs::path ensure_out_dir(const std::string& out) {
    fs::path dir(out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw ValidationError("cannot create output directory: " + dir.string());
    return dir;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void write_run_config(const RunConfig& rc, const fs::path& out_dir) {
    auto out = open_output(out_dir / "run_config.json");
    out << run_config_json(rc).dump(2) << '\n';
}

int resolve_background_class(const PatchSet& patches, const std::string& name) {
    if (name.empty()) return 0;
    for (int i = 0; i < patches.n_classes(); ++i)
        if (patches.class_names[static_cast<size_t>(i)] == name) return i;
    throw ValidationError("background class '" + name + "' not found in patch set");
}

void require(bool ok, const std::string& message) {
    if (!ok) throw ValidationError(message);
}

int cmd_select(RunConfig rc) {
    require(!rc.cube.empty(), "select: --cube is required");
    require(!rc.patches.empty(), "select: --patches is required");
    fs::path out_dir = ensure_out_dir(rc.out);

    SpectralCube cube = load_cube(rc.cube);
    PatchSet patches = load_patchset(rc.patches);

    SelectionConfig cfg;
    cfg.n_select = rc.n_select;
    cfg.k_candidates = rc.k_candidates;
    if (cfg.k_candidates < cfg.n_select) {
        std::cerr << "note: raising k-candidates to " << cfg.n_select
                  << " so the pool can cover n-select\n";
        cfg.k_candidates = cfg.n_select;
    }
    if (cfg.k_candidates > cube.bands() && cfg.n_select <= cube.bands()) {
        std::cerr << "note: clamping k-candidates to the band count (" << cube.bands() << ")\n";
        cfg.k_candidates = cube.bands();
    }
    rc.k_candidates = cfg.k_candidates;  // record the effective value
    cfg.corr_threshold = rc.corr_threshold;
    cfg.csnr_percentile = rc.csnr_percentile;
    cfg.adjacency_window = rc.adjacency_window;
    cfg.search_radius = rc.search_radius;

    SelectOptions opts;
    opts.bins = rc.bins;
    opts.draws = rc.draws;
    opts.seed = rc.seed;
    opts.background_class = resolve_background_class(patches, rc.background);

    if (cfg.n_select == cube.bands())
        std::cerr << "warning: selection is identity — n-select equals the band count\n";

    SelectionOutcome outcome = select_bands(cube, patches, cfg, opts);

    {
        auto out = open_output(out_dir / "selection.json");
        write_selection_json(outcome.result, cfg, opts, out);
    }
    {
        auto out = open_output(out_dir / "band_scores.csv");
        outcome.scores.write_csv(out, cube.axis);
    }
    {
        auto out = open_output(out_dir / "correlation.csv");
        outcome.corr.write_csv(out);
    }
    {
        auto out = open_output(out_dir / "csnr_table.csv");
        outcome.csnr.write_csv(out);
    }
    {
        auto out = open_output(out_dir / "csnr_profile.csv");
        outcome.profile.write_csv(out, cube.axis);
    }
    write_run_config(rc, out_dir);

    std::cout << "selected channels:";
    for (size_t i = 0; i < outcome.result.channels.size(); ++i)
        std::cout << (i ? ", " : " ") << outcome.result.channels[i] << " ("
                  << format_double(outcome.result.wavelengths_nm[i]) << " nm)";
    std::cout << "\nartifacts in " << out_dir.string() << '\n';
    return 0;
}

void write_provenance_json(const CompositeProvenance& p, std::ostream& out) {
    ordered_json j;
    j["mapping"] = {{"red_center", p.mapping.red_center},
                    {"green_center", p.mapping.green_center},
                    {"blue_center", p.mapping.blue_center},
                    {"half_width", p.mapping.half_width}};
    j["wb_scales"] = {p.wb_scales[0], p.wb_scales[1], p.wb_scales[2]};
    j["percentile_lo"] = p.percentile_lo;
    j["percentile_hi"] = p.percentile_hi;
    j["gamma"] = p.gamma;
    j["norm_lo"] = p.norm_lo;
    j["norm_hi"] = p.norm_hi;
    j["window_clamped"] = p.window_clamped;
    j["zero_mean_plane"] = p.zero_mean_plane;
    j["degenerate_range"] = p.degenerate_range;
    out << j.dump(2) << '\n';
}

int cmd_composite(const RunConfig& rc) {
    require(!rc.cube.empty(), "composite: --cube is required");
    require(!rc.selection.empty(), "composite: --selection is required");
    fs::path out_dir = ensure_out_dir(rc.out);

    SpectralCube cube = load_cube(rc.cube);
    std::ifstream sel_in(rc.selection);
    if (!sel_in) throw ValidationError("cannot open selection file: " + rc.selection);
    SelectionResult sel = read_selection_json(sel_in);

    ChannelMapping mapping = mapping_from_selection(sel.channels, cube.axis, rc.half_width);
    CompositeImage comp = reconstruct_composite(cube, mapping);

    write_png(comp.image, out_dir / "composite.png");
    {
        auto out = open_output(out_dir / "composite_provenance.json");
        write_provenance_json(comp.provenance, out);
    }
    write_run_config(rc, out_dir);

    std::cout << "composite " << comp.image.width << "x" << comp.image.height
              << " (R<-ch" << mapping.red_center << ", G<-ch" << mapping.green_center
              << ", B<-ch" << mapping.blue_center << ") -> "
              << (out_dir / "composite.png").string() << '\n';
    return 0;
}

int cmd_evaluate(const RunConfig& rc) {
    fs::path out_dir = ensure_out_dir(rc.out);

    MetricReport report;
    if (!rc.records.empty()) {
        std::ifstream in(rc.records);
        if (!in) throw ValidationError("cannot open records file: " + rc.records);
        auto [rec_rgb, rec_composite] = read_records_csv(in);
        report = aggregate_report(rec_rgb, rec_composite);
    } else {
        require(!rc.rgb.empty() && !rc.composite.empty() && !rc.patches.empty(),
                "evaluate: needs --records, or --rgb, --composite and --patches together");
        Rgb8Image rgb = read_png(rc.rgb);
        Rgb8Image composite = read_png(rc.composite);
        if (rgb.width != composite.width || rgb.height != composite.height)
            throw ValidationError("image dimensions differ: rgb " + std::to_string(rgb.width) +
                                  "x" + std::to_string(rgb.height) + " vs composite " +
                                  std::to_string(composite.width) + "x" +
                                  std::to_string(composite.height));
        PatchSet patches = load_patchset(rc.patches);
        for (const LabeledPatch& p : patches.patches)
            if (!p.inside(rgb.height, rgb.width))
                throw ValidationError("patch '" + p.label + "' falls outside the image bounds");
        std::string bg = rc.background.empty() ? patches.patches.front().label : rc.background;
        auto rec_rgb = evaluate_pairs(rgb, patches, bg, "RGB");
        auto rec_composite = evaluate_pairs(composite, patches, bg, "composite");
        report = aggregate_report(rec_rgb, rec_composite);
    }

    {
        auto out = open_output(out_dir / "report.csv");
        write_report_csv(report, out);
    }
    {
        auto out = open_output(out_dir / "report.json");
        write_report_json(report, out);
    }
    write_run_config(rc, out_dir);

    for (int m = 0; m < 4; ++m)
        std::cout << kMetricNames[static_cast<size_t>(m)] << ": rgb avg "
                  << format_double(report.avg_rgb[static_cast<size_t>(m)]) << ", composite avg "
                  << format_double(report.avg_composite[static_cast<size_t>(m)]) << ", improvement "
                  << format_double(report.improvement_pct[static_cast<size_t>(m)]) << "%\n";
    return 0;
}

int cmd_synth(RunConfig rc) {
    fs::path out_dir = ensure_out_dir(rc.out);

    SceneSpec spec = rc.spec_file.empty() ? default_scene_spec() : load_scene_spec(rc.spec_file);
    if (rc.seed_explicit) spec.seed = rc.seed;
    rc.seed = spec.seed;  // record the seed that actually drove the noise

    SensorModel sensor = build_sensor_model(spec.axis);
    GeneratedScene scene = generate_scene(spec, sensor);

    save_cube(scene.cube, out_dir / "scene.hdr");
    save_patchset(scene.patches, out_dir / "patches.csv");
    write_png(scene.render, out_dir / "render.png");
    write_run_config(rc, out_dir);

    for (const PlacedPatch& p : spec.patches) {
        Eigen::VectorXd diff = p.spectrum - spec.background;
        double rgb_delta = (sensor.response * diff).cwiseAbs().maxCoeff();
        double nir_sep = diff.cwiseAbs().maxCoeff();
        std::cout << "patch '" << p.label << "': max |rgb delta| " << format_double(rgb_delta)
                  << ", NIR separation " << format_double(nir_sep) << '\n';
    }
    std::cout << "scene " << scene.cube.rows << "x" << scene.cube.cols << "x" << scene.cube.bands()
              << " -> " << out_dir.string() << '\n';
    return 0;
}

int cmd_heatmap(const RunConfig& rc) {
    require(!rc.input.empty(), "heatmap: --input is required");
    fs::path out_dir = ensure_out_dir(rc.out);

    auto matrix = read_numeric_matrix(rc.input);
    int height = static_cast<int>(matrix.size());
    int width = static_cast<int>(matrix[0].size());

    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& row : matrix)
        for (double v : row) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    bool degenerate = (hi - lo) < 1e-12;

    Rgb8Image img;
    img.width = width;
    img.height = height;
    img.pixels.assign(static_cast<size_t>(width) * height * 3, 0);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double v = degenerate ? 0.5 : (matrix[static_cast<size_t>(y)][static_cast<size_t>(x)] - lo) / (hi - lo);
            std::uint8_t g = quantize8(std::clamp(v, 0.0, 1.0));
            size_t off = img.index(x, y);
            img.pixels[off] = img.pixels[off + 1] = img.pixels[off + 2] = g;
        }

    write_png(img, out_dir / "heatmap.png");
    write_run_config(rc, out_dir);

    std::cout << "heatmap " << width << "x" << height << " -> "
              << (out_dir / "heatmap.png").string() << '\n';
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    RunConfig rc;
    CLI::App app{"hsiband — information-driven spectral band selection and composite evaluation"};
    app.require_subcommand(1);

    std::string config_path;  // consumed in the pre-scan; registered so parsing accepts it

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON file of defaults; flags override it");
        sub->add_option("--out", rc.out, "output directory (created if missing)");
    };

    CLI::App* s_select = app.add_subcommand("select", "rank bands and pick a decorrelated subset");
    add_common(s_select);
    s_select->add_option("--cube", rc.cube, "ENVI-style cube header");
    s_select->add_option("--patches", rc.patches, "labeled patch CSV");
    s_select->add_option("--n-select", rc.n_select, "channels to select");
    s_select->add_option("--k-candidates", rc.k_candidates, "JMIM pool depth");
    s_select->add_option("--corr-threshold", rc.corr_threshold, "max pairwise |correlation|");
    s_select->add_option("--csnr-percentile", rc.csnr_percentile, "CSNR threshold percentile");
    s_select->add_option("--bins", rc.bins, "quantile bins for MI estimation");
    s_select->add_option("--draws", rc.draws, "CSNR half-subset draws");
    s_select->add_option("--adjacency-window", rc.adjacency_window, "channel distance counted as adjacent");
    s_select->add_option("--search-radius", rc.search_radius, "replacement search radius, channels");
    s_select->add_option("--background", rc.background, "background class name (default: first class)");
    CLI::Option* select_seed = s_select->add_option("--seed", rc.seed, "RNG seed");

    CLI::App* s_composite = app.add_subcommand("composite", "reconstruct a pseudo-color composite");
    add_common(s_composite);
    s_composite->add_option("--cube", rc.cube, "ENVI-style cube header");
    s_composite->add_option("--selection", rc.selection, "selection JSON with exactly 3 channels");
    s_composite->add_option("--half-width", rc.half_width, "integration half-width, channels");

    CLI::App* s_evaluate = app.add_subcommand("evaluate", "patch-pair separability report");
    add_common(s_evaluate);
    s_evaluate->add_option("--rgb", rc.rgb, "RGB baseline PNG");
    s_evaluate->add_option("--composite", rc.composite, "composite PNG");
    s_evaluate->add_option("--patches", rc.patches, "labeled patch CSV");
    s_evaluate->add_option("--records", rc.records, "pre-computed per-pair records CSV (skips images)");
    s_evaluate->add_option("--background", rc.background, "background patch label (default: first patch)");

    CLI::App* s_synth = app.add_subcommand("synth", "generate a synthetic metamer scene");
    add_common(s_synth);
    s_synth->add_option("--spec", rc.spec_file, "scene description JSON (default: built-in scene)");
    CLI::Option* synth_seed = s_synth->add_option("--seed", rc.seed, "noise seed (overrides the spec)");

    CLI::App* s_heatmap = app.add_subcommand("heatmap", "render a numeric CSV as a grayscale heatmap");
    add_common(s_heatmap);
    s_heatmap->add_option("--input", rc.input, "rectangular numeric CSV");

    try {
        // Config file first, so explicit flags win when CLI11 parses below.
        for (size_t i = 0; i + 1 < args.size(); ++i)
            if (args[i] == "--config") apply_config_file(args[i + 1], rc);

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        try {
            app.parse(reversed);
        } catch (const CLI::ParseError& e) {
            int code = app.exit(e);
            return code == 0 ? 0 : 2;
        }

        if (select_seed->count() > 0 || synth_seed->count() > 0) rc.seed_explicit = true;

        CLI::App* sub = app.get_subcommands().front();
        rc.command = sub->get_name();
        if (rc.command == "select") return cmd_select(rc);
        if (rc.command == "composite") return cmd_composite(rc);
        if (rc.command == "evaluate") return cmd_evaluate(rc);
        if (rc.command == "synth") return cmd_synth(rc);
        return cmd_heatmap(rc);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace hsiband::cli
