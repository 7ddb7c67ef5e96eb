#include "nearshore/cli.hpp"

#include "nearshore/config.hpp"
#include "nearshore/detector.hpp"
#include "nearshore/io.hpp"
#include "nearshore/mapper.hpp"
#include "nearshore/simulator.hpp"
#include "nearshore/svg.hpp"
#include "nearshore/tracker.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <set>

namespace nearshore::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

bool require_file(const std::string& path, const char* what) {
    if (path.empty()) {
        std::fprintf(stderr, "error: missing %s path\n", what);
        return false;
    }
    if (!fs::exists(path)) {
        std::fprintf(stderr, "error: %s '%s' does not exist\n", what, path.c_str());
        return false;
    }
    return true;
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

struct SimulateOptions {
    std::string scenario;
    std::string spec_file;
    std::string out_dir = "out";
    std::uint64_t seed = 0;  // 0: keep the scenario's own seed
    double duration = 0.0;   // 0: keep
    double mask_fn_rate = -1.0;
    double mask_fp_rate = -1.0;
    bool verbose = false;
};

int cmd_simulate(const SimulateOptions& opt) {
    ScenarioSpec spec;
    if (!opt.spec_file.empty()) {
        if (!require_file(opt.spec_file, "scenario spec")) {
            return kUsage;
        }
        spec = io::load_scenario_spec(opt.spec_file);
    } else {
        try {
            spec = builtin_scenario(opt.scenario);
        } catch (const ConfigError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            std::fprintf(stderr, "available scenarios:");
            for (const ScenarioSpec& s : builtin_scenarios()) {
                std::fprintf(stderr, " %s", s.name.c_str());
            }
            std::fprintf(stderr, "\n");
            return kUsage;
        }
    }
    if (opt.seed != 0) spec.seed = opt.seed;
    if (opt.duration > 0.0) spec.duration_s = opt.duration;
    if (opt.mask_fn_rate >= 0.0) spec.mask_false_negative_rate = opt.mask_fn_rate;
    if (opt.mask_fp_rate >= 0.0) spec.mask_false_positive_per_frame = opt.mask_fp_rate;

    const SimResult sim = generate(spec);

    fs::create_directories(opt.out_dir);
    io::Manifest m;
    m.points = "points.csv";
    m.poses = "poses.csv";
    m.calib = "calib.json";
    m.masks = {"masks_cam0.json"};
    m.enc = "enc.geojson";
    m.truth_tracks = "truth_tracks.csv";
    m.truth_map = "truth_map.pgm";
    m.docked_footprint = "docked_footprint.pgm";
    m.coverage = "coverage.pgm";
    m.grid = spec.grid;

    io::save_lidar_sequence(sim.bundle.frames, join(opt.out_dir, m.points));
    io::save_poses(sim.bundle.poses, join(opt.out_dir, m.poses));
    io::save_calibration(sim.bundle.cameras, join(opt.out_dir, m.calib));
    io::save_masks(sim.bundle.masks_per_camera[0], join(opt.out_dir, m.masks[0]));
    io::save_enc(sim.enc, join(opt.out_dir, m.enc));
    io::save_truth(sim.truth.samples, join(opt.out_dir, m.truth_tracks));
    io::save_map(sim.truth.truth_map, join(opt.out_dir, m.truth_map));
    io::save_map(sim.truth.docked_footprint, join(opt.out_dir, m.docked_footprint));
    io::save_map(sim.truth.coverage, join(opt.out_dir, m.coverage));
    io::save_manifest(m, join(opt.out_dir, "manifest.json"));

    std::size_t n_points = 0;
    for (const LidarFrame& f : sim.bundle.frames) n_points += f.points.size();
    std::printf("simulated '%s': %zu frames, %zu points (%zu clutter), %zu targets, "
                "%zu mask frames, seed %llu\n",
                spec.name.c_str(), sim.bundle.frames.size(), n_points, sim.clutter_points,
                spec.targets.size(), sim.bundle.masks_per_camera[0].size(),
                static_cast<unsigned long long>(spec.seed));
    return kOk;
}

struct MapOptions {
    std::string data_manifest;
    std::string out_dir = "out";
    bool no_masks = false;
    bool boundary = false;
    PipelineConfig cfg;
    bool verbose = false;
};

int cmd_map(const MapOptions& opt) {
    if (!require_file(opt.data_manifest, "data manifest")) {
        return kUsage;
    }
    const SequenceBundle bundle = io::load_bundle(opt.data_manifest);
    const io::Manifest manifest = io::load_manifest(opt.data_manifest);

    std::optional<BinaryMap> enc_map;
    if (!manifest.enc.empty()) {
        const std::string enc_path =
            (fs::path(opt.data_manifest).parent_path() / manifest.enc).string();
        if (fs::exists(enc_path)) {
            enc_map = rasterize_enc(io::load_enc(enc_path), bundle.grid);
        }
    }

    const MappingResult result = run_mapping(bundle, opt.cfg.mapper,
                                             enc_map ? &*enc_map : nullptr, opt.no_masks);

    fs::create_directories(opt.out_dir);
    const std::string map_path = join(opt.out_dir, "map.pgm");
    io::save_map(result.merged, map_path, opt.cfg.config_hash(), {opt.data_manifest});
    if (opt.boundary) {
        io::save_boundary_geojson(io::map_boundary_rings(result.merged),
                                  join(opt.out_dir, "map_boundary.geojson"));
    }
    std::printf("mapped %lld frames: %zu raw static cells, %zu post-morphology, "
                "%zu post-enc-merge -> %s\n",
                static_cast<long long>(result.stats.frames), result.stats.raw_static_cells,
                result.stats.post_morphology_cells, result.stats.post_enc_merge_cells,
                map_path.c_str());
    return kOk;
}

struct TrackOptions {
    std::string data_manifest;
    std::string map_path;
    std::string out_dir = "out";
    PipelineConfig cfg;
    bool verbose = false;
};

int cmd_track(const TrackOptions& opt) {
    if (!require_file(opt.data_manifest, "data manifest")) {
        return kUsage;
    }
    const MapVariant variant = opt.cfg.variant;
    std::optional<BinaryMap> map;
    switch (variant.kind) {
        case MapVariantKind::None:
            break;
        case MapVariantKind::EncOnly: {
            const io::Manifest manifest = io::load_manifest(opt.data_manifest);
            if (manifest.enc.empty()) {
                std::fprintf(stderr, "error: enc_only variant needs an ENC in the manifest\n");
                return kUsage;
            }
            const std::string enc_path =
                (fs::path(opt.data_manifest).parent_path() / manifest.enc).string();
            if (!require_file(enc_path, "ENC")) {
                return kUsage;
            }
            map = rasterize_enc(io::load_enc(enc_path), io::load_manifest(opt.data_manifest).grid);
            break;
        }
        case MapVariantKind::Dilated:
        case MapVariantKind::Precise: {
            if (!require_file(opt.map_path, "map")) {
                return kUsage;
            }
            map = io::load_map(opt.map_path);
            if (variant.kind == MapVariantKind::Dilated) {
                map = dilate_map(*map, variant.margin_m);
            }
            break;
        }
    }

    const SequenceBundle bundle = io::load_bundle(opt.data_manifest);

    Tracker tracker(opt.cfg.tracker);
    std::vector<Detection> all_detections;
    std::vector<TrackSnapshot> snapshots;
    for (const LidarFrame& frame : bundle.frames) {
        const RigidTransform pose = interpolate_pose(bundle.poses, frame.t);
        const std::vector<Detection> detections =
            detect_frame(frame, pose, map ? &*map : nullptr, opt.cfg.detector);
        all_detections.insert(all_detections.end(), detections.begin(), detections.end());
        for (const Track& tr : tracker.step(detections, frame.t)) {
            TrackSnapshot s;
            s.t = frame.t;
            s.track_id = tr.id;
            s.status = tr.status;
            s.x = tr.state.mean(0);
            s.y = tr.state.mean(1);
            s.vx = tr.state.mean(2);
            s.vy = tr.state.mean(3);
            s.existence = tr.existence;
            s.visibility = tr.visibility;
            s.p_xx = tr.state.cov(0, 0);
            s.p_xy = tr.state.cov(0, 1);
            s.p_yy = tr.state.cov(1, 1);
            snapshots.push_back(s);
        }
    }

    fs::create_directories(opt.out_dir);
    io::save_detections(all_detections, join(opt.out_dir, "detections.csv"));
    io::save_tracks(snapshots, join(opt.out_dir, "tracks.csv"));
    io::save_track_summary(snapshots, join(opt.out_dir, "track_summary.json"));

    std::vector<TruthSample> truth;
    const io::Manifest manifest = io::load_manifest(opt.data_manifest);
    if (!manifest.truth_tracks.empty()) {
        const std::string truth_path =
            (fs::path(opt.data_manifest).parent_path() / manifest.truth_tracks).string();
        if (fs::exists(truth_path)) {
            truth = io::load_truth(truth_path);
        }
    }
    write_overview_svg(join(opt.out_dir, "overview.svg"), map ? &*map : nullptr, all_detections,
                       snapshots, truth);

    std::set<std::uint64_t> ids;
    std::set<std::uint64_t> confirmed;
    for (const TrackSnapshot& s : snapshots) {
        ids.insert(s.track_id);
        if (s.status == TrackStatus::Confirmed) confirmed.insert(s.track_id);
    }
    std::printf("tracked %zu frames with variant '%s': %zu tracks, %zu confirmed -> %s\n",
                bundle.frames.size(), map_variant_name(variant.kind), ids.size(),
                confirmed.size(), join(opt.out_dir, "tracks.csv").c_str());
    return kOk;
}

struct EvalOptions {
    std::string tracks_path;
    std::string truth_path;
    std::string map_path;
    std::string truth_map_path;
    std::string docked_path;
    std::string coverage_path;
    std::string out_dir = "out";
    double match_radius_m = 3.0;
    bool verbose = false;
};

int cmd_eval(const EvalOptions& opt) {
    if (!require_file(opt.tracks_path, "track table") ||
        !require_file(opt.truth_path, "truth track file")) {
        return kUsage;
    }
    const std::vector<TrackSnapshot> snapshots = io::load_tracks(opt.tracks_path);
    const std::vector<TruthSample> truth = io::load_truth(opt.truth_path);
    const TrackScore track_score = score_tracks(snapshots, truth, opt.match_radius_m);

    std::optional<MapScore> map_score;
    if (!opt.map_path.empty() || !opt.truth_map_path.empty()) {
        if (!require_file(opt.map_path, "map") || !require_file(opt.truth_map_path, "truth map")) {
            return kUsage;
        }
        const BinaryMap est = io::load_map(opt.map_path);
        const BinaryMap truth_map = io::load_map(opt.truth_map_path);
        BinaryMap docked(est.spec);
        if (!opt.docked_path.empty()) {
            if (!require_file(opt.docked_path, "docked footprint")) {
                return kUsage;
            }
            docked = io::load_map(opt.docked_path);
        }
        BinaryMap coverage(est.spec);
        if (!opt.coverage_path.empty()) {
            if (!require_file(opt.coverage_path, "coverage raster")) {
                return kUsage;
            }
            coverage = io::load_map(opt.coverage_path);
        } else {
            std::fill(coverage.cells.begin(), coverage.cells.end(), std::uint8_t{1});
        }
        map_score = score_map(est, truth_map, docked, coverage);
    }

    fs::create_directories(opt.out_dir);
    io::save_score_report(map_score ? &*map_score : nullptr, &track_score,
                          join(opt.out_dir, "report.json"), join(opt.out_dir, "metrics.csv"));

    if (map_score) {
        std::printf("map: iou %.4f, docked exclusion %.4f, coverage %.4f\n", map_score->iou,
                    map_score->docked_exclusion, map_score->coverage_rate);
    }
    std::printf("tracks: %d confirmed (%d tentative-only), %d targets, %d false\n",
                track_score.confirmed_tracks, track_score.tentative_only_tracks,
                track_score.true_targets, track_score.false_tracks);
    return kOk;
}

int run_parsed(CLI::App& app, const SimulateOptions& sim_opt, const MapOptions& map_opt,
               const TrackOptions& track_opt, const EvalOptions& eval_opt,
               const PipelineConfig& cfg) {
    if (app.got_subcommand("simulate")) {
        return cmd_simulate(sim_opt);
    }
    if (app.got_subcommand("map")) {
        return cmd_map(map_opt);
    }
    if (app.got_subcommand("track")) {
        return cmd_track(track_opt);
    }
    if (app.got_subcommand("eval")) {
        return cmd_eval(eval_opt);
    }
    if (app.got_subcommand("pipeline")) {
        // simulate -> map -> track -> eval, all through the files on disk.
        SimulateOptions sim = sim_opt;
        sim.out_dir = join(cfg.out_dir, "data");
        int rc = cmd_simulate(sim);
        if (rc != kOk) return rc;

        MapOptions mo = map_opt;
        mo.data_manifest = join(sim.out_dir, "manifest.json");
        mo.out_dir = cfg.out_dir;
        rc = cmd_map(mo);
        if (rc != kOk) return rc;

        TrackOptions to = track_opt;
        to.data_manifest = mo.data_manifest;
        to.map_path = join(cfg.out_dir, "map.pgm");
        to.out_dir = cfg.out_dir;
        rc = cmd_track(to);
        if (rc != kOk) return rc;

        EvalOptions eo = eval_opt;
        eo.tracks_path = join(cfg.out_dir, "tracks.csv");
        eo.truth_path = join(sim.out_dir, "truth_tracks.csv");
        eo.map_path = join(cfg.out_dir, "map.pgm");
        eo.truth_map_path = join(sim.out_dir, "truth_map.pgm");
        eo.docked_path = join(sim.out_dir, "docked_footprint.pgm");
        eo.coverage_path = join(sim.out_dir, "coverage.pgm");
        eo.out_dir = cfg.out_dir;
        eo.match_radius_m = cfg.match_radius_m;
        return cmd_eval(eo);
    }
    std::fprintf(stderr, "error: no subcommand given\n");
    return kUsage;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("nearshore");
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    CLI::App app{"near-shore mapping and vessel tracking pipeline"};
    app.require_subcommand(0, 1);

    std::string config_path;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool verbose = false;
    app.add_option("--config", config_path, "pipeline configuration document");
    app.add_option("--seed", seed, "override the scenario seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--verbose", verbose, "chatty stage logging");

    SimulateOptions sim_opt;
    auto* sim = app.add_subcommand("simulate", "generate a synthetic harbor sequence");
    sim->add_option("--scenario", sim_opt.scenario, "builtin scenario name");
    sim->add_option("--spec", sim_opt.spec_file, "scenario spec JSON");
    sim->add_option("--duration", sim_opt.duration, "override duration in seconds");
    sim->add_option("--mask-fn-rate", sim_opt.mask_fn_rate,
                    "mask false-negative rate in [0,1]");
    sim->add_option("--mask-fp-rate", sim_opt.mask_fp_rate,
                    "spurious mask probability per frame");

    MapOptions map_opt;
    auto* mapc = app.add_subcommand("map", "build the static-structure map");
    mapc->add_option("--data", map_opt.data_manifest, "sequence manifest");
    mapc->add_flag("--no-masks", map_opt.no_masks, "naive accumulation baseline");
    mapc->add_flag("--boundary", map_opt.boundary, "also export boundary polygons");

    TrackOptions track_opt;
    std::string variant_name;
    double margin = -1.0;
    auto* trackc = app.add_subcommand("track", "detect and track vessels");
    trackc->add_option("--data", track_opt.data_manifest, "sequence manifest");
    trackc->add_option("--map", track_opt.map_path, "precise map raster");
    trackc->add_option("--map-variant", variant_name, "none|enc_only|dilated|precise");
    trackc->add_option("--margin", margin, "dilation margin in meters");

    EvalOptions eval_opt;
    auto* evalc = app.add_subcommand("eval", "score maps and tracks against truth");
    evalc->add_option("--tracks", eval_opt.tracks_path, "track table");
    evalc->add_option("--truth", eval_opt.truth_path, "truth track file");
    evalc->add_option("--map", eval_opt.map_path, "estimated map raster");
    evalc->add_option("--truth-map", eval_opt.truth_map_path, "truth map raster");
    evalc->add_option("--docked", eval_opt.docked_path, "docked footprint raster");
    evalc->add_option("--coverage", eval_opt.coverage_path, "coverage raster");
    evalc->add_option("--match-radius", eval_opt.match_radius_m, "assignment radius (m)");

    auto* pipe = app.add_subcommand("pipeline", "simulate, map, track and eval in one go");
    std::string pipe_scenario;
    std::string pipe_variant;
    double pipe_margin = -1.0;
    bool pipe_no_masks = false;
    pipe->add_option("--scenario", pipe_scenario, "builtin scenario name");
    pipe->add_option("--map-variant", pipe_variant, "none|enc_only|dilated|precise");
    pipe->add_option("--margin", pipe_margin, "dilation margin in meters");
    pipe->add_flag("--no-masks", pipe_no_masks, "naive accumulation baseline");

    try {
        app.parse(argc, const_cast<char**>(argv));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        PipelineConfig cfg;
        if (!config_path.empty()) {
            if (!require_file(config_path, "config")) {
                return kUsage;
            }
            cfg = PipelineConfig::load(config_path);
        }
        if (seed != 0) cfg.seed = seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (!variant_name.empty()) cfg.variant.kind = map_variant_from_name(variant_name);
        if (margin >= 0.0) cfg.variant.margin_m = margin;
        if (!pipe_variant.empty()) cfg.variant.kind = map_variant_from_name(pipe_variant);
        if (pipe_margin >= 0.0) cfg.variant.margin_m = pipe_margin;
        if (!pipe_scenario.empty()) cfg.scenario = pipe_scenario;
        if (pipe_no_masks) cfg.no_masks = pipe_no_masks;

        sim_opt.seed = cfg.seed;
        sim_opt.verbose = verbose;
        if (sim_opt.scenario.empty() && sim_opt.spec_file.empty()) {
            sim_opt.scenario = cfg.scenario;
        }
        if (sim->parsed() && !out_dir.empty()) {
            sim_opt.out_dir = out_dir;
        } else if (sim->parsed()) {
            sim_opt.out_dir = cfg.out_dir;
        }

        map_opt.cfg = cfg;
        map_opt.verbose = verbose;
        map_opt.out_dir = cfg.out_dir;
        if (map_opt.data_manifest.empty()) map_opt.data_manifest = cfg.data_manifest;
        map_opt.no_masks = map_opt.no_masks || cfg.no_masks;

        track_opt.cfg = cfg;
        track_opt.cfg.variant = cfg.variant;
        track_opt.verbose = verbose;
        track_opt.out_dir = cfg.out_dir;
        if (track_opt.data_manifest.empty()) track_opt.data_manifest = cfg.data_manifest;
        if (track_opt.map_path.empty()) track_opt.map_path = cfg.map_path;

        eval_opt.out_dir = cfg.out_dir;
        if (!evalc->count("--match-radius")) {
            eval_opt.match_radius_m = cfg.match_radius_m;
        }
        eval_opt.verbose = verbose;

        return run_parsed(app, sim_opt, map_opt, track_opt, eval_opt, cfg);
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kFailure;
    }
}

}  // namespace nearshore::cli
