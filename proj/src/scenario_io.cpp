#include "nearshore/io.hpp"
#include "nearshore/simulator.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace nearshore::io {

using nlohmann::json;

namespace {

json ring_to_json(const Ring& r) {
    json out = json::array();
    for (const Vec2& v : r) {
        out.push_back(json::array({v.x, v.y}));
    }
    return out;
}

Ring ring_from_json(const json& j) {
    Ring r;
    for (const json& v : j) {
        r.push_back(Vec2{v.at(0).get<double>(), v.at(1).get<double>()});
    }
    return r;
}

json waypoints_to_json(const std::vector<Waypoint>& wps) {
    json out = json::array();
    for (const Waypoint& w : wps) {
        out.push_back(json{{"t", w.t}, {"x", w.x}, {"y", w.y}});
    }
    return out;
}

std::vector<Waypoint> waypoints_from_json(const json& j) {
    std::vector<Waypoint> out;
    for (const json& w : j) {
        out.push_back(Waypoint{w.at("t").get<double>(), w.at("x").get<double>(),
                               w.at("y").get<double>()});
    }
    return out;
}

}  // namespace

void save_scenario_spec(const ScenarioSpec& spec, const std::string& path) {
    json doc;
    doc["name"] = spec.name;
    doc["seed"] = spec.seed;
    doc["duration_s"] = spec.duration_s;
    doc["lidar_rate_hz"] = spec.lidar_rate_hz;
    doc["mask_rate_hz"] = spec.mask_rate_hz;
    doc["mask_time_offset_s"] = spec.mask_time_offset_s;

    json statics = json::array();
    for (const StaticStructure& s : spec.statics) {
        statics.push_back(json{{"name", s.name}, {"ring", ring_to_json(s.ring)},
                               {"in_enc", s.in_enc}});
    }
    doc["statics"] = statics;

    json docked = json::array();
    for (const Ring& r : spec.docked_vessels) {
        docked.push_back(ring_to_json(r));
    }
    doc["docked_vessels"] = docked;

    json targets = json::array();
    for (const TargetScript& t : spec.targets) {
        targets.push_back(json{{"name", t.name},
                               {"shape", ring_to_json(t.shape)},
                               {"waypoints", waypoints_to_json(t.waypoints)},
                               {"vessel_class", t.vessel_class}});
    }
    doc["targets"] = targets;

    doc["clutter_rate"] = spec.clutter_rate;
    doc["lidar_angular_res_deg"] = spec.lidar_angular_res_deg;
    doc["lidar_max_range_m"] = spec.lidar_max_range_m;
    doc["range_noise_std_m"] = spec.range_noise_std_m;
    doc["point_height_min_m"] = spec.point_height_min_m;
    doc["point_height_max_m"] = spec.point_height_max_m;
    doc["clutter_height_max_m"] = spec.clutter_height_max_m;

    doc["camera"] = json{{"fx", spec.camera.fx},       {"fy", spec.camera.fy},
                         {"cx", spec.camera.cx},       {"cy", spec.camera.cy},
                         {"width", spec.camera.width}, {"height", spec.camera.height}};
    const Eigen::Quaterniond q = spec.cam_from_lidar.quaternion().normalized();
    const Eigen::Vector3d t = spec.cam_from_lidar.translation();
    doc["cam_from_lidar"] = json{{"qw", q.w()}, {"qx", q.x()}, {"qy", q.y()}, {"qz", q.z()},
                                 {"x", t.x()},  {"y", t.y()},  {"z", t.z()}};

    json ego = json::array();
    for (const EgoWaypoint& w : spec.ego_waypoints) {
        ego.push_back(json{{"t", w.t}, {"x", w.x}, {"y", w.y}, {"yaw", w.yaw}});
    }
    doc["ego_waypoints"] = ego;

    doc["grid"] = json{{"origin_x", spec.grid.origin_x},
                       {"origin_y", spec.grid.origin_y},
                       {"cell_size", spec.grid.cell_size},
                       {"n_cols", spec.grid.n_cols},
                       {"n_rows", spec.grid.n_rows}};
    doc["start_time_us"] = spec.start_time_us;

    doc["mask_false_negative_rate"] = spec.mask_false_negative_rate;
    doc["mask_false_positive_per_frame"] = spec.mask_false_positive_per_frame;
    doc["fp_patch_width"] = spec.fp_patch_width;
    doc["fp_patch_height"] = spec.fp_patch_height;

    doc["coverage_window_frames"] = spec.coverage_window_frames;
    doc["coverage_min_fraction"] = spec.coverage_min_fraction;
    doc["coverage_max_range_m"] = spec.coverage_max_range_m;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ParseError("cannot write '" + path + "'");
    }
    out << doc.dump(1) << "\n";
}

ScenarioSpec load_scenario_spec(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    json doc;
    try {
        doc = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    ScenarioSpec spec;
    try {
        spec.name = doc.value("name", spec.name);
        spec.seed = doc.value("seed", spec.seed);
        spec.duration_s = doc.value("duration_s", spec.duration_s);
        spec.lidar_rate_hz = doc.value("lidar_rate_hz", spec.lidar_rate_hz);
        spec.mask_rate_hz = doc.value("mask_rate_hz", spec.mask_rate_hz);
        spec.mask_time_offset_s = doc.value("mask_time_offset_s", spec.mask_time_offset_s);

        for (const json& s : doc.value("statics", json::array())) {
            spec.statics.push_back(StaticStructure{s.value("name", std::string{}),
                                                   ring_from_json(s.at("ring")),
                                                   s.value("in_enc", false)});
        }
        for (const json& r : doc.value("docked_vessels", json::array())) {
            spec.docked_vessels.push_back(ring_from_json(r));
        }
        for (const json& t : doc.value("targets", json::array())) {
            TargetScript script;
            script.name = t.value("name", std::string{});
            script.shape = ring_from_json(t.at("shape"));
            script.waypoints = waypoints_from_json(t.at("waypoints"));
            script.vessel_class = t.value("vessel_class", true);
            spec.targets.push_back(std::move(script));
        }

        spec.clutter_rate = doc.value("clutter_rate", spec.clutter_rate);
        spec.lidar_angular_res_deg =
            doc.value("lidar_angular_res_deg", spec.lidar_angular_res_deg);
        spec.lidar_max_range_m = doc.value("lidar_max_range_m", spec.lidar_max_range_m);
        spec.range_noise_std_m = doc.value("range_noise_std_m", spec.range_noise_std_m);
        spec.point_height_min_m = doc.value("point_height_min_m", spec.point_height_min_m);
        spec.point_height_max_m = doc.value("point_height_max_m", spec.point_height_max_m);
        spec.clutter_height_max_m = doc.value("clutter_height_max_m", spec.clutter_height_max_m);

        const json& cam = doc.at("camera");
        spec.camera.fx = cam.at("fx").get<double>();
        spec.camera.fy = cam.at("fy").get<double>();
        spec.camera.cx = cam.at("cx").get<double>();
        spec.camera.cy = cam.at("cy").get<double>();
        spec.camera.width = cam.at("width").get<int>();
        spec.camera.height = cam.at("height").get<int>();

        const json& h = doc.at("cam_from_lidar");
        spec.cam_from_lidar = RigidTransform::from_quaternion(
            Eigen::Quaterniond(h.at("qw").get<double>(), h.at("qx").get<double>(),
                               h.at("qy").get<double>(), h.at("qz").get<double>()),
            Eigen::Vector3d(h.at("x").get<double>(), h.at("y").get<double>(),
                            h.at("z").get<double>()),
            Frame::Lidar, Frame::Camera);

        for (const json& w : doc.at("ego_waypoints")) {
            spec.ego_waypoints.push_back(EgoWaypoint{w.at("t").get<double>(),
                                                     w.at("x").get<double>(),
                                                     w.at("y").get<double>(),
                                                     w.value("yaw", 0.0)});
        }

        const json& g = doc.at("grid");
        spec.grid.origin_x = g.at("origin_x").get<double>();
        spec.grid.origin_y = g.at("origin_y").get<double>();
        spec.grid.cell_size = g.at("cell_size").get<double>();
        spec.grid.n_cols = g.at("n_cols").get<int>();
        spec.grid.n_rows = g.at("n_rows").get<int>();

        spec.start_time_us = doc.value("start_time_us", spec.start_time_us);
        spec.mask_false_negative_rate =
            doc.value("mask_false_negative_rate", spec.mask_false_negative_rate);
        spec.mask_false_positive_per_frame =
            doc.value("mask_false_positive_per_frame", spec.mask_false_positive_per_frame);
        spec.fp_patch_width = doc.value("fp_patch_width", spec.fp_patch_width);
        spec.fp_patch_height = doc.value("fp_patch_height", spec.fp_patch_height);
        spec.coverage_window_frames =
            doc.value("coverage_window_frames", spec.coverage_window_frames);
        spec.coverage_min_fraction =
            doc.value("coverage_min_fraction", spec.coverage_min_fraction);
        spec.coverage_max_range_m =
            doc.value("coverage_max_range_m", spec.coverage_max_range_m);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return spec;
}

}  // namespace nearshore::io
