#include "nearshore/simulator.hpp"

namespace nearshore {

namespace {

Ring rect(double x0, double y0, double x1, double y1) {
    return Ring{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
}

/// Axis-aligned rectangle centered at the origin (target shapes).
Ring hull(double length, double width) {
    return rect(-length / 2.0, -width / 2.0, length / 2.0, width / 2.0);
}

CameraIntrinsics harbor_camera() {
    CameraIntrinsics k;
    k.fx = 600.0;
    k.fy = 600.0;
    k.cx = 640.0;
    k.cy = 360.0;
    k.width = 1280;
    k.height = 720;
    return k;
}

RigidTransform harbor_cam_from_lidar() {
    // Camera 1.8 m above the LiDAR origin, optical axis along body +x:
    // cam x -> -y_lidar, cam y -> -z_lidar, cam z -> +x_lidar.
    Eigen::Matrix3d lidar_from_cam_rot;
    lidar_from_cam_rot << 0, 0, 1,  //
        -1, 0, 0,                   //
        0, -1, 0;
    const RigidTransform lidar_from_cam(lidar_from_cam_rot, Eigen::Vector3d(0.3, 0.0, 1.8),
                                        Frame::Camera, Frame::Lidar);
    return lidar_from_cam.inverse();
}

GridSpec harbor_grid() {
    GridSpec g;
    g.origin_x = -10.0;
    g.origin_y = -40.0;
    g.cell_size = 0.5;
    g.n_cols = 170;  // to x = 75
    g.n_rows = 180;  // to y = 50
    return g;
}

/// The docking area shared by all scenarios: a floating dock (absent from
/// the chart) plus three charted shore structures, all inside the camera
/// wedge of the moored ego vessel at the origin.
std::vector<StaticStructure> harbor_statics() {
    std::vector<StaticStructure> s;
    s.push_back({"floating_dock", rect(20, -8, 45, -5), false});
    s.push_back({"east_wall", rect(60, -25, 64, 25), true});
    s.push_back({"ne_shore", rect(30, 18, 50, 22), true});
    s.push_back({"breakwater", rect(25, -20, 40, -17), true});
    return s;
}

ScenarioSpec harbor_base(const std::string& name) {
    ScenarioSpec spec;
    spec.name = name;
    spec.seed = 1;
    spec.duration_s = 60.0;
    spec.statics = harbor_statics();
    spec.camera = harbor_camera();
    spec.cam_from_lidar = harbor_cam_from_lidar();
    spec.grid = harbor_grid();
    spec.ego_waypoints = {{0.0, 0.0, 0.0, 0.0}};
    return spec;
}

ScenarioSpec make_kayak_undock() {
    ScenarioSpec spec = harbor_base("kayak_undock");
    spec.clutter_rate = 2.0;

    // Kayak moored 0.8 m off the dock's north edge, drifting out slowly
    // before paddling into the canal.
    TargetScript kayak;
    kayak.name = "kayak";
    kayak.shape = hull(3.2, 0.7);
    kayak.waypoints = {{0.0, 28.0, -3.85}, {20.0, 31.0, -2.6}, {45.0, 45.0, 4.0},
                       {60.0, 54.0, 8.0}};
    spec.targets.push_back(kayak);

    // Day cruiser running north across the ego-kayak line of sight,
    // occluding the kayak for roughly two seconds around t = 23 s.
    TargetScript cruiser;
    cruiser.name = "day_cruiser";
    cruiser.shape = hull(6.0, 2.2);
    cruiser.waypoints = {{8.0, 18.0, -40.0}, {40.0, 14.0, 40.0}};
    spec.targets.push_back(cruiser);
    return spec;
}

ScenarioSpec make_docked_boats_mapping() {
    ScenarioSpec spec = harbor_base("docked_boats_mapping");
    spec.clutter_rate = 1.0;
    // Three leisure boats moored 1.5 m off the dock. Static the whole
    // sequence, still vessels: the map must not contain them.
    spec.docked_vessels.push_back(rect(21.5, -3.5, 26.5, -1.5));
    spec.docked_vessels.push_back(rect(29.5, -3.5, 34.5, -1.5));
    spec.docked_vessels.push_back(rect(37.5, -3.5, 42.5, -1.5));
    return spec;
}

ScenarioSpec make_multi_pass() {
    ScenarioSpec spec = harbor_base("multi_pass");
    spec.clutter_rate = 2.0;

    TargetScript a;
    a.name = "cruiser_a";
    a.shape = hull(6.0, 2.2);
    a.waypoints = {{0.0, 70.0, -30.0}, {60.0, 30.0, 35.0}};
    spec.targets.push_back(a);

    TargetScript b;
    b.name = "runabout_b";
    b.shape = hull(4.0, 1.5);
    b.waypoints = {{0.0, 50.0, 32.0}, {60.0, 28.0, -28.0}};
    spec.targets.push_back(b);
    return spec;
}

ScenarioSpec make_maneuver() {
    ScenarioSpec spec = harbor_base("maneuver");
    spec.clutter_rate = 2.0;

    // Sharp turn at t = 25 s; the heading flips by ~120 degrees, which a
    // constant-velocity model tracks poorly on purpose.
    TargetScript boat;
    boat.name = "maneuvering_boat";
    boat.shape = hull(5.0, 2.0);
    boat.waypoints = {{0.0, 72.0, -20.0}, {25.0, 52.0, -2.0}, {50.0, 68.0, 2.0}};
    spec.targets.push_back(boat);
    return spec;
}

}  // namespace

std::vector<ScenarioSpec> builtin_scenarios() {
    return {make_kayak_undock(), make_docked_boats_mapping(), make_multi_pass(),
            make_maneuver()};
}

ScenarioSpec builtin_scenario(const std::string& name) {
    for (ScenarioSpec& s : builtin_scenarios()) {
        if (s.name == name) {
            return s;
        }
    }
    throw ConfigError("unknown scenario '" + name + "'");
}

}  // namespace nearshore
