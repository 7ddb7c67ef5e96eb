#pragma once

#include "nearshore/enc.hpp"
#include "nearshore/grid.hpp"
#include "nearshore/kernels.hpp"
#include "nearshore/masks.hpp"
#include "nearshore/sequence.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nearshore {

struct Waypoint {
    double t = 0.0;  // seconds from scenario start
    double x = 0.0;
    double y = 0.0;
};

struct EgoWaypoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;  // radians, world frame
};

struct StaticStructure {
    std::string name;
    Ring ring;
    bool in_enc = false;  // part of the chart handed to enc-only runs
};

struct TargetScript {
    std::string name;
    Ring shape;  // local frame, usually centered at the origin
    std::vector<Waypoint> waypoints;
    bool vessel_class = true;
};

/// Spurious-mask injection. When per-frame anchor pixels are provided the
/// patch lands on one of them (the simulator anchors on projected static
/// structure); otherwise placement is uniform over the image.
struct FalsePositiveSpec {
    double rate_per_frame = 0.0;  // probability of one spurious instance
    int patch_width = 60;
    int patch_height = 40;
    std::vector<std::vector<PixelCoord>> anchors;  // optional, per mask frame
};

struct ScenarioSpec {
    std::string name = "custom";
    std::uint64_t seed = 1;
    double duration_s = 60.0;
    double lidar_rate_hz = 10.0;
    double mask_rate_hz = 10.0;
    double mask_time_offset_s = 0.02;

    std::vector<StaticStructure> statics;
    std::vector<Ring> docked_vessels;  // static geometry, vessel class
    std::vector<TargetScript> targets;

    double clutter_rate = 1.0;  // expected false returns per frame (Poisson)
    double lidar_angular_res_deg = 0.5;
    double lidar_max_range_m = 120.0;
    double range_noise_std_m = 0.03;
    double point_height_min_m = 0.2;
    double point_height_max_m = 1.4;
    double clutter_height_max_m = 0.3;

    CameraIntrinsics camera;
    RigidTransform cam_from_lidar;
    std::vector<EgoWaypoint> ego_waypoints;

    GridSpec grid;
    Timestamp start_time_us = 1700000000000000;

    // Mask degradation applied after generation.
    double mask_false_negative_rate = 0.0;
    double mask_false_positive_per_frame = 0.0;
    int fp_patch_width = 60;
    int fp_patch_height = 40;

    // Window used for the provenance coverage/footprint rasters; mirrors the
    // mapper defaults so the rasters describe what an ideal mapper with the
    // same settings could see.
    int coverage_window_frames = 50;
    double coverage_min_fraction = 0.40;
    double coverage_max_range_m = 100.0;

    void validate() const;
};

struct TruthSample {
    Timestamp t = 0;
    int target_id = 0;
    double x = 0.0;
    double y = 0.0;
};

struct GroundTruth {
    std::vector<TruthSample> samples;
    BinaryMap truth_map;         // static polygons rasterized on the grid
    BinaryMap docked_footprint;  // docked-vessel cells an ideal mapper would see
    BinaryMap coverage;          // static cells an ideal mapper would see
};

struct SimResult {
    SequenceBundle bundle;
    GroundTruth truth;
    EncPolygonSet enc;  // the chart subset (statics with in_enc set)
    std::size_t clutter_points = 0;
};

/// 2D ray-casting LiDAR with oracle masks derived from ray provenance.
/// Deterministic given spec.seed.
SimResult generate(const ScenarioSpec& spec);

/// Drop instances at the false-negative rate and inject spurious instances
/// per fp. Deterministic given seed.
std::vector<MaskFrame> degrade_masks(const std::vector<MaskFrame>& masks,
                                     double false_negative_rate, const FalsePositiveSpec& fp,
                                     std::uint64_t seed);

std::vector<ScenarioSpec> builtin_scenarios();

/// Lookup by name; throws ConfigError for unknown names.
ScenarioSpec builtin_scenario(const std::string& name);

}  // namespace nearshore
