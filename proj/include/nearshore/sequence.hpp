#pragma once

#include "nearshore/geometry.hpp"
#include "nearshore/grid.hpp"
#include "nearshore/masks.hpp"

#include <string>
#include <vector>

namespace nearshore {

struct LidarFrame {
    Timestamp t = 0;
    std::vector<Point3> points;  // in the LiDAR frame
};

struct CameraView {
    std::string name = "cam0";
    CameraIntrinsics intrinsics;
    RigidTransform cam_from_lidar;
};

/// Everything one mapping/tracking run consumes. Immutable once loaded.
struct SequenceBundle {
    std::vector<LidarFrame> frames;
    std::vector<PoseSample> poses;
    std::vector<CameraView> cameras;
    std::vector<std::vector<MaskFrame>> masks_per_camera;  // aligned with cameras
    GridSpec grid;
    Timestamp mask_match_tol_us = 50000;
};

}  // namespace nearshore
