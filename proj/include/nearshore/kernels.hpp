#pragma once

#include "nearshore/enc.hpp"
#include "nearshore/grid.hpp"
#include "nearshore/masks.hpp"
#include "nearshore/sequence.hpp"

#include <cstdint>
#include <vector>

// Data-parallel inner loops of the pipeline. Every kernel here has an
// OpenMP implementation (the default entry point) and a plain serial
// reference under kernels::serial. The two must produce bit-identical
// results; tests and the benchmark target compare them. All kernels write
// each output slot from exactly one iteration, so results do not depend
// on thread count or schedule.

namespace nearshore {

enum class PointLabel : std::uint8_t {
    Vessel,     // projects inside a vessel instance mask
    Candidate,  // inside some camera image, outside all masks
    Unknown     // outside every camera's field of view (or behind)
};

struct LabeledPoint {
    double wx = 0.0;  // world x, z dropped
    double wy = 0.0;
    PointLabel label = PointLabel::Unknown;
};

/// One simulator obstacle, already placed in the world frame.
struct WorldPolygon {
    Ring verts;
    int id = -1;
    bool vessel_class = false;
};

struct RayHit {
    bool hit = false;
    double range = 0.0;
    int polygon_id = -1;
    bool vessel_class = false;
};

namespace kernels {

/// Batch R*p + t; output point i corresponds to input point i.
std::vector<Point3> transform_points(const std::vector<Point3>& pts, const RigidTransform& tf);

/// Per-point label + world 2D position. masks[i] pairs with cameras[i] and
/// may be null (camera dropout: that camera contributes Unknown). Labels
/// combine across cameras with Vessel > Candidate > Unknown priority.
/// Pixel coordinates are bounds-checked real-valued, then rounded to the
/// nearest integer pixel for mask lookup.
std::vector<LabeledPoint> classify_points(const std::vector<Point3>& lidar_pts,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar);

/// Transform to world, drop z, remove points whose cell is static or out of
/// grid. A null map keeps every point (tracking without a map).
std::vector<Vec2> filter_points_by_map(const std::vector<Point3>& lidar_pts,
                                       const RigidTransform& world_from_lidar,
                                       const BinaryMap* map);

/// Square structuring element of the given radius, neighborhood clipped to
/// the grid (outside cells are ignored by both operations).
BinaryMap dilate(const BinaryMap& m, int radius);
BinaryMap erode(const BinaryMap& m, int radius);

/// Cell-center even-odd rasterization.
BinaryMap rasterize_polygons(const EncPolygonSet& enc, const GridSpec& g);

/// First-intersection ray casting. Ray i leaves `origin` at world angle
/// yaw + angle0 + i*angle_step; hits beyond max_range are discarded.
std::vector<RayHit> cast_rays(const std::vector<WorldPolygon>& polys, Vec2 origin, double yaw,
                              int n_rays, double angle0, double angle_step, double max_range);

/// Nearest intersection of one world-frame ray with the polygon set.
RayHit cast_single_ray(const std::vector<WorldPolygon>& polys, Vec2 origin, double angle,
                       double max_range);

namespace serial {

std::vector<Point3> transform_points(const std::vector<Point3>& pts, const RigidTransform& tf);
std::vector<LabeledPoint> classify_points(const std::vector<Point3>& lidar_pts,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar);
std::vector<Vec2> filter_points_by_map(const std::vector<Point3>& lidar_pts,
                                       const RigidTransform& world_from_lidar,
                                       const BinaryMap* map);
BinaryMap dilate(const BinaryMap& m, int radius);
BinaryMap erode(const BinaryMap& m, int radius);
BinaryMap rasterize_polygons(const EncPolygonSet& enc, const GridSpec& g);
std::vector<RayHit> cast_rays(const std::vector<WorldPolygon>& polys, Vec2 origin, double yaw,
                              int n_rays, double angle0, double angle_step, double max_range);

}  // namespace serial

}  // namespace kernels
}  // namespace nearshore
