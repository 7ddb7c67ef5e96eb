#include "nearshore/kernels.hpp"

#include <cmath>
#include <cstddef>

namespace nearshore {
namespace kernels {

namespace {

void check_batch_frame(const std::vector<Point3>& pts, const RigidTransform& tf) {
    // Points in one batch share a frame; checking the first is enough.
    if (!pts.empty() && pts.front().frame != tf.source()) {
        throw ConfigError(std::string("batch transform frame mismatch: points in '") +
                          frame_name(pts.front().frame) + "', transform maps from '" +
                          frame_name(tf.source()) + "'");
    }
}

inline Point3 apply_tf(const Point3& p, const Eigen::Matrix3d& r, const Eigen::Vector3d& t,
                       Frame target) {
    const Eigen::Vector3d v = r * p.vec() + t;
    return Point3{v.x(), v.y(), v.z(), target};
}

inline LabeledPoint classify_one(const Point3& p, const std::vector<CameraView>& cameras,
                                 const std::vector<const MaskFrame*>& masks,
                                 const Eigen::Matrix3d& rw, const Eigen::Vector3d& tw) {
    LabeledPoint out;
    const Eigen::Vector3d w = rw * p.vec() + tw;
    out.wx = w.x();
    out.wy = w.y();
    out.label = PointLabel::Unknown;
    for (std::size_t c = 0; c < cameras.size(); ++c) {
        const CameraView& cam = cameras[c];
        const Eigen::Vector3d pc =
            cam.cam_from_lidar.rotation() * p.vec() + cam.cam_from_lidar.translation();
        if (!(pc.z() > 0.0)) {
            continue;
        }
        const PixelCoord px{cam.intrinsics.fx * pc.x() / pc.z() + cam.intrinsics.cx,
                            cam.intrinsics.fy * pc.y() / pc.z() + cam.intrinsics.cy};
        if (!in_image(px, cam.intrinsics)) {
            continue;
        }
        if (masks[c] == nullptr) {
            continue;  // camera dropout: no image evidence, stays Unknown
        }
        const int ix = static_cast<int>(std::lround(px.x));
        const int iy = static_cast<int>(std::lround(px.y));
        if (masks[c]->any_instance_contains(ix, iy)) {
            out.label = PointLabel::Vessel;
            return out;
        }
        out.label = PointLabel::Candidate;
    }
    return out;
}

inline bool keep_point(const Point3& p, const Eigen::Matrix3d& rw, const Eigen::Vector3d& tw,
                       const BinaryMap* map, Vec2& out) {
    const Eigen::Vector3d w = rw * p.vec() + tw;
    out.x = w.x();
    out.y = w.y();
    if (map == nullptr) {
        return true;
    }
    const auto cell = world_to_cell(out.x, out.y, map->spec);
    if (!cell) {
        return false;
    }
    return !map->at(cell->col, cell->row);
}

inline bool cell_is_land(double cx, double cy, const EncPolygonSet& enc) {
    for (const EncPolygon& poly : enc.polygons) {
        if (point_in_polygon(cx, cy, poly)) {
            return true;
        }
    }
    return false;
}

// Nearest intersection along o + t*d, t in (0, max_range]. Ties between
// polygons resolve to the lower polygon index.
inline RayHit ray_hit(const std::vector<WorldPolygon>& polys, double ox, double oy, double dx,
                      double dy, double max_range) {
    RayHit best;
    best.range = max_range;
    for (const WorldPolygon& poly : polys) {
        const std::size_t n = poly.verts.size();
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const Vec2& a = poly.verts[j];
            const Vec2& b = poly.verts[i];
            const double ex = b.x - a.x;
            const double ey = b.y - a.y;
            const double denom = dx * ey - dy * ex;
            if (denom == 0.0) {
                continue;  // parallel
            }
            const double wx = a.x - ox;
            const double wy = a.y - oy;
            const double t = (wx * ey - wy * ex) / denom;
            const double s = (wx * dy - wy * dx) / denom;
            if (t > 1e-9 && t <= best.range && s >= 0.0 && s < 1.0) {
                if (!best.hit || t < best.range) {
                    best.hit = true;
                    best.range = t;
                    best.polygon_id = poly.id;
                    best.vessel_class = poly.vessel_class;
                }
            }
        }
    }
    if (!best.hit) {
        best.range = 0.0;
    }
    return best;
}

}  // namespace

std::vector<Point3> transform_points(const std::vector<Point3>& pts, const RigidTransform& tf) {
    check_batch_frame(pts, tf);
    std::vector<Point3> out(pts.size());
    const Eigen::Matrix3d r = tf.rotation();
    const Eigen::Vector3d t = tf.translation();
    const Frame target = tf.target();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(pts.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = apply_tf(pts[i], r, t, target);
    }
    return out;
}

std::vector<LabeledPoint> classify_points(const std::vector<Point3>& lidar_pts,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar) {
    check_batch_frame(lidar_pts, world_from_lidar);
    if (masks.size() != cameras.size()) {
        throw ConfigError("classify_points: one mask slot per camera required");
    }
    std::vector<LabeledPoint> out(lidar_pts.size());
    const Eigen::Matrix3d rw = world_from_lidar.rotation();
    const Eigen::Vector3d tw = world_from_lidar.translation();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lidar_pts.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[i] = classify_one(lidar_pts[i], cameras, masks, rw, tw);
    }
    return out;
}

std::vector<Vec2> filter_points_by_map(const std::vector<Point3>& lidar_pts,
                                       const RigidTransform& world_from_lidar,
                                       const BinaryMap* map) {
    check_batch_frame(lidar_pts, world_from_lidar);
    const Eigen::Matrix3d rw = world_from_lidar.rotation();
    const Eigen::Vector3d tw = world_from_lidar.translation();
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(lidar_pts.size());
    std::vector<Vec2> coords(lidar_pts.size());
    std::vector<std::uint8_t> keep(lidar_pts.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        keep[i] = keep_point(lidar_pts[i], rw, tw, map, coords[i]) ? 1 : 0;
    }
    std::vector<Vec2> out;
    out.reserve(lidar_pts.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        if (keep[i]) {
            out.push_back(coords[i]);
        }
    }
    return out;
}

// Separable square dilation/erosion: horizontal pass then vertical pass.
BinaryMap dilate(const BinaryMap& m, int radius) {
    if (radius <= 0) {
        return m;
    }
    const int cols = m.spec.n_cols;
    const int rows = m.spec.n_rows;
    BinaryMap pass1(m.spec);
    BinaryMap out(m.spec);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint8_t v = 0;
            const int lo = std::max(0, c - radius);
            const int hi = std::min(cols - 1, c + radius);
            for (int cc = lo; cc <= hi && !v; ++cc) {
                v = m.cells[m.spec.index(cc, r)];
            }
            pass1.cells[m.spec.index(c, r)] = v;
        }
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint8_t v = 0;
            const int lo = std::max(0, r - radius);
            const int hi = std::min(rows - 1, r + radius);
            for (int rr = lo; rr <= hi && !v; ++rr) {
                v = pass1.cells[m.spec.index(c, rr)];
            }
            out.cells[m.spec.index(c, r)] = v;
        }
    }
    return out;
}

BinaryMap erode(const BinaryMap& m, int radius) {
    if (radius <= 0) {
        return m;
    }
    const int cols = m.spec.n_cols;
    const int rows = m.spec.n_rows;
    BinaryMap pass1(m.spec);
    BinaryMap out(m.spec);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint8_t v = 1;
            const int lo = std::max(0, c - radius);
            const int hi = std::min(cols - 1, c + radius);
            for (int cc = lo; cc <= hi && v; ++cc) {
                v = m.cells[m.spec.index(cc, r)];
            }
            pass1.cells[m.spec.index(c, r)] = v;
        }
    }
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            std::uint8_t v = 1;
            const int lo = std::max(0, r - radius);
            const int hi = std::min(rows - 1, r + radius);
            for (int rr = lo; rr <= hi && v; ++rr) {
                v = pass1.cells[m.spec.index(c, rr)];
            }
            out.cells[m.spec.index(c, r)] = v;
        }
    }
    return out;
}

BinaryMap rasterize_polygons(const EncPolygonSet& enc, const GridSpec& g) {
    BinaryMap out(g);
#pragma omp parallel for schedule(static)
    for (int r = 0; r < g.n_rows; ++r) {
        const double cy = g.center_y(r);
        for (int c = 0; c < g.n_cols; ++c) {
            out.cells[g.index(c, r)] = cell_is_land(g.center_x(c), cy, enc) ? 1 : 0;
        }
    }
    return out;
}

std::vector<RayHit> cast_rays(const std::vector<WorldPolygon>& polys, Vec2 origin, double yaw,
                              int n_rays, double angle0, double angle_step, double max_range) {
    std::vector<RayHit> out(static_cast<std::size_t>(n_rays));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_rays; ++i) {
        const double a = yaw + angle0 + i * angle_step;
        out[i] = ray_hit(polys, origin.x, origin.y, std::cos(a), std::sin(a), max_range);
    }
    return out;
}

RayHit cast_single_ray(const std::vector<WorldPolygon>& polys, Vec2 origin, double angle,
                       double max_range) {
    return ray_hit(polys, origin.x, origin.y, std::cos(angle), std::sin(angle), max_range);
}

namespace serial {

std::vector<Point3> transform_points(const std::vector<Point3>& pts, const RigidTransform& tf) {
    check_batch_frame(pts, tf);
    std::vector<Point3> out;
    out.reserve(pts.size());
    for (const Point3& p : pts) {
        out.push_back(apply_tf(p, tf.rotation(), tf.translation(), tf.target()));
    }
    return out;
}

std::vector<LabeledPoint> classify_points(const std::vector<Point3>& lidar_pts,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar) {
    check_batch_frame(lidar_pts, world_from_lidar);
    if (masks.size() != cameras.size()) {
        throw ConfigError("classify_points: one mask slot per camera required");
    }
    std::vector<LabeledPoint> out;
    out.reserve(lidar_pts.size());
    for (const Point3& p : lidar_pts) {
        out.push_back(classify_one(p, cameras, masks, world_from_lidar.rotation(),
                                   world_from_lidar.translation()));
    }
    return out;
}

std::vector<Vec2> filter_points_by_map(const std::vector<Point3>& lidar_pts,
                                       const RigidTransform& world_from_lidar,
                                       const BinaryMap* map) {
    check_batch_frame(lidar_pts, world_from_lidar);
    std::vector<Vec2> out;
    out.reserve(lidar_pts.size());
    for (const Point3& p : lidar_pts) {
        Vec2 w;
        if (keep_point(p, world_from_lidar.rotation(), world_from_lidar.translation(), map, w)) {
            out.push_back(w);
        }
    }
    return out;
}

// Direct neighborhood scans; the reference the separable versions are
// checked against.
BinaryMap dilate(const BinaryMap& m, int radius) {
    if (radius <= 0) {
        return m;
    }
    BinaryMap out(m.spec);
    for (int r = 0; r < m.spec.n_rows; ++r) {
        for (int c = 0; c < m.spec.n_cols; ++c) {
            std::uint8_t v = 0;
            for (int rr = std::max(0, r - radius); rr <= std::min(m.spec.n_rows - 1, r + radius) && !v; ++rr) {
                for (int cc = std::max(0, c - radius); cc <= std::min(m.spec.n_cols - 1, c + radius) && !v; ++cc) {
                    v = m.cells[m.spec.index(cc, rr)];
                }
            }
            out.cells[m.spec.index(c, r)] = v;
        }
    }
    return out;
}

BinaryMap erode(const BinaryMap& m, int radius) {
    if (radius <= 0) {
        return m;
    }
    BinaryMap out(m.spec);
    for (int r = 0; r < m.spec.n_rows; ++r) {
        for (int c = 0; c < m.spec.n_cols; ++c) {
            std::uint8_t v = 1;
            for (int rr = std::max(0, r - radius); rr <= std::min(m.spec.n_rows - 1, r + radius) && v; ++rr) {
                for (int cc = std::max(0, c - radius); cc <= std::min(m.spec.n_cols - 1, c + radius) && v; ++cc) {
                    v = m.cells[m.spec.index(cc, rr)];
                }
            }
            out.cells[m.spec.index(c, r)] = v;
        }
    }
    return out;
}

BinaryMap rasterize_polygons(const EncPolygonSet& enc, const GridSpec& g) {
    BinaryMap out(g);
    for (int r = 0; r < g.n_rows; ++r) {
        for (int c = 0; c < g.n_cols; ++c) {
            out.cells[g.index(c, r)] = cell_is_land(g.center_x(c), g.center_y(r), enc) ? 1 : 0;
        }
    }
    return out;
}

std::vector<RayHit> cast_rays(const std::vector<WorldPolygon>& polys, Vec2 origin, double yaw,
                              int n_rays, double angle0, double angle_step, double max_range) {
    std::vector<RayHit> out;
    out.reserve(static_cast<std::size_t>(n_rays));
    for (int i = 0; i < n_rays; ++i) {
        const double a = yaw + angle0 + i * angle_step;
        out.push_back(ray_hit(polys, origin.x, origin.y, std::cos(a), std::sin(a), max_range));
    }
    return out;
}

}  // namespace serial

}  // namespace kernels
}  // namespace nearshore
