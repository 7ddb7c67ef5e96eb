#include "nearshore/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace nearshore {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }

struct Pose2 {
    double x = 0.0;
    double y = 0.0;
    double yaw = 0.0;
};

double lerp_angle(double a, double b, double alpha) {
    double d = std::fmod(b - a, 2.0 * kPi);
    if (d > kPi) d -= 2.0 * kPi;
    if (d < -kPi) d += 2.0 * kPi;
    return a + alpha * d;
}

Pose2 ego_pose_at(const std::vector<EgoWaypoint>& wps, double t) {
    if (wps.empty()) {
        return {};
    }
    if (t <= wps.front().t) {
        return {wps.front().x, wps.front().y, wps.front().yaw};
    }
    if (t >= wps.back().t) {
        return {wps.back().x, wps.back().y, wps.back().yaw};
    }
    for (std::size_t i = 1; i < wps.size(); ++i) {
        if (t <= wps[i].t) {
            const EgoWaypoint& a = wps[i - 1];
            const EgoWaypoint& b = wps[i];
            const double alpha = (t - a.t) / (b.t - a.t);
            return {a.x + alpha * (b.x - a.x), a.y + alpha * (b.y - a.y),
                    lerp_angle(a.yaw, b.yaw, alpha)};
        }
    }
    return {wps.back().x, wps.back().y, wps.back().yaw};
}

struct TargetPose {
    double x = 0.0;
    double y = 0.0;
    double heading = 0.0;
};

TargetPose target_pose_at(const TargetScript& script, double t) {
    const auto& wps = script.waypoints;
    TargetPose out;
    if (wps.empty()) {
        return out;
    }
    // Heading follows the active segment; stationary segments keep the
    // previous heading.
    auto segment_heading = [&](std::size_t seg, double fallback) {
        const double dx = wps[seg + 1].x - wps[seg].x;
        const double dy = wps[seg + 1].y - wps[seg].y;
        if (dx == 0.0 && dy == 0.0) {
            return fallback;
        }
        return std::atan2(dy, dx);
    };
    double heading = 0.0;
    for (std::size_t s = 0; s + 1 < wps.size(); ++s) {
        heading = segment_heading(s, heading);
        if (s == 0) break;
    }
    if (t <= wps.front().t) {
        out.x = wps.front().x;
        out.y = wps.front().y;
        out.heading = heading;
        return out;
    }
    double prev_heading = heading;
    for (std::size_t s = 0; s + 1 < wps.size(); ++s) {
        const double h = segment_heading(s, prev_heading);
        if (t <= wps[s + 1].t) {
            const double alpha = (t - wps[s].t) / (wps[s + 1].t - wps[s].t);
            out.x = wps[s].x + alpha * (wps[s + 1].x - wps[s].x);
            out.y = wps[s].y + alpha * (wps[s + 1].y - wps[s].y);
            out.heading = h;
            return out;
        }
        prev_heading = h;
    }
    out.x = wps.back().x;
    out.y = wps.back().y;
    out.heading = prev_heading;
    return out;
}

Ring place_ring(const Ring& local, double x, double y, double heading) {
    const double c = std::cos(heading);
    const double s = std::sin(heading);
    Ring out;
    out.reserve(local.size());
    for (const Vec2& v : local) {
        out.push_back(Vec2{x + c * v.x - s * v.y, y + s * v.x + c * v.y});
    }
    return out;
}

Vec2 ring_centroid(const Ring& ring) {
    double a = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const double cross = ring[j].x * ring[i].y - ring[i].x * ring[j].y;
        a += cross;
        cx += (ring[j].x + ring[i].x) * cross;
        cy += (ring[j].y + ring[i].y) * cross;
    }
    if (a == 0.0) {
        return ring.front();
    }
    return Vec2{cx / (3.0 * a), cy / (3.0 * a)};
}

RigidTransform pose2_to_transform(const Pose2& p) {
    Eigen::Matrix3d r;
    const double c = std::cos(p.yaw);
    const double s = std::sin(p.yaw);
    r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
    return RigidTransform(r, Eigen::Vector3d(p.x, p.y, 0.0), Frame::Lidar, Frame::World);
}

}  // namespace

void ScenarioSpec::validate() const {
    if (!(duration_s > 0.0) || !(lidar_rate_hz > 0.0) || !(mask_rate_hz > 0.0)) {
        throw ConfigError("scenario duration and rates must be positive");
    }
    if (!(lidar_angular_res_deg > 0.0) || !(lidar_max_range_m > 0.0)) {
        throw ConfigError("lidar angular resolution and max range must be positive");
    }
    if (range_noise_std_m < 0.0 || clutter_rate < 0.0) {
        throw ConfigError("noise and clutter rates must be non-negative");
    }
    if (ego_waypoints.empty()) {
        throw ConfigError("scenario needs at least one ego waypoint");
    }
    if (mask_false_negative_rate < 0.0 || mask_false_negative_rate > 1.0 ||
        mask_false_positive_per_frame < 0.0 || mask_false_positive_per_frame > 1.0) {
        throw ConfigError("mask degradation rates must lie in [0, 1]");
    }
    camera.validate();
    grid.validate();
}

SimResult generate(const ScenarioSpec& spec) {
    spec.validate();
    SimResult result;
    result.bundle.grid = spec.grid;

    // Obstacle ids: statics, then docked vessels, then moving targets.
    std::vector<WorldPolygon> fixed;
    const int n_statics = static_cast<int>(spec.statics.size());
    const int n_docked = static_cast<int>(spec.docked_vessels.size());
    for (int i = 0; i < n_statics; ++i) {
        fixed.push_back(WorldPolygon{spec.statics[static_cast<std::size_t>(i)].ring, i, false});
    }
    for (int i = 0; i < n_docked; ++i) {
        fixed.push_back(WorldPolygon{spec.docked_vessels[static_cast<std::size_t>(i)],
                                     n_statics + i, true});
    }

    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> range_noise(0.0, spec.range_noise_std_m);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> height(spec.point_height_min_m,
                                                  spec.point_height_max_m);

    const int n_frames = static_cast<int>(std::llround(spec.duration_s * spec.lidar_rate_hz));
    const int n_rays = static_cast<int>(std::llround(360.0 / spec.lidar_angular_res_deg));
    const double angle_step = deg2rad(spec.lidar_angular_res_deg);
    const double angle0 = -kPi;
    const int mask_subsample = std::max(
        1, static_cast<int>(std::llround(spec.lidar_rate_hz / spec.mask_rate_hz)));

    std::vector<CameraView> cameras(1);
    cameras[0].name = "cam0";
    cameras[0].intrinsics = spec.camera;
    cameras[0].cam_from_lidar = spec.cam_from_lidar;
    result.bundle.cameras = cameras;
    result.bundle.masks_per_camera.resize(1);

    // Poses at 100 Hz with margin so frame times never need extrapolation.
    {
        const double pose_rate = 100.0;
        const double t_begin = -0.1;
        const double t_end = spec.duration_s + 0.1;
        const int n_poses = static_cast<int>((t_end - t_begin) * pose_rate) + 1;
        for (int i = 0; i < n_poses; ++i) {
            const double t = t_begin + i / pose_rate;
            PoseSample s;
            s.t = spec.start_time_us + to_timestamp_us(t);
            s.world_from_lidar = pose2_to_transform(ego_pose_at(spec.ego_waypoints, t));
            result.bundle.poses.push_back(s);
        }
    }

    // Aggregated per-cell noiseless hit counts over the trailing
    // coverage window.
    const std::size_t n_cells = spec.grid.n_cells();
    std::vector<int> static_window_counts(n_cells, 0);
    std::vector<int> docked_window_counts(n_cells, 0);
    std::deque<std::vector<std::pair<std::uint32_t, bool>>> window_hits;  // (cell, docked?)

    FalsePositiveSpec fp;
    fp.rate_per_frame = spec.mask_false_positive_per_frame;
    fp.patch_width = spec.fp_patch_width;
    fp.patch_height = spec.fp_patch_height;

    std::vector<MaskFrame> clean_masks;

    for (int fi = 0; fi < n_frames; ++fi) {
        const double t_rel = fi / spec.lidar_rate_hz;
        const Timestamp t_us = spec.start_time_us + to_timestamp_us(t_rel);
        const Pose2 ego = ego_pose_at(spec.ego_waypoints, t_rel);

        std::vector<WorldPolygon> polys = fixed;
        for (std::size_t k = 0; k < spec.targets.size(); ++k) {
            const TargetScript& script = spec.targets[k];
            const TargetPose tp = target_pose_at(script, t_rel);
            polys.push_back(WorldPolygon{place_ring(script.shape, tp.x, tp.y, tp.heading),
                                         n_statics + n_docked + static_cast<int>(k),
                                         script.vessel_class});
            result.truth.samples.push_back(TruthSample{
                t_us, static_cast<int>(k),
                ring_centroid(place_ring(script.shape, tp.x, tp.y, tp.heading)).x,
                ring_centroid(place_ring(script.shape, tp.x, tp.y, tp.heading)).y});
        }

        const std::vector<RayHit> hits = kernels::cast_rays(
            polys, Vec2{ego.x, ego.y}, ego.yaw, n_rays, angle0, angle_step,
            spec.lidar_max_range_m);

        LidarFrame frame;
        frame.t = t_us;
        const bool emit_mask = (fi % mask_subsample) == 0;
        MaskFrame mask;
        mask.t = t_us + to_timestamp_us(spec.mask_time_offset_s);
        mask.width = spec.camera.width;
        mask.height = spec.camera.height;
        // One instance slot per vessel-class obstacle present this frame.
        std::vector<int> instance_of_poly(polys.size(), -1);
        std::vector<PixelCoord> static_pixels;

        std::vector<std::pair<std::uint32_t, bool>> frame_hits;

        // Returns in ray order; the per-ray noise draws are serial so the
        // output is independent of how cast_rays was scheduled.
        for (int ri = 0; ri < n_rays; ++ri) {
            if (!hits[static_cast<std::size_t>(ri)].hit) {
                continue;
            }
            const RayHit& h = hits[static_cast<std::size_t>(ri)];
            const double theta = angle0 + ri * angle_step;  // sensor frame
            const double noisy_r = h.range + range_noise(rng);
            if (noisy_r <= 0.0) {
                continue;
            }
            Point3 p;
            p.x = noisy_r * std::cos(theta);
            p.y = noisy_r * std::sin(theta);
            p.z = height(rng);
            p.frame = Frame::Lidar;
            frame.points.push_back(p);

            // Noiseless provenance for the truth rasters.
            const double wx = ego.x + h.range * std::cos(ego.yaw + theta);
            const double wy = ego.y + h.range * std::sin(ego.yaw + theta);
            if (const auto cell = world_to_cell(wx, wy, spec.grid)) {
                const double dx = spec.grid.center_x(cell->col) - ego.x;
                const double dy = spec.grid.center_y(cell->row) - ego.y;
                if (dx * dx + dy * dy <=
                    spec.coverage_max_range_m * spec.coverage_max_range_m) {
                    frame_hits.emplace_back(
                        static_cast<std::uint32_t>(spec.grid.index(cell->col, cell->row)),
                        h.vessel_class);
                }
            }

            // Oracle mask: the projected pixel of the emitted (noisy) point.
            if (emit_mask) {
                const Eigen::Vector3d pc = spec.cam_from_lidar.rotation() * p.vec() +
                                           spec.cam_from_lidar.translation();
                if (pc.z() > 0.0) {
                    const PixelCoord px{
                        spec.camera.fx * pc.x() / pc.z() + spec.camera.cx,
                        spec.camera.fy * pc.y() / pc.z() + spec.camera.cy};
                    if (in_image(px, spec.camera)) {
                        const int ix = static_cast<int>(std::lround(px.x));
                        const int iy = static_cast<int>(std::lround(px.y));
                        if (h.vessel_class) {
                            // Map polygon id to a mask instance.
                            int poly_idx = -1;
                            for (std::size_t q = 0; q < polys.size(); ++q) {
                                if (polys[q].id == h.polygon_id) {
                                    poly_idx = static_cast<int>(q);
                                    break;
                                }
                            }
                            if (instance_of_poly[static_cast<std::size_t>(poly_idx)] < 0) {
                                instance_of_poly[static_cast<std::size_t>(poly_idx)] =
                                    static_cast<int>(mask.instances.size());
                                mask.instances.emplace_back();
                            }
                            mask.instances[static_cast<std::size_t>(
                                               instance_of_poly[static_cast<std::size_t>(
                                                   poly_idx)])]
                                .add_pixel(ix, iy);
                        } else {
                            static_pixels.push_back(px);
                        }
                    }
                }
            }
        }

        // Clutter: uniform over water in the disk, rejected past the first
        // obstacle along its bearing (the sensor cannot see behind walls).
        std::poisson_distribution<int> n_clutter(spec.clutter_rate);
        const int k_clutter = spec.clutter_rate > 0.0 ? n_clutter(rng) : 0;
        for (int ci = 0; ci < k_clutter; ++ci) {
            for (int attempt = 0; attempt < 50; ++attempt) {
                const double theta = -kPi + 2.0 * kPi * unit(rng);
                const double r = spec.lidar_max_range_m * std::sqrt(unit(rng));
                const RayHit first = kernels::cast_single_ray(polys, Vec2{ego.x, ego.y},
                                                              ego.yaw + theta,
                                                              spec.lidar_max_range_m);
                if (first.hit && r >= first.range) {
                    continue;
                }
                Point3 p;
                p.x = r * std::cos(theta);
                p.y = r * std::sin(theta);
                p.z = 0.05 + (spec.clutter_height_max_m - 0.05) * unit(rng);
                p.frame = Frame::Lidar;
                frame.points.push_back(p);
                ++result.clutter_points;
                break;
            }
        }

        for (auto& inst : mask.instances) {
            inst.normalize();
        }
        if (emit_mask) {
            clean_masks.push_back(std::move(mask));
            fp.anchors.push_back(std::move(static_pixels));
        }

        result.bundle.frames.push_back(std::move(frame));

        // Trailing-window provenance counts.
        for (const auto& [cell, docked] : frame_hits) {
            (docked ? docked_window_counts : static_window_counts)[cell] += 1;
        }
        window_hits.push_back(std::move(frame_hits));
        while (static_cast<int>(window_hits.size()) > spec.coverage_window_frames) {
            for (const auto& [cell, docked] : window_hits.front()) {
                (docked ? docked_window_counts : static_window_counts)[cell] -= 1;
            }
            window_hits.pop_front();
        }
    }

    // Masks, possibly degraded.
    if (spec.mask_false_negative_rate > 0.0 || spec.mask_false_positive_per_frame > 0.0) {
        result.bundle.masks_per_camera[0] =
            degrade_masks(clean_masks, spec.mask_false_negative_rate, fp, spec.seed + 1);
    } else {
        result.bundle.masks_per_camera[0] = std::move(clean_masks);
    }

    // Truth rasters.
    EncPolygonSet all_statics;
    for (const StaticStructure& s : spec.statics) {
        all_statics.polygons.push_back(EncPolygon{s.ring, {}});
    }
    result.truth.truth_map = rasterize_enc(all_statics, spec.grid);

    const int threshold = static_cast<int>(
        std::ceil(spec.coverage_min_fraction * spec.coverage_window_frames - 1e-9));
    result.truth.coverage = BinaryMap(spec.grid);
    result.truth.docked_footprint = BinaryMap(spec.grid);
    for (std::size_t i = 0; i < n_cells; ++i) {
        result.truth.coverage.cells[i] = static_window_counts[i] >= threshold ? 1 : 0;
        result.truth.docked_footprint.cells[i] = docked_window_counts[i] >= threshold ? 1 : 0;
    }

    for (const StaticStructure& s : spec.statics) {
        if (s.in_enc) {
            result.enc.polygons.push_back(EncPolygon{s.ring, {}});
        }
    }
    return result;
}

std::vector<MaskFrame> degrade_masks(const std::vector<MaskFrame>& masks,
                                     double false_negative_rate, const FalsePositiveSpec& fp,
                                     std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<MaskFrame> out;
    out.reserve(masks.size());
    for (std::size_t fi = 0; fi < masks.size(); ++fi) {
        const MaskFrame& src = masks[fi];
        MaskFrame dst;
        dst.t = src.t;
        dst.width = src.width;
        dst.height = src.height;
        for (const InstanceMask& inst : src.instances) {
            if (unit(rng) < false_negative_rate) {
                continue;
            }
            dst.instances.push_back(inst);
        }
        if (fp.rate_per_frame > 0.0 && unit(rng) < fp.rate_per_frame) {
            PixelCoord anchor{src.width / 2.0, src.height / 2.0};
            if (fi < fp.anchors.size() && !fp.anchors[fi].empty()) {
                std::uniform_int_distribution<std::size_t> pick(0, fp.anchors[fi].size() - 1);
                anchor = fp.anchors[fi][pick(rng)];
            } else {
                anchor.x = unit(rng) * src.width;
                anchor.y = unit(rng) * src.height;
            }
            const int x0 = std::max(0, static_cast<int>(std::lround(anchor.x)) -
                                           fp.patch_width / 2);
            const int y0 = std::max(0, static_cast<int>(std::lround(anchor.y)) -
                                           fp.patch_height / 2);
            const int x1 = std::min(src.width, x0 + fp.patch_width);
            const int y1 = std::min(src.height, y0 + fp.patch_height);
            if (x1 > x0 && y1 > y0) {
                InstanceMask patch;
                for (int y = y0; y < y1; ++y) {
                    patch.rows.push_back(MaskRow{y, {PixelSpan{x0, x1}}});
                }
                dst.instances.push_back(std::move(patch));
            }
        }
        out.push_back(std::move(dst));
    }
    return out;
}

}  // namespace nearshore
