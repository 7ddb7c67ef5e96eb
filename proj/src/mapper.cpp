#include "nearshore/mapper.hpp"

#include <algorithm>
#include <cmath>

namespace nearshore {

int MapperConfig::window_frames() const {
    return static_cast<int>(std::llround(window_seconds * frame_rate_hz));
}

int MapperConfig::observed_threshold() const {
    // ceil with a small slack so e.g. 0.40 * 50 lands on 20, not 21.
    const double raw = min_observed_fraction * window_frames();
    return static_cast<int>(std::ceil(raw - 1e-9));
}

void MapperConfig::validate() const {
    if (!(min_observed_fraction > 0.0) || min_observed_fraction > 1.0) {
        throw ConfigError("min_observed_fraction must be in (0, 1]");
    }
    if (dilate_radius_cells < 0 || erode_radius_cells < 0) {
        throw ConfigError("morphology radii must be non-negative");
    }
    if (!(window_seconds > 0.0) || !(frame_rate_hz > 0.0)) {
        throw ConfigError("window_seconds and frame_rate_hz must be positive");
    }
    if (!(max_range_m > 0.0)) {
        throw ConfigError("max_range_m must be positive");
    }
    if (!(cell_size_m > 0.0)) {
        throw ConfigError("cell_size_m must be positive");
    }
}

AccumulatorGrid::AccumulatorGrid(const GridSpec& spec, int window_frames)
    : spec_(spec), window_(window_frames) {
    spec_.validate();
    if (window_ < 1) {
        throw ConfigError("accumulator window must be at least 1 frame");
    }
    const std::size_t words = (spec_.n_cells() + 63) / 64;
    observed_planes_.assign(static_cast<std::size_t>(window_),
                            std::vector<std::uint64_t>(words, 0));
    vessel_planes_.assign(static_cast<std::size_t>(window_),
                          std::vector<std::uint64_t>(words, 0));
    observed_count_.assign(spec_.n_cells(), 0);
    vessel_count_.assign(spec_.n_cells(), 0);
    last_vessel_frame_.assign(spec_.n_cells(), -1);
}

bool AccumulatorGrid::test_bit(const std::vector<std::uint64_t>& plane, std::size_t i) {
    return (plane[i >> 6] >> (i & 63)) & 1u;
}

void AccumulatorGrid::set_bit(std::vector<std::uint64_t>& plane, std::size_t i) {
    plane[i >> 6] |= (std::uint64_t{1} << (i & 63));
}

void AccumulatorGrid::accumulate_frame(const std::vector<LabeledPoint>& points,
                                       Vec2 sensor_position, double max_range_m) {
    const std::size_t slot = static_cast<std::size_t>(frames_seen_ % window_);
    if (frames_seen_ >= window_) {
        // Evict the slot falling out of the window.
        auto& obs = observed_planes_[slot];
        auto& ves = vessel_planes_[slot];
        for (std::size_t w = 0; w < obs.size(); ++w) {
            std::uint64_t bits = obs[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                --observed_count_[(w << 6) + static_cast<std::size_t>(b)];
            }
            bits = ves[w];
            while (bits) {
                const int b = __builtin_ctzll(bits);
                bits &= bits - 1;
                --vessel_count_[(w << 6) + static_cast<std::size_t>(b)];
            }
            obs[w] = 0;
            ves[w] = 0;
        }
    }

    auto& obs = observed_planes_[slot];
    auto& ves = vessel_planes_[slot];
    const double max_range_sq = max_range_m * max_range_m;
    for (const LabeledPoint& p : points) {
        if (p.label == PointLabel::Unknown) {
            continue;
        }
        const auto cell = world_to_cell(p.wx, p.wy, spec_);
        if (!cell) {
            continue;
        }
        const double dx = spec_.center_x(cell->col) - sensor_position.x;
        const double dy = spec_.center_y(cell->row) - sensor_position.y;
        if (dx * dx + dy * dy > max_range_sq) {
            continue;
        }
        const std::size_t idx = spec_.index(cell->col, cell->row);
        if (!test_bit(obs, idx)) {
            set_bit(obs, idx);
            ++observed_count_[idx];
        }
        if (p.label == PointLabel::Vessel && !test_bit(ves, idx)) {
            set_bit(ves, idx);
            ++vessel_count_[idx];
            last_vessel_frame_[idx] = frames_seen_;
        }
    }
    ++frames_seen_;
}

BinaryMap AccumulatorGrid::finalize_cells(int observed_threshold) const {
    if (frames_seen_ < window_) {
        throw ConfigError("finalize_cells: window not full (" + std::to_string(frames_seen_) +
                          " of " + std::to_string(window_) + " frames accumulated)");
    }
    BinaryMap out(spec_);
    for (std::size_t i = 0; i < spec_.n_cells(); ++i) {
        out.cells[i] =
            (vessel_count_[i] == 0 && observed_count_[i] >= observed_threshold) ? 1 : 0;
    }
    return out;
}

int AccumulatorGrid::observed_count(int col, int row) const {
    return observed_count_[spec_.index(col, row)];
}

int AccumulatorGrid::vessel_count(int col, int row) const {
    return vessel_count_[spec_.index(col, row)];
}

std::int64_t AccumulatorGrid::last_vessel_frame(int col, int row) const {
    return last_vessel_frame_[spec_.index(col, row)];
}

std::vector<LabeledPoint> classify_points(const LidarFrame& frame,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar) {
    return kernels::classify_points(frame.points, cameras, masks, world_from_lidar);
}

BinaryMap post_process(const BinaryMap& m, const MapperConfig& cfg) {
    auto closing = [&](const BinaryMap& in) {
        return kernels::erode(kernels::dilate(in, cfg.dilate_radius_cells),
                              cfg.dilate_radius_cells);
    };
    auto opening = [&](const BinaryMap& in) {
        return kernels::dilate(kernels::erode(in, cfg.erode_radius_cells),
                               cfg.erode_radius_cells);
    };
    return cfg.close_then_open ? opening(closing(m)) : closing(opening(m));
}

BinaryMap merge_with_enc(const BinaryMap& lidar_map, const BinaryMap& enc_map) {
    if (!(lidar_map.spec == enc_map.spec)) {
        throw ConfigError("merge_with_enc: grid specs differ");
    }
    BinaryMap out = lidar_map;
    for (std::size_t i = 0; i < out.cells.size(); ++i) {
        out.cells[i] = (out.cells[i] | enc_map.cells[i]) ? 1 : 0;
    }
    return out;
}

BinaryMap dilate_map(const BinaryMap& m, double margin_m) {
    if (margin_m < 0.0) {
        throw ConfigError("dilate_map: margin must be non-negative");
    }
    const int radius = static_cast<int>(std::ceil(margin_m / m.spec.cell_size - 1e-12));
    return kernels::dilate(m, radius);
}

MappingResult run_mapping(const SequenceBundle& bundle, const MapperConfig& cfg,
                          const BinaryMap* enc_map, bool ignore_masks) {
    cfg.validate();
    AccumulatorGrid acc(bundle.grid, cfg.window_frames());

    for (const LidarFrame& frame : bundle.frames) {
        const RigidTransform pose = interpolate_pose(bundle.poses, frame.t);
        std::vector<LabeledPoint> labeled;
        if (ignore_masks) {
            // Naive accumulation: every point is a mapping candidate.
            labeled.resize(frame.points.size());
            const auto world = kernels::transform_points(frame.points, pose);
            for (std::size_t i = 0; i < world.size(); ++i) {
                labeled[i] = LabeledPoint{world[i].x, world[i].y, PointLabel::Candidate};
            }
        } else {
            std::vector<const MaskFrame*> masks(bundle.cameras.size(), nullptr);
            for (std::size_t c = 0; c < bundle.cameras.size(); ++c) {
                masks[c] = match_mask_to_frame(bundle.masks_per_camera[c], frame.t,
                                               bundle.mask_match_tol_us);
            }
            labeled = kernels::classify_points(frame.points, bundle.cameras, masks, pose);
        }
        const Vec2 sensor{pose.translation().x(), pose.translation().y()};
        acc.accumulate_frame(labeled, sensor, cfg.max_range_m);
    }

    MappingResult result;
    result.raw = acc.finalize_cells(cfg.observed_threshold());
    BinaryMap processed = post_process(result.raw, cfg);
    result.stats.frames = acc.frames_seen();
    result.stats.raw_static_cells = result.raw.count_static();
    result.stats.post_morphology_cells = processed.count_static();
    result.merged = enc_map ? merge_with_enc(processed, *enc_map) : std::move(processed);
    result.stats.post_enc_merge_cells = result.merged.count_static();
    return result;
}

}  // namespace nearshore
