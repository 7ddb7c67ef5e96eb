#pragma once

#include "nearshore/kernels.hpp"
#include "nearshore/sequence.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nearshore {

struct MapperConfig {
    double window_seconds = 5.0;
    double frame_rate_hz = 10.0;
    double max_range_m = 100.0;
    double min_observed_fraction = 0.40;
    double cell_size_m = 0.5;
    int dilate_radius_cells = 1;  // closing radius
    int erode_radius_cells = 1;   // opening radius
    bool close_then_open = true;

    /// W, the window length in frames.
    int window_frames() const;
    /// Observed-slot count at which a cell becomes static: ceil(fraction * W).
    int observed_threshold() const;
    void validate() const;
};

/// Per-cell sliding-window observation history over the last W frames.
/// Ring of W bit planes; running per-cell counts are maintained on
/// insertion/eviction so finalization is a single pass.
class AccumulatorGrid {
public:
    AccumulatorGrid(const GridSpec& spec, int window_frames);

    const GridSpec& spec() const { return spec_; }
    int window() const { return window_; }
    std::int64_t frames_seen() const { return frames_seen_; }

    /// Advance the ring one slot and mark one frame of labeled points.
    /// Vessel marks set observed+vessel, Candidate sets observed, Unknown
    /// points are dropped. Points beyond max_range_m (sensor to cell
    /// center, horizontal) are ignored.
    void accumulate_frame(const std::vector<LabeledPoint>& points, Vec2 sensor_position,
                          double max_range_m);

    /// Static iff never flagged vessel in the current window and observed in
    /// at least `observed_threshold` slots. Throws ConfigError before the
    /// window has filled once.
    BinaryMap finalize_cells(int observed_threshold) const;

    int observed_count(int col, int row) const;
    int vessel_count(int col, int row) const;
    std::int64_t last_vessel_frame(int col, int row) const;  // -1 when never

private:
    GridSpec spec_;
    int window_;
    std::int64_t frames_seen_ = 0;
    // planes[slot] holds one bit per cell, packed.
    std::vector<std::vector<std::uint64_t>> observed_planes_;
    std::vector<std::vector<std::uint64_t>> vessel_planes_;
    std::vector<std::uint16_t> observed_count_;
    std::vector<std::uint16_t> vessel_count_;
    std::vector<std::int64_t> last_vessel_frame_;

    static bool test_bit(const std::vector<std::uint64_t>& plane, std::size_t i);
    static void set_bit(std::vector<std::uint64_t>& plane, std::size_t i);
};

/// Per-point labels + world 2D for one frame. masks entries may be null.
std::vector<LabeledPoint> classify_points(const LidarFrame& frame,
                                          const std::vector<CameraView>& cameras,
                                          const std::vector<const MaskFrame*>& masks,
                                          const RigidTransform& world_from_lidar);

/// Closing then opening (or the reverse) with square structuring elements.
BinaryMap post_process(const BinaryMap& m, const MapperConfig& cfg);

/// Cell-wise union; GridSpecs must match.
BinaryMap merge_with_enc(const BinaryMap& lidar_map, const BinaryMap& enc_map);

/// Static region grown by ceil(margin_m / cell_size) cells.
BinaryMap dilate_map(const BinaryMap& m, double margin_m);

struct MappingStats {
    std::int64_t frames = 0;
    std::size_t raw_static_cells = 0;
    std::size_t post_morphology_cells = 0;
    std::size_t post_enc_merge_cells = 0;
};

struct MappingResult {
    BinaryMap raw;     // straight from finalize_cells
    BinaryMap merged;  // post-processed, ENC-merged when an ENC map is given
    MappingStats stats;
};

/// Full offline mapping pass over a sequence: classify each frame against
/// its nearest mask frames, accumulate, finalize once from the final
/// window, post-process, merge the ENC. With ignore_masks every point is
/// treated as Candidate regardless of the cameras (naive accumulation).
MappingResult run_mapping(const SequenceBundle& bundle, const MapperConfig& cfg,
                          const BinaryMap* enc_map, bool ignore_masks = false);

}  // namespace nearshore
