#pragma once

#include "nearshore/grid.hpp"
#include "nearshore/simulator.hpp"
#include "nearshore/tracker.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace nearshore {

struct MapScore {
    double iou = 0.0;                 // of static regions
    double docked_exclusion = 1.0;    // docked footprint cells NOT static
    double coverage_rate = 0.0;       // covered truth-static cells marked static
};

struct TargetTrackScore {
    int target_id = 0;
    double time_to_first_confirmed_s = -1.0;  // -1: never tracked
    int fragmentation = 0;                    // interruptions of matched runs
    int id_switches = 0;                      // matched id differs from previous
};

struct TrackScore {
    int confirmed_tracks = 0;
    int tentative_only_tracks = 0;  // born but never confirmed
    int true_targets = 0;
    int false_tracks = 0;  // confirmed tracks never matched to any target
    std::vector<TargetTrackScore> per_target;

    int total_fragmentation() const;
    int total_id_switches() const;
};

/// Set arithmetic over cells; all maps must share one GridSpec.
MapScore score_map(const BinaryMap& estimated, const BinaryMap& truth,
                   const BinaryMap& docked_footprint, const BinaryMap& coverage_region);

/// One snapshot row as the tracker emits them.
struct TrackSnapshot {
    Timestamp t = 0;
    std::uint64_t track_id = 0;
    TrackStatus status = TrackStatus::Tentative;
    double x = 0.0;
    double y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double existence = 0.0;
    double visibility = 0.0;
    double p_xx = 0.0;
    double p_xy = 0.0;
    double p_yy = 0.0;
};

/// Greedy nearest one-to-one assignment of confirmed tracks to truth targets
/// per timestep, within match_radius_m.
TrackScore score_tracks(const std::vector<TrackSnapshot>& snapshots,
                        const std::vector<TruthSample>& truth, double match_radius_m = 3.0);

/// Matched track id per (timestamp, target); exposed for occlusion checks.
std::map<std::pair<Timestamp, int>, std::uint64_t> match_table(
    const std::vector<TrackSnapshot>& snapshots, const std::vector<TruthSample>& truth,
    double match_radius_m);

}  // namespace nearshore
