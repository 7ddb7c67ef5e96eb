#pragma once

#include "nearshore/detector.hpp"
#include "nearshore/enc.hpp"
#include "nearshore/evaluator.hpp"
#include "nearshore/grid.hpp"
#include "nearshore/masks.hpp"
#include "nearshore/sequence.hpp"
#include "nearshore/simulator.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nearshore::io {

// Point clouds: header `timestamp_us,x,y,z`, one point per row, frames
// delimited by timestamp change. Plain text, UTF-8, LF.
std::vector<LidarFrame> load_lidar_sequence(const std::string& path);
void save_lidar_sequence(const std::vector<LidarFrame>& frames, const std::string& path);

// Poses: `timestamp_us,x,y,z,qw,qx,qy,qz`, world-from-LiDAR-body; unit
// quaternions checked to 1e-6.
std::vector<PoseSample> load_poses(const std::string& path);
void save_poses(const std::vector<PoseSample>& poses, const std::string& path);

// Masks: JSON array of frames, each
// {timestamp_us, width, height, instances:[{rows:[{y, spans:[[x0,x1],...]}]}]}.
std::vector<MaskFrame> load_masks(const std::string& path);
void save_masks(const std::vector<MaskFrame>& masks, const std::string& path);

// Calibration: {"cameras":[{name, K:{fx,fy,cx,cy,width,height},
// H_cam_lidar:{qw,qx,qy,qz,x,y,z}}]}; a single top-level {K, H_cam_lidar}
// object is accepted too.
std::vector<CameraView> load_calibration(const std::string& path);
void save_calibration(const std::vector<CameraView>& cameras, const std::string& path);

// ENC: GeoJSON FeatureCollection (or bare geometry) of Polygon /
// MultiPolygon, coordinates already metric in the world frame.
EncPolygonSet load_enc(const std::string& path);
void save_enc(const EncPolygonSet& enc, const std::string& path);

// Map raster: binary PGM (P5; P2 accepted on read), 255 = static, 0 = water,
// top raster row is the maximum-y grid row. A JSON sidecar (same path with
// .json extension) carries the GridSpec and provenance.
void save_map(const BinaryMap& map, const std::string& pgm_path,
              const std::string& config_hash = "",
              const std::vector<std::string>& input_paths = {});
BinaryMap load_map(const std::string& pgm_path);

// Detections: `timestamp_us,x,y,n_points`.
void save_detections(const std::vector<Detection>& detections, const std::string& path);
std::vector<Detection> load_detections(const std::string& path);

// Track snapshots: `timestamp_us,track_id,status,x,y,vx,vy,r,v,P_xx,P_xy,P_yy`.
// Loading sorts by (timestamp, track id), so row order does not matter.
void save_tracks(const std::vector<TrackSnapshot>& snapshots, const std::string& path);
std::vector<TrackSnapshot> load_tracks(const std::string& path);

// Truth tracks: `timestamp_us,target_id,x,y`.
void save_truth(const std::vector<TruthSample>& samples, const std::string& path);
std::vector<TruthSample> load_truth(const std::string& path);

// Per-track lifespan/confirmation summary derived from a snapshot stream.
void save_track_summary(const std::vector<TrackSnapshot>& snapshots, const std::string& path);

// Scores: JSON report plus a flat `metric,value` table.
void save_score_report(const MapScore* map_score, const TrackScore* track_score,
                       const std::string& json_path, const std::string& csv_path);

/// Boundary rings of the static region (cell-edge following), for GIS
/// inspection. Rings are closed; interiors keep static cells on the left.
std::vector<Ring> map_boundary_rings(const BinaryMap& map);
void save_boundary_geojson(const std::vector<Ring>& rings, const std::string& path);

/// Sequence manifest tying one simulated/recorded dataset together.
struct Manifest {
    std::string points;
    std::string poses;
    std::string calib;
    std::vector<std::string> masks;  // one per camera
    std::string enc;
    std::string truth_tracks;
    std::string truth_map;
    std::string docked_footprint;
    std::string coverage;
    GridSpec grid;
};
void save_manifest(const Manifest& m, const std::string& path);
Manifest load_manifest(const std::string& path);

/// Load everything a mapping/tracking run needs. Paths in the manifest are
/// resolved relative to the manifest's directory.
SequenceBundle load_bundle(const std::string& manifest_path);

// Scenario specs as JSON, for `simulate --spec`.
void save_scenario_spec(const ScenarioSpec& spec, const std::string& path);
ScenarioSpec load_scenario_spec(const std::string& path);

std::uint64_t fnv1a(const std::string& data);
std::string fnv1a_hex(const std::string& data);

/// Canonical float formatting used by every text format ("%.6f").
std::string format_double(double v);

}  // namespace nearshore::io
