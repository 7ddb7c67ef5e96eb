#pragma once

#include "nearshore/grid.hpp"
#include "nearshore/kernels.hpp"
#include "nearshore/sequence.hpp"

#include <vector>

namespace nearshore {

struct DetectorConfig {
    double epsilon = 1.5;  // meters
    int min_points = 4;

    void validate() const;
};

struct Detection {
    Timestamp t = 0;
    double x = 0.0;
    double y = 0.0;
    int n_points = 0;
};

struct ClusterResult {
    /// Each cluster's member indices into the input point vector, sorted.
    /// Clusters are ordered by their seed (lexicographically smallest core
    /// point), so labels do not depend on input order.
    std::vector<std::vector<int>> clusters;
    std::vector<int> noise;  // indices, sorted
};

/// Density-based clustering over 2D points. Core point: >= min_points
/// neighbors within epsilon, the point itself included. Border points
/// reachable from several clusters go to the cluster of their nearest core
/// neighbor; distance ties resolve to the cluster with the smaller seed.
ClusterResult dbscan_cluster(const std::vector<Vec2>& points, const DetectorConfig& cfg);

/// One detection per cluster at the arithmetic centroid of its members.
std::vector<Detection> clusters_to_detections(const std::vector<Vec2>& points,
                                              const ClusterResult& clusters, Timestamp t);

/// Map-filter a frame to world 2D points. Null map keeps all points.
std::vector<Vec2> filter_points_by_map(const LidarFrame& frame, const RigidTransform& pose,
                                       const BinaryMap* map);

/// filter + cluster + centroid for one frame.
std::vector<Detection> detect_frame(const LidarFrame& frame, const RigidTransform& pose,
                                    const BinaryMap* map, const DetectorConfig& cfg);

}  // namespace nearshore
