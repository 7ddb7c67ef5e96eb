#include "nearshore/detector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace nearshore {

namespace {

inline double dist_sq(const Vec2& a, const Vec2& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

// Union-find over core points.
struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

// Uniform grid hash with epsilon-sized cells; neighbor candidates come from
// the 3x3 block around a point's cell.
class NeighborIndex {
public:
    NeighborIndex(const std::vector<Vec2>& pts, double eps) : pts_(pts), eps_(eps) {
        buckets_.reserve(pts.size());
        for (int i = 0; i < static_cast<int>(pts.size()); ++i) {
            buckets_[key(pts[i])].push_back(i);
        }
    }

    template <typename Fn>
    void for_each_neighbor(int i, Fn&& fn) const {
        const Vec2& p = pts_[i];
        const long long cx = coord(p.x);
        const long long cy = coord(p.y);
        const double eps_sq = eps_ * eps_;
        for (long long gx = cx - 1; gx <= cx + 1; ++gx) {
            for (long long gy = cy - 1; gy <= cy + 1; ++gy) {
                auto it = buckets_.find(pack(gx, gy));
                if (it == buckets_.end()) continue;
                for (int j : it->second) {
                    if (dist_sq(p, pts_[j]) <= eps_sq) {
                        fn(j);
                    }
                }
            }
        }
    }

private:
    long long coord(double v) const { return static_cast<long long>(std::floor(v / eps_)); }
    long long pack(long long x, long long y) const { return x * 0x1000003LL + y; }
    long long key(const Vec2& p) const { return pack(coord(p.x), coord(p.y)); }

    const std::vector<Vec2>& pts_;
    double eps_;
    std::unordered_map<long long, std::vector<int>> buckets_;
};

inline bool lex_less(const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
}

}  // namespace

void DetectorConfig::validate() const {
    if (!(epsilon > 0.0)) {
        throw ConfigError("dbscan epsilon must be positive");
    }
    if (min_points < 1) {
        throw ConfigError("dbscan min_points must be at least 1");
    }
}

ClusterResult dbscan_cluster(const std::vector<Vec2>& points, const DetectorConfig& cfg) {
    cfg.validate();
    const int n = static_cast<int>(points.size());
    ClusterResult result;
    if (n == 0) {
        return result;
    }

    NeighborIndex index(points, cfg.epsilon);

    std::vector<char> core(n, 0);
    for (int i = 0; i < n; ++i) {
        int count = 0;
        index.for_each_neighbor(i, [&](int) { ++count; });
        core[i] = count >= cfg.min_points ? 1 : 0;
    }

    // Clusters are connected components of core points under eps-adjacency;
    // union-find makes the component sets independent of input order.
    DisjointSet ds(n);
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        index.for_each_neighbor(i, [&](int j) {
            if (core[j]) ds.unite(i, j);
        });
    }

    // Canonical seed per component: lexicographically smallest core point.
    std::unordered_map<int, int> seed_of_root;
    for (int i = 0; i < n; ++i) {
        if (!core[i]) continue;
        const int root = ds.find(i);
        auto it = seed_of_root.find(root);
        if (it == seed_of_root.end() || lex_less(points[i], points[it->second])) {
            seed_of_root[root] = i;
        }
    }

    // Order clusters by seed coordinate.
    std::vector<std::pair<int, int>> roots;  // (seed index, root)
    roots.reserve(seed_of_root.size());
    for (const auto& [root, seed] : seed_of_root) {
        roots.emplace_back(seed, root);
    }
    std::sort(roots.begin(), roots.end(), [&](const auto& a, const auto& b) {
        return lex_less(points[a.first], points[b.first]);
    });
    std::unordered_map<int, int> cluster_of_root;
    for (int c = 0; c < static_cast<int>(roots.size()); ++c) {
        cluster_of_root[roots[c].second] = c;
    }

    result.clusters.assign(roots.size(), {});
    std::vector<int> assignment(n, -1);
    for (int i = 0; i < n; ++i) {
        if (core[i]) {
            assignment[i] = cluster_of_root[ds.find(i)];
        }
    }

    // Border points: nearest core neighbor wins; ties between clusters break
    // toward the smaller seed coordinate.
    for (int i = 0; i < n; ++i) {
        if (core[i]) continue;
        int best_cluster = -1;
        double best_d = std::numeric_limits<double>::infinity();
        index.for_each_neighbor(i, [&](int j) {
            if (!core[j]) return;
            const double d = dist_sq(points[i], points[j]);
            const int cand = assignment[j];
            if (d < best_d ||
                (d == best_d && best_cluster >= 0 &&
                 lex_less(points[roots[cand].first], points[roots[best_cluster].first]))) {
                best_d = d;
                best_cluster = cand;
            }
        });
        assignment[i] = best_cluster;
    }

    for (int i = 0; i < n; ++i) {
        if (assignment[i] >= 0) {
            result.clusters[assignment[i]].push_back(i);
        } else {
            result.noise.push_back(i);
        }
    }
    return result;
}

std::vector<Detection> clusters_to_detections(const std::vector<Vec2>& points,
                                              const ClusterResult& clusters, Timestamp t) {
    std::vector<Detection> out;
    out.reserve(clusters.clusters.size());
    for (const std::vector<int>& members : clusters.clusters) {
        // Sum in canonical (sorted-coordinate) order so the centroid does not
        // depend on input permutation.
        std::vector<int> order = members;
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return lex_less(points[a], points[b]); });
        double sx = 0.0;
        double sy = 0.0;
        for (int i : order) {
            sx += points[i].x;
            sy += points[i].y;
        }
        Detection d;
        d.t = t;
        d.x = sx / static_cast<double>(members.size());
        d.y = sy / static_cast<double>(members.size());
        d.n_points = static_cast<int>(members.size());
        out.push_back(d);
    }
    return out;
}

std::vector<Vec2> filter_points_by_map(const LidarFrame& frame, const RigidTransform& pose,
                                       const BinaryMap* map) {
    return kernels::filter_points_by_map(frame.points, pose, map);
}

std::vector<Detection> detect_frame(const LidarFrame& frame, const RigidTransform& pose,
                                    const BinaryMap* map, const DetectorConfig& cfg) {
    const std::vector<Vec2> pts = filter_points_by_map(frame, pose, map);
    const ClusterResult clusters = dbscan_cluster(pts, cfg);
    return clusters_to_detections(pts, clusters, frame.t);
}

}  // namespace nearshore
