#include "nearshore/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace nearshore {

namespace {

double safe_ratio(double num, double den, double when_empty) {
    return den > 0.0 ? num / den : when_empty;
}

}  // namespace

int TrackScore::total_fragmentation() const {
    int n = 0;
    for (const auto& t : per_target) n += t.fragmentation;
    return n;
}

int TrackScore::total_id_switches() const {
    int n = 0;
    for (const auto& t : per_target) n += t.id_switches;
    return n;
}

MapScore score_map(const BinaryMap& estimated, const BinaryMap& truth,
                   const BinaryMap& docked_footprint, const BinaryMap& coverage_region) {
    if (!(estimated.spec == truth.spec) || !(estimated.spec == docked_footprint.spec) ||
        !(estimated.spec == coverage_region.spec)) {
        throw ConfigError("score_map: grid specs differ");
    }
    std::size_t inter = 0;
    std::size_t uni = 0;
    std::size_t docked = 0;
    std::size_t docked_excluded = 0;
    std::size_t covered_truth = 0;
    std::size_t covered_truth_mapped = 0;
    for (std::size_t i = 0; i < estimated.cells.size(); ++i) {
        const bool e = estimated.cells[i] != 0;
        const bool t = truth.cells[i] != 0;
        if (e && t) ++inter;
        if (e || t) ++uni;
        if (docked_footprint.cells[i]) {
            ++docked;
            if (!e) ++docked_excluded;
        }
        if (t && coverage_region.cells[i]) {
            ++covered_truth;
            if (e) ++covered_truth_mapped;
        }
    }
    MapScore s;
    s.iou = safe_ratio(static_cast<double>(inter), static_cast<double>(uni), 1.0);
    s.docked_exclusion =
        safe_ratio(static_cast<double>(docked_excluded), static_cast<double>(docked), 1.0);
    s.coverage_rate = safe_ratio(static_cast<double>(covered_truth_mapped),
                                 static_cast<double>(covered_truth), 0.0);
    return s;
}

std::map<std::pair<Timestamp, int>, std::uint64_t> match_table(
    const std::vector<TrackSnapshot>& snapshots, const std::vector<TruthSample>& truth,
    double match_radius_m) {
    // Group both streams by timestamp.
    std::map<Timestamp, std::vector<const TrackSnapshot*>> tracks_at;
    for (const TrackSnapshot& s : snapshots) {
        if (s.status == TrackStatus::Confirmed) {
            tracks_at[s.t].push_back(&s);
        }
    }
    std::map<Timestamp, std::vector<const TruthSample*>> truth_at;
    for (const TruthSample& s : truth) {
        truth_at[s.t].push_back(&s);
    }

    std::map<std::pair<Timestamp, int>, std::uint64_t> out;
    for (const auto& [t, targets] : truth_at) {
        auto it = tracks_at.find(t);
        if (it == tracks_at.end()) {
            continue;
        }
        // Greedy nearest assignment: all candidate pairs within the radius,
        // closest first; ties fall back to lower track id then target id.
        struct Pair {
            double d2;
            std::uint64_t track_id;
            int target_id;
            const TrackSnapshot* snap;
            const TruthSample* tgt;
        };
        std::vector<Pair> pairs;
        const double r2 = match_radius_m * match_radius_m;
        for (const TrackSnapshot* snap : it->second) {
            for (const TruthSample* tgt : targets) {
                const double dx = snap->x - tgt->x;
                const double dy = snap->y - tgt->y;
                const double d2 = dx * dx + dy * dy;
                if (d2 <= r2) {
                    pairs.push_back({d2, snap->track_id, tgt->target_id, snap, tgt});
                }
            }
        }
        std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
            if (a.d2 != b.d2) return a.d2 < b.d2;
            if (a.track_id != b.track_id) return a.track_id < b.track_id;
            return a.target_id < b.target_id;
        });
        std::set<std::uint64_t> used_tracks;
        std::set<int> used_targets;
        for (const Pair& p : pairs) {
            if (used_tracks.count(p.track_id) || used_targets.count(p.target_id)) {
                continue;
            }
            used_tracks.insert(p.track_id);
            used_targets.insert(p.target_id);
            out[{t, p.target_id}] = p.track_id;
        }
    }
    return out;
}

TrackScore score_tracks(const std::vector<TrackSnapshot>& snapshots,
                        const std::vector<TruthSample>& truth, double match_radius_m) {
    TrackScore score;

    std::set<std::uint64_t> confirmed_ids;
    std::set<std::uint64_t> all_ids;
    for (const TrackSnapshot& s : snapshots) {
        all_ids.insert(s.track_id);
        if (s.status == TrackStatus::Confirmed) {
            confirmed_ids.insert(s.track_id);
        }
    }
    score.confirmed_tracks = static_cast<int>(confirmed_ids.size());
    score.tentative_only_tracks = static_cast<int>(all_ids.size() - confirmed_ids.size());

    std::set<int> target_ids;
    std::map<int, Timestamp> first_truth;
    for (const TruthSample& s : truth) {
        target_ids.insert(s.target_id);
        auto it = first_truth.find(s.target_id);
        if (it == first_truth.end() || s.t < it->second) {
            first_truth[s.target_id] = s.t;
        }
    }
    score.true_targets = static_cast<int>(target_ids.size());

    const auto matches = match_table(snapshots, truth, match_radius_m);

    std::set<std::uint64_t> ever_matched;
    for (const auto& [key, track_id] : matches) {
        ever_matched.insert(track_id);
    }
    for (std::uint64_t id : confirmed_ids) {
        if (!ever_matched.count(id)) {
            ++score.false_tracks;
        }
    }

    // Per-target timeline: walk matches in time order.
    std::set<Timestamp> timestamps;
    for (const TruthSample& s : truth) {
        timestamps.insert(s.t);
    }
    for (int target : target_ids) {
        TargetTrackScore ts;
        ts.target_id = target;
        bool in_run = false;
        bool had_run = false;
        std::uint64_t last_id = 0;
        bool have_last_id = false;
        for (Timestamp t : timestamps) {
            auto it = matches.find({t, target});
            if (it == matches.end()) {
                in_run = false;
                continue;
            }
            if (ts.time_to_first_confirmed_s < 0.0) {
                ts.time_to_first_confirmed_s = to_seconds(t - first_truth[target]);
            }
            if (!in_run) {
                if (had_run) {
                    ++ts.fragmentation;
                }
                in_run = true;
                had_run = true;
            }
            if (have_last_id && it->second != last_id) {
                ++ts.id_switches;
            }
            last_id = it->second;
            have_last_id = true;
        }
        score.per_target.push_back(ts);
    }
    return score;
}

}  // namespace nearshore
